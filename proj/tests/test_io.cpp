#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "helpers.hpp"
#include "resp/fixtures.hpp"
#include "resp/problem_io.hpp"
#include "resp/structure.hpp"

using namespace resp;
using resp::testing::el;

namespace {

Json parse_json(const char* text) { return Json::parse(text); }

// Runs f, which must throw Error, and returns the message.
template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "(no error)";
}

bool mentions(const std::string& msg, const std::string& part) {
  return msg.find(part) != std::string::npos;
}

const char* kLineDoc =
    R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1]},
        "A":[[1,0]],"B":[[1,0]],"phi":[[[1,0],[1,0]]]})";

const char* kMult2Doc =
    R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1]},
        "A":[[1]],"B":[[1]],"phi":[[[1],[2]]]})";

const char* kRank3Doc =
    R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1,1]},
        "A":[[1,0,0],[0,1,0]],"B":[[1,0,0],[0,0,1]],
        "phi":[[[1,0,0],[1,0,1]],[[0,1,0],[0,0,1]]]})";

const char* kShiftDoc =
    R"({"schema":1,
        "group":{"kind":"matrix_semidirect","p":3,"m":3,
                 "action":[[0,0,1],[1,0,0],[0,1,0]],"relations":[[1,1,1]]},
        "A":[[1,0,2,2]],"B":[[1,0,0,1]],
        "phi":[[[1,0,2,2],[2,0,2,0]]]})";

}  // namespace

TEST_CASE("problem parsing builds validated pairs") {
  SUBCASE("explicit abelian pair") {
    ProblemSpec spec = parse_problem(parse_json(kRank3Doc));
    CHECK(spec.pair.G.order() == 27);
    CHECK(spec.pair.A.order() == 9);
    CHECK(spec.pair.B.order() == 9);
    CHECK(spec.pair.phi.apply(el({1, 0, 0})) == el({1, 0, 1}));
    CHECK(!spec.fixture.has_value());
    CHECK(spec.doc["schema"] == 1);
  }
  SUBCASE("matrix semidirect pair matches the hand-built one") {
    ProblemSpec spec = parse_problem(parse_json(kShiftDoc));
    HnnPair direct = testing::shift27_pair();
    CHECK(spec.pair.G.order() == 27);
    CHECK(spec.pair.A.elements() == direct.A.elements());
    CHECK(spec.pair.B.elements() == direct.B.elements());
    for (const Element& a : direct.A.elements())
      CHECK(spec.pair.phi.apply(a) == direct.phi.apply(a));
  }
  SUBCASE("fixture by reference name") {
    ProblemSpec spec = parse_problem(
        parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"cyclic_shift"}})"));
    CHECK(spec.fixture == "cyclic_shift");
    CHECK(spec.pair.G.order() == 27);
  }
  SUBCASE("fixture builders accept parameters") {
    ProblemSpec spec = parse_problem(parse_json(
        R"({"schema":1,"group":{"kind":"fixture","name":"abelian_rank3",
            "p":3,"x":2,"y":0,"z":1}})"));
    CHECK(spec.pair.G.order() == 27);
    CHECK(spec.pair.phi.apply(el({1, 0, 0})) == el({2, 0, 0}));
  }
  SUBCASE("twist replaces phi by the twisted map") {
    ProblemSpec plain = parse_problem(parse_json(kShiftDoc));
    Json doc = parse_json(kShiftDoc);
    doc["twist"] = Json{{"a", {1, 0, 2, 2}}, {"b", {0, 0, 0, 0}}};
    ProblemSpec spec = parse_problem(doc);
    HnnPair expect = twisted_pair(plain.pair, el({1, 0, 2, 2}), el({0, 0, 0, 0}));
    for (const Element& a : expect.A.elements())
      CHECK(spec.pair.phi.apply(a) == expect.phi.apply(a));
    CHECK(spec.doc["twist"]["a"] == Json::array({1, 0, 2, 2}));
  }
  SUBCASE("trivial subgroups parse from empty generator lists") {
    ProblemSpec spec = parse_problem(parse_json(
        R"({"schema":1,"group":{"kind":"abelian","p":2,"exponents":[1,1]},
            "A":[],"B":[],"phi":[]})"));
    CHECK(spec.pair.A.order() == 1);
    CHECK(spec.pair.B.order() == 1);
  }
}

TEST_CASE("parse diagnostics name the offending field") {
  auto err = [](const char* text) {
    return error_of([&] { parse_problem(Json::parse(text)); });
  };
  CHECK(mentions(error_of([] { parse_problem_text("not json at all"); }),
                 "not valid JSON"));
  CHECK(mentions(err(R"({"group":{"kind":"abelian","p":3,"exponents":[1]},
                         "A":[],"B":[],"phi":[]})"),
                 "missing field \"schema\""));
  CHECK(mentions(err(R"({"schema":2,"group":{"kind":"abelian","p":3,"exponents":[1]},
                         "A":[],"B":[],"phi":[]})"),
                 "unsupported schema version 2"));
  CHECK(mentions(err(R"({"schema":1,"gruop":{},"A":[],"B":[],"phi":[]})"),
                 "unknown field \"gruop\""));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"dihedral"},"A":[],"B":[],"phi":[]})"),
                 "unknown group kind"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1]},
                         "A":[[1]],"B":[],"phi":[]})"),
                 "problem.A[0]"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1]},
                         "A":[[5,0]],"B":[],"phi":[]})"),
                 "not an element"));
  // phi's generators close over a line, but A is the whole plane.
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1]},
                         "A":[[1,0],[0,1]],"B":[[1,0],[0,1]],
                         "phi":[[[1,0],[1,0]]]})"),
                 "do not generate exactly A"));
  // x -> x + x is not injective on Z/2 x Z/2? It is a hom but collapses;
  // here: a well-defined map whose image closure is smaller than B.
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1]},
                         "A":[[1,0]],"B":[[0,1]],"phi":[[[1,0],[0,0]]]})"),
                 "problem"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1,1]},
                         "A":[[1,0]],"B":[[1,0]],"phi":[[[1,0],[1,0]]],
                         "twist":{"a":[0,1],"b":[0,0]}})"),
                 "twist element is not in A"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1]},
                         "A":[],"B":[],"phi":[],"options":{"p":5}})"),
                 "group has prime 3"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"fixture","name":"wreath"},
                         "A":[]})"),
                 "fixture problems fix A, B and phi"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"fixture","name":"nope"}})"),
                 "available:"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1]},
                         "A":[],"B":[],"phi":[],
                         "word":[{"t":1,"g":[0]}]})"),
                 "exactly one of"));
  CHECK(mentions(err(R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1]},
                         "A":[],"B":[],"phi":[],
                         "word":[{"t":2}]})"),
                 "sign must be 1 or -1"));
}

TEST_CASE("serialization round-trips through the rebuilders") {
  HnnPair pair = testing::shift27_pair();
  SUBCASE("subgroup and filtration") {
    Filtration lcs = lower_central_series(pair.G);
    Json j = filtration_to_json(lcs);
    Filtration back = filtration_from_json(pair.G, j, "f");
    REQUIRE(back.terms.size() == lcs.terms.size());
    for (std::size_t i = 0; i < lcs.terms.size(); ++i)
      CHECK(back.terms[i].elements() == lcs.terms[i].elements());
    CHECK(filtration_to_json(back) == j);
  }
  SUBCASE("chief certificates stay valid") {
    Decision d = decide_chief(testing::rank3_pair(1, 1, 1));
    REQUIRE(d.chief.has_value());
    HnnPair rank3 = testing::rank3_pair(1, 1, 1);
    Json j = certificate_to_json(*d.chief);
    ChiefCertificate back = certificate_from_json(rank3, j);
    std::string why;
    CHECK(check_chief_certificate(rank3, back, &why));
    CHECK(certificate_to_json(back) == j);
  }
  SUBCASE("words") {
    Word w = {Letter::stable(-1), Letter::group(el({1, 0, 2, 2})), Letter::stable(1)};
    Json j = word_to_json(w);
    CHECK(word_from_json(pair, j, "w") == w);
  }
  SUBCASE("maps reject tampering") {
    Json j = map_to_json(pair.phi);
    j[1][1] = j[0][1];  // two domain elements now share an image of a hom? no
    CHECK(mentions(error_of([&] { map_from_json(pair.A, pair.B, j, "phi"); }),
                   "phi"));
  }
}

TEST_CASE("cmd_core emits frozen fixture values") {
  SUBCASE("wreath untwisted") {
    ProblemSpec spec = parse_problem(
        parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"wreath"}})"));
    CmdResult res = cmd_core(spec);
    CHECK(res.exit_code == 0);
    CHECK(res.output["core"] == Json::array({Json::array({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})}));
    CHECK(res.output["r"] == 1);
    CHECK(res.output["order"] == 1);
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("wreath twisted by a = (x, 0)") {
    Json doc = parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"wreath"}})");
    doc["twist"] = Json{{"a", {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
                        {"b", {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}}};
    CmdResult res = cmd_core(parse_problem(doc));
    CHECK(res.output["core"].size() == 3);
    CHECK(res.output["order"] == 2);
    CHECK(verify_certificate(res.output).ok);
  }
}

TEST_CASE("cmd_decide documents re-verify and carry the right exit codes") {
  SUBCASE("trivial pair: YES with a vacuous chief certificate") {
    ProblemSpec spec = parse_problem(parse_json(
        R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1]},
            "A":[],"B":[],"phi":[]})"));
    CmdResult res = cmd_decide(spec);
    CHECK(res.exit_code == 0);
    CHECK(res.output["decision"]["verdict"] == "residually_p");
    CHECK(res.output["decision"].contains("certificate"));
    for (const Json& layer : res.output["decision"]["certificate"]["layers"])
      CHECK(layer["a_elements"].size() == 1);  // only the identity
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("trivial pair over a group beyond the cap") {
    Json doc = parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"wreath"}})");
    ProblemSpec spec = parse_problem(doc);
    // Rebuild the pair with trivial sides: reuse the ambient through a twist-free
    // explicit problem is impossible for this kind, so call decide_auto directly.
    HnnPair trivial = make_pair(spec.pair.G, Subgroup::trivial(spec.pair.G),
                                Subgroup::trivial(spec.pair.G),
                                GroupMap::identity_on(Subgroup::trivial(spec.pair.G)));
    Decision d = decide_auto(trivial);
    CHECK(d.verdict == Verdict::ResiduallyP);
    CHECK(d.method == "trivial_pair");
  }
  SUBCASE("mult-by-2 on Z/3: NO with a re-checkable violation") {
    CmdResult res = cmd_decide(parse_problem(parse_json(kMult2Doc)));
    CHECK(res.exit_code == 0);
    CHECK(res.output["decision"]["verdict"] == "not_residually_p");
    CHECK(res.output["decision"]["violation"]["map_order"] == 2);
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("cyclic shift: NO through the chief search") {
    CmdResult res = cmd_decide(parse_problem(
        parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"cyclic_shift"}})")));
    CHECK(res.exit_code == 0);
    CHECK(res.output["decision"]["method"] == "decide_chief");
    CHECK(res.output["decision"]["verdict"] == "not_residually_p");
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("a tight cap forces the obstruction route and exit code 1") {
    Json doc = parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"cyclic_shift"},
                              "options":{"cap":10}})");
    CmdResult res = cmd_decide(parse_problem(doc));
    CHECK(res.exit_code == 1);
    CHECK(res.output["decision"]["method"] == "obstruction_toplevel");
    CHECK(res.output["decision"]["verdict"] == "inconclusive");
    CHECK(res.output["decision"]["transcript"]["exhausted"] == true);
    CHECK(verify_certificate(res.output).ok);
  }
}

TEST_CASE("cmd_obstruct routes by ambient size") {
  CmdResult full = cmd_obstruct(parse_problem(
      parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"cyclic_shift"}})")));
  CHECK(full.exit_code == 0);
  CHECK(full.output["decision"]["method"] == "obstruction_full");
  CHECK(verify_certificate(full.output).ok);

  CmdResult top = cmd_obstruct(parse_problem(
      parse_json(R"({"schema":1,"group":{"kind":"fixture","name":"wreath"}})")));
  CHECK(top.exit_code == 0);
  CHECK(top.output["decision"]["method"] == "obstruction_toplevel");
  CHECK(top.output["decision"]["violation"]["core_order"] == 3);
  CHECK(top.output["decision"]["violation"]["map_order"] == 2);
  CHECK(verify_certificate(top.output).ok);
}

TEST_CASE("cmd_witness covers all four routes and re-verifies") {
  SUBCASE("elementary") {
    CmdResult res = cmd_witness(parse_problem(parse_json(kLineDoc)));
    CHECK(res.exit_code == 0);
    CHECK(res.output["witness"]["route"] == "elementary");
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("pipeline on a non-elementary group") {
    CmdResult res = cmd_witness(parse_problem(parse_json(
        R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[2]},
            "A":[[3]],"B":[[3]],"phi":[[[3],[3]]]})")));
    CHECK(res.output["witness"]["route"] == "pipeline");
    CHECK(res.output["witness"]["k"] == 2);
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("cover only, when the pipeline would exceed the caps") {
    CmdResult res = cmd_witness(parse_problem(parse_json(kRank3Doc)));
    CHECK(res.output["witness"]["route"] == "cover");
    CHECK(res.output["witness"]["cover"]["s"] == 9);
    CHECK(res.output["witness"]["cover"]["order"] == 177147);
    CHECK(verify_certificate(res.output).ok);
  }
  SUBCASE("cover plus pipeline at p = 2") {
    // Same shape as the rank-3 fixture but over F_2: the forced degree is 4
    // and the cover has order 64, so the full chief pipeline fits.
    CmdResult res = cmd_witness(parse_problem(parse_json(
        R"({"schema":1,"group":{"kind":"abelian","p":2,"exponents":[1,1,1]},
            "A":[[1,0,0],[0,1,0]],"B":[[1,0,0],[0,0,1]],
            "phi":[[[1,0,0],[1,0,1]],[[0,1,0],[0,0,1]]]})")));
    CHECK(res.output["witness"]["route"] == "cover+pipeline");
    CHECK(res.output["witness"]["cover"]["s"] == 4);
    CHECK(res.output["witness"]["cover"]["order"] == 64);
    VerifyReport rep = verify_certificate(res.output);
    CHECK(rep.ok);
    CHECK(rep.checks.size() >= 10);  // cover checks plus pipeline checks
  }
  SUBCASE("hypothesis failures name the missing condition") {
    CHECK(mentions(
        error_of([] { cmd_witness(parse_problem(parse_json(kMult2Doc))); }),
        "no witness exists"));
    CHECK(mentions(
        error_of([] {
          cmd_witness(parse_problem(parse_json(
              R"({"schema":1,"group":{"kind":"fixture","name":"cyclic_shift"}})")));
        }),
        "abelian base group"));
  }
}

TEST_CASE("cmd_reduce performs Britton reduction") {
  Json doc = parse_json(kShiftDoc);
  doc["word"] = Json::array({Json{{"t", -1}}, Json{{"g", {1, 0, 2, 2}}}, Json{{"t", 1}}});
  CmdResult res = cmd_reduce(parse_problem(doc));
  CHECK(res.exit_code == 0);
  // t^-1 a t pinches to phi(a) = b^2.
  HnnPair pair = testing::shift27_pair();
  Element expect = pair.phi.apply(el({1, 0, 2, 2}));
  CHECK(res.output["reduced"] == Json::array({Json{{"g", element_to_json(expect)}}}));
  CHECK(res.output["is_group_letter"] == true);
  CHECK(verify_certificate(res.output).ok);

  doc["word"] = Json::array({Json{{"t", 1}}, Json{{"g", {1, 0, 2, 2}}}, Json{{"t", 1}}});
  CmdResult stuck = cmd_reduce(parse_problem(doc));
  CHECK(stuck.output["reduced"].size() == 3);
  CHECK(stuck.output["is_group_letter"] == false);
  CHECK(verify_certificate(stuck.output).ok);
}

TEST_CASE("verify_certificate rejects tampered documents") {
  SUBCASE("edited chief filtration") {
    CmdResult res = cmd_decide(parse_problem(parse_json(
        R"({"schema":1,"group":{"kind":"abelian","p":3,"exponents":[1]},
            "A":[],"B":[],"phi":[]})")));
    Json doc = res.output;
    Json& terms = doc["decision"]["certificate"]["filtration"]["terms"];
    REQUIRE(terms.size() == 2);
    terms.erase(1);  // drop the trivial term: no longer a chief series
    doc["decision"]["certificate"]["filtration"].erase("orders");
    VerifyReport rep = verify_certificate(doc);
    CHECK(!rep.ok);
  }
  SUBCASE("flipped verdict") {
    CmdResult res = cmd_decide(parse_problem(parse_json(kMult2Doc)));
    Json doc = res.output;
    doc["decision"]["verdict"] = "residually_p";
    VerifyReport rep = verify_certificate(doc);
    CHECK(!rep.ok);
  }
  SUBCASE("doctored core") {
    CmdResult res = cmd_core(parse_problem(parse_json(kLineDoc)));
    Json doc = res.output;
    doc["core"] = Json::array();
    CHECK(!verify_certificate(doc).ok);
  }
  SUBCASE("malformed documents throw instead") {
    CHECK(mentions(error_of([] { verify_certificate(parse_json(R"({"schema":1})")); }),
                   "missing field \"problem\""));
    CHECK(mentions(error_of([] {
                     verify_certificate(parse_json(
                         R"({"schema":1,"problem":{"schema":1,
                             "group":{"kind":"abelian","p":3,"exponents":[1]},
                             "A":[],"B":[],"phi":[]}})"));
                   }),
                   "no verifiable block"));
  }
}

TEST_CASE("output bytes are deterministic") {
  auto decide_bytes = [] {
    return dump_json(cmd_decide(parse_problem(parse_json(kShiftDoc))).output);
  };
  CHECK(decide_bytes() == decide_bytes());

  auto witness_bytes = [] {
    return dump_json(cmd_witness(parse_problem(parse_json(kLineDoc))).output);
  };
  CHECK(witness_bytes() == witness_bytes());

  std::string e1 = dump_json(cmd_enumerate(3, 5, 20, 81).output);
  std::string e2 = dump_json(cmd_enumerate(3, 5, 20, 81).output);
  CHECK(e1 == e2);
}

TEST_CASE("cmd_enumerate tallies verdicts and emits parseable examples") {
  CmdResult res = cmd_enumerate(3, 11, 25, 81);
  CHECK(res.exit_code == 0);
  const Json& verdicts = res.output["verdicts"];
  CHECK(verdicts["residually_p"].get<int>() + verdicts["not_residually_p"].get<int>() +
            verdicts["inconclusive"].get<int>() ==
        25);
  for (const auto& item : res.output["examples"].items()) {
    ProblemSpec spec = parse_problem(item.value()["problem"]);
    Decision d = decide_auto(spec.pair);
    CHECK(verdict_name(d.verdict) == item.key());
    CHECK(d.method == item.value()["method"]);
  }
}

TEST_CASE("cmd_verify_paper reports every fact") {
  CmdResult res = cmd_verify_paper(/*heavy=*/false);
  CHECK(res.exit_code == 0);
  CHECK(res.output["ok"] == true);
  CHECK(res.output["total"] == res.output["passed"]);
  CHECK(res.output["fixtures"].size() == 7);
  CHECK(res.text.find("[PASS]") != std::string::npos);
  CHECK(res.text.find("[FAIL]") == std::string::npos);
}
