#include "resp/problem_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "resp/random_pairs.hpp"
#include "resp/structure.hpp"
#include "resp/zlattice.hpp"

namespace resp {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(where + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) fail(where, "unknown field \"" + item.key() + "\"");
  }
}

std::int64_t int_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer())
    fail(where + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<std::int64_t> int_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer())
      fail(where + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(j[i].get<std::int64_t>());
  }
  return out;
}

Coord coord_value(std::int64_t v, const std::string& where) {
  if (v < std::numeric_limits<Coord>::min() || v > std::numeric_limits<Coord>::max())
    fail(where, "coordinate out of range");
  return static_cast<Coord>(v);
}

// True for direct sums of copies of Z/p (the elementary-abelian witness
// route applies exactly to these).
bool exponent_p_abelian(const Group& g) {
  if (g.kind() != "abelian") return false;
  for (std::int64_t m : g.describe()["moduli"].get<std::vector<std::int64_t>>())
    if (m != g.prime()) return false;
  return true;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::uint64_t checked_pow_u64(std::uint64_t base, std::uint64_t exp,
                              const std::string& where) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      fail(where, "order product overflows");
    out *= base;
  }
  return out;
}

}  // namespace

// Elements and groups ---------------------------------------------------------

Json element_to_json(const Element& e) {
  Json a = Json::array();
  for (Coord c : e) a.push_back(c);
  return a;
}

Element element_from_json(const Group& g, const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an element (array of integers)");
  if (j.size() != g.width())
    fail(where, "expected " + std::to_string(g.width()) + " coordinates, got " +
                    std::to_string(j.size()));
  Element e;
  e.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer())
      fail(where + "[" + std::to_string(i) + "]", "expected an integer");
    e.push_back(coord_value(j[i].get<std::int64_t>(),
                            where + "[" + std::to_string(i) + "]"));
  }
  if (!g.contains(e))
    fail(where, "tuple " + format_element(e) + " is not an element of the group");
  return e;
}

Json elements_to_json(const std::vector<Element>& es) {
  Json a = Json::array();
  for (const Element& e : es) a.push_back(element_to_json(e));
  return a;
}

Group group_from_json(const Json& g) {
  const std::string where = "group";
  std::string kind = string_field(g, "kind", where);
  if (kind == "abelian") {
    check_keys(g, {"kind", "p", "exponents", "moduli"}, where);
    std::int64_t p = int_field(g, "p", where);
    if (g.contains("moduli"))
      return make_abelian_moduli(p, int_list(g["moduli"], where + ".moduli"));
    if (g.contains("exponents")) {
      std::vector<int> exps;
      for (std::int64_t e : int_list(g["exponents"], where + ".exponents"))
        exps.push_back(static_cast<int>(e));
      return make_abelian(p, exps);
    }
    fail(where, "abelian descriptor needs \"exponents\" or \"moduli\"");
  }
  if (kind == "matrix_semidirect") {
    check_keys(g, {"kind", "p", "m", "action", "relations"}, where);
    std::int64_t p = int_field(g, "p", where);
    std::int64_t m = int_field(g, "m", where);
    const Json& aj = field(g, "action", where);
    if (!aj.is_array()) fail(where + ".action", "expected a matrix");
    ZMat action;
    for (std::size_t r = 0; r < aj.size(); ++r)
      action.push_back(int_list(aj[r], where + ".action[" + std::to_string(r) + "]"));
    std::vector<ZVec> relations;
    if (g.contains("relations")) {
      const Json& rj = g["relations"];
      if (!rj.is_array()) fail(where + ".relations", "expected an array");
      for (std::size_t r = 0; r < rj.size(); ++r)
        relations.push_back(
            int_list(rj[r], where + ".relations[" + std::to_string(r) + "]"));
    }
    return make_matrix_semidirect(p, m, action, relations);
  }
  if (kind == "group_ring_semidirect") {
    check_keys(g, {"kind", "p", "rank"}, where);
    std::int64_t p = int_field(g, "p", where);
    std::int64_t rank = int_field(g, "rank", where);
    return make_group_ring_semidirect(p, static_cast<int>(rank));
  }
  fail(where, "unknown group kind \"" + kind + "\"");
}

// Problem parsing -------------------------------------------------------------

namespace {

Fixture fixture_from_descriptor(const Json& g) {
  const std::string where = "group";
  std::string name = string_field(g, "name", where);
  if (name == "wreath") {
    check_keys(g, {"kind", "name"}, where);
    return wreath();
  }
  if (name == "cyclic_shift") {
    check_keys(g, {"kind", "name"}, where);
    return cyclic_shift();
  }
  if (name == "abelian_rank3") {
    check_keys(g, {"kind", "name", "p", "x", "y", "z"}, where);
    return abelian_rank3(int_field(g, "p", where),
                         coord_value(int_field(g, "x", where), where + ".x"),
                         coord_value(int_field(g, "y", where), where + ".y"),
                         coord_value(int_field(g, "z", where), where + ".z"));
  }
  if (name == "abelian_rank4") {
    check_keys(g, {"kind", "name", "p", "a", "b", "c"}, where);
    return abelian_rank4(int_field(g, "p", where),
                         coord_value(int_field(g, "a", where), where + ".a"),
                         coord_value(int_field(g, "b", where), where + ".b"),
                         coord_value(int_field(g, "c", where), where + ".c"));
  }
  check_keys(g, {"kind", "name"}, where);
  std::vector<std::string> names;
  for (const Fixture& f : reference_fixtures(true)) {
    if (f.name == name) return f;
    names.push_back(f.name);
  }
  names.insert(names.end(),
               {"abelian_rank3", "abelian_rank4", "wreath", "cyclic_shift"});
  fail(where + ".name", "unknown fixture \"" + name + "\"; available: " +
                            join(names, ", "));
}

std::vector<Element> element_list(const Group& g, const Json& j,
                                  const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of elements");
  std::vector<Element> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(element_from_json(g, j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

ProblemSpec parse_problem(const Json& doc) {
  const std::string where = "problem";
  if (!doc.is_object()) fail(where, "expected an object");
  check_keys(doc, {"schema", "group", "A", "B", "phi", "twist", "options", "word"},
             where);
  std::int64_t schema = int_field(doc, "schema", where);
  if (schema != kSchemaVersion)
    fail(where + ".schema",
         "unsupported schema version " + std::to_string(schema) + " (expected " +
             std::to_string(kSchemaVersion) + ")");

  const Json& gdesc = field(doc, "group", where);
  ProblemSpec spec;
  Json norm;
  norm["schema"] = kSchemaVersion;
  norm["group"] = gdesc;

  if (gdesc.is_object() && gdesc.contains("kind") && gdesc["kind"] == "fixture") {
    if (doc.contains("A") || doc.contains("B") || doc.contains("phi"))
      fail(where, "fixture problems fix A, B and phi; remove those fields");
    Fixture fx = fixture_from_descriptor(gdesc);
    spec.pair = fx.pair;
    spec.fixture = fx.name;
  } else {
    Group group = group_from_json(gdesc);
    std::vector<Element> a_gens =
        element_list(group, field(doc, "A", where), where + ".A");
    std::vector<Element> b_gens =
        element_list(group, field(doc, "B", where), where + ".B");
    const Json& pj = field(doc, "phi", where);
    if (!pj.is_array()) fail(where + ".phi", "expected an array of [x, image] pairs");
    std::vector<Element> xs, images;
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const Json& pr = pj[i];
      const std::string pw = where + ".phi[" + std::to_string(i) + "]";
      if (!pr.is_array() || pr.size() != 2) fail(pw, "expected an [x, image] pair");
      xs.push_back(element_from_json(group, pr[0], pw + "[0]"));
      images.push_back(element_from_json(group, pr[1], pw + "[1]"));
    }
    try {
      Subgroup a = Subgroup::closure(group, a_gens);
      Subgroup b = Subgroup::closure(group, b_gens);
      GroupMap phi = GroupMap::from_generator_images(group, xs, group, images);
      if (!phi.domain().same_set(a))
        fail(where + ".phi",
             "the map generators do not generate exactly A (closure of size " +
                 std::to_string(phi.domain().order()) + " vs |A| = " +
                 std::to_string(a.order()) + ")");
      GroupMap rebased = GroupMap::from_pairs(a, b, phi.table(), /*validate=*/true);
      spec.pair = make_pair(group, std::move(a), std::move(b), std::move(rebased));
    } catch (const Error& e) {
      std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;  // already located
      fail(where, msg);
    }
    norm["A"] = doc["A"];
    norm["B"] = doc["B"];
    norm["phi"] = doc["phi"];
  }

  if (doc.contains("twist")) {
    const Json& tj = doc["twist"];
    check_keys(tj, {"a", "b"}, where + ".twist");
    Element a = element_from_json(spec.pair.G, field(tj, "a", where + ".twist"),
                                  where + ".twist.a");
    Element b = element_from_json(spec.pair.G, field(tj, "b", where + ".twist"),
                                  where + ".twist.b");
    if (!spec.pair.A.contains(a)) fail(where + ".twist.a", "twist element is not in A");
    if (!spec.pair.B.contains(b)) fail(where + ".twist.b", "twist element is not in B");
    spec.pair = twisted_pair(spec.pair, a, b);
    norm["twist"] = Json{{"a", element_to_json(a)}, {"b", element_to_json(b)}};
  }

  if (doc.contains("options")) {
    const Json& oj = doc["options"];
    check_keys(oj, {"p", "cap", "s"}, where + ".options");
    if (oj.contains("p")) spec.options.p = int_field(oj, "p", where + ".options");
    if (oj.contains("cap")) {
      std::int64_t cap = int_field(oj, "cap", where + ".options");
      if (cap < 1) fail(where + ".options.cap", "cap must be positive");
      spec.options.cap = static_cast<std::uint64_t>(cap);
    }
    if (oj.contains("s")) {
      std::int64_t s = int_field(oj, "s", where + ".options");
      if (s < 2) fail(where + ".options.s", "cover degree must be at least 2");
      spec.options.s = s;
    }
    norm["options"] = oj;
  }
  if (spec.options.p && *spec.options.p != spec.pair.G.prime())
    fail(where + ".options.p",
         "group has prime " + std::to_string(spec.pair.G.prime()) + ", not " +
             std::to_string(*spec.options.p));

  if (doc.contains("word")) {
    // Validated here for located diagnostics; consumed by the reduce command.
    word_from_json(spec.pair, doc["word"], where + ".word");
    norm["word"] = doc["word"];
  }

  spec.doc = std::move(norm);
  return spec;
}

ProblemSpec parse_problem_text(const std::string& text) {
  Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error("problem: input is not valid JSON");
  return parse_problem(doc);
}

void apply_overrides(ProblemSpec& spec, std::optional<std::int64_t> p,
                     std::optional<std::uint64_t> cap,
                     std::optional<std::int64_t> s) {
  if (p) {
    if (*p != spec.pair.G.prime())
      throw Error("--p: group has prime " + std::to_string(spec.pair.G.prime()) +
                  ", not " + std::to_string(*p));
    spec.options.p = p;
    spec.doc["options"]["p"] = *p;
  }
  if (cap) {
    if (*cap < 1) throw Error("--cap: cap must be positive");
    spec.options.cap = cap;
    spec.doc["options"]["cap"] = *cap;
  }
  if (s) {
    if (*s < 2) throw Error("--s: cover degree must be at least 2");
    spec.options.s = s;
    spec.doc["options"]["s"] = *s;
  }
}

// Serializers ------------------------------------------------------------------

Json subgroup_to_json(const Subgroup& s) { return elements_to_json(s.elements()); }

Json map_to_json(const GroupMap& f) {
  Json a = Json::array();
  for (const auto& [x, y] : f.table())
    a.push_back(Json::array({element_to_json(x), element_to_json(y)}));
  return a;
}

Json core_to_json(const Core& core) {
  return Json{{"core", elements_to_json(core.H.elements())},
              {"r", core.fix_index},
              {"order", core_automorphism_order(core)}};
}

Json violation_to_json(const Violation& v) {
  return Json{{"i", v.i},
              {"j", v.j},
              {"a", element_to_json(v.a)},
              {"b", element_to_json(v.b)},
              {"core_order", v.core_order},
              {"map_order", v.map_order}};
}

Json stats_to_json(const SearchStats& s) {
  return Json{{"nodes", s.nodes},           {"candidates", s.candidates},
              {"memo_hits", s.memo_hits},   {"max_depth", s.max_depth},
              {"filtrations", s.filtrations}, {"twists", s.twists}};
}

Json filtration_to_json(const Filtration& f) {
  Json terms = Json::array();
  Json orders = Json::array();
  for (const Subgroup& t : f.terms) {
    terms.push_back(subgroup_to_json(t));
    orders.push_back(t.order());
  }
  return Json{{"orders", orders}, {"terms", terms}};
}

Json certificate_to_json(const ChiefCertificate& c) {
  Json layers = Json::array();
  for (const LayerWitness& w : c.layers)
    layers.push_back(Json{{"a_elements", elements_to_json(w.a_elements)},
                          {"residues", elements_to_json(w.residues)}});
  return Json{{"filtration", filtration_to_json(c.filtration)}, {"layers", layers}};
}

Json decision_to_json(const Decision& d) {
  Json out{{"method", d.method},
           {"verdict", verdict_name(d.verdict)},
           {"stats", stats_to_json(d.stats)}};
  if (!d.transcript.is_null()) out["transcript"] = d.transcript;
  if (d.chief) out["certificate"] = certificate_to_json(*d.chief);
  if (d.violation) out["violation"] = violation_to_json(*d.violation);
  if (d.passing) out["passing"] = filtration_to_json(*d.passing);
  return out;
}

Json word_to_json(const Word& w) {
  Json a = Json::array();
  for (const Letter& l : w) {
    if (l.t != 0)
      a.push_back(Json{{"t", l.t}});
    else
      a.push_back(Json{{"g", element_to_json(l.g)}});
  }
  return a;
}

// Rebuilders -------------------------------------------------------------------

Subgroup subgroup_from_json(const Group& g, const Json& j, const std::string& where) {
  std::vector<Element> elems = element_list(g, j, where);
  try {
    return Subgroup::from_elements(g, std::move(elems));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

GroupMap map_from_json(const Subgroup& dom, const Subgroup& cod, const Json& j,
                       const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of [x, image] pairs");
  std::vector<std::pair<Element, Element>> pairs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& pr = j[i];
    const std::string pw = where + "[" + std::to_string(i) + "]";
    if (!pr.is_array() || pr.size() != 2) fail(pw, "expected an [x, image] pair");
    pairs.emplace_back(element_from_json(dom.ambient(), pr[0], pw + "[0]"),
                       element_from_json(cod.ambient(), pr[1], pw + "[1]"));
  }
  try {
    return GroupMap::from_pairs(dom, cod, pairs, /*validate=*/true);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Filtration filtration_from_json(const Group& g, const Json& j,
                                const std::string& where) {
  check_keys(j, {"orders", "terms"}, where);
  const Json& terms = field(j, "terms", where);
  if (!terms.is_array() || terms.empty()) fail(where + ".terms", "expected a non-empty array");
  Filtration f;
  f.ambient = g;
  for (std::size_t i = 0; i < terms.size(); ++i)
    f.terms.push_back(
        subgroup_from_json(g, terms[i], where + ".terms[" + std::to_string(i) + "]"));
  if (j.contains("orders")) {
    const Json& orders = j["orders"];
    if (!orders.is_array() || orders.size() != f.terms.size())
      fail(where + ".orders", "expected one order per term");
    for (std::size_t i = 0; i < f.terms.size(); ++i)
      if (orders[i] != Json(f.terms[i].order()))
        fail(where + ".orders[" + std::to_string(i) + "]",
             "does not match the term's element count");
  }
  return f;
}

ChiefCertificate certificate_from_json(const HnnPair& pair, const Json& j) {
  const std::string where = "certificate";
  check_keys(j, {"filtration", "layers"}, where);
  ChiefCertificate cert;
  cert.filtration =
      filtration_from_json(pair.G, field(j, "filtration", where), where + ".filtration");
  const Json& layers = field(j, "layers", where);
  if (!layers.is_array()) fail(where + ".layers", "expected an array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string lw = where + ".layers[" + std::to_string(i) + "]";
    check_keys(layers[i], {"a_elements", "residues"}, lw);
    LayerWitness w;
    w.a_elements =
        element_list(pair.G, field(layers[i], "a_elements", lw), lw + ".a_elements");
    w.residues =
        element_list(pair.G, field(layers[i], "residues", lw), lw + ".residues");
    cert.layers.push_back(std::move(w));
  }
  return cert;
}

Word word_from_json(const HnnPair& pair, const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of letters");
  Word w;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& lj = j[i];
    const std::string lw = where + "[" + std::to_string(i) + "]";
    check_keys(lj, {"t", "g"}, lw);
    if (lj.contains("t") == lj.contains("g"))
      fail(lw, "expected exactly one of \"t\" or \"g\"");
    if (lj.contains("t")) {
      std::int64_t t = int_field(lj, "t", lw);
      if (t != 1 && t != -1) fail(lw + ".t", "stable letter sign must be 1 or -1");
      w.push_back(Letter::stable(static_cast<int>(t)));
    } else {
      w.push_back(Letter::group(element_from_json(pair.G, lj["g"], lw + ".g")));
    }
  }
  return w;
}

// Verification -----------------------------------------------------------------

namespace {

class Checker {
public:
  explicit Checker(VerifyReport& rep) : rep_(rep) {}
  void operator()(const std::string& desc, bool ok) {
    rep_.checks.push_back(desc);
    if (!ok) {
      rep_.ok = false;
      rep_.failures.push_back(desc);
    }
  }

private:
  VerifyReport& rep_;
};

GroupMap whole_map_from_json(const Group& dom, const Group& cod, const Json& j,
                             const std::string& where) {
  return map_from_json(Subgroup::whole(dom), Subgroup::whole(cod), j, where);
}

void verify_decision_block(const HnnPair& pair, const ProblemSpec& spec,
                           const Json& dec, Checker& check) {
  const std::string where = "decision";
  std::string verdict = string_field(dec, "verdict", where);
  std::string method = string_field(dec, "method", where);
  const auto p = static_cast<std::uint64_t>(pair.G.prime());

  if (dec.contains("certificate")) {
    ChiefCertificate cert = certificate_from_json(pair, dec["certificate"]);
    std::string why;
    bool ok = check_chief_certificate(pair, cert, &why);
    check("chief certificate re-checks independently" +
              (ok ? std::string() : " (" + why + ")"),
          ok);
    check("a chief certificate implies verdict residually_p",
          verdict == "residually_p");
    return;
  }

  if (dec.contains("violation")) {
    const Json& vj = dec["violation"];
    check_keys(vj, {"i", "j", "a", "b", "core_order", "map_order"}, where + ".violation");
    std::int64_t vi = int_field(vj, "i", where + ".violation");
    std::int64_t vjj = int_field(vj, "j", where + ".violation");
    check("a violation implies verdict not_residually_p",
          verdict == "not_residually_p");
    if (vi == 1 && vjj == -1) {
      Element a = element_from_json(pair.G, field(vj, "a", where + ".violation"),
                                    where + ".violation.a");
      Element b = element_from_json(pair.G, field(vj, "b", where + ".violation"),
                                    where + ".violation.b");
      if (!pair.A.contains(a)) fail(where + ".violation.a", "witness is not in A");
      if (!pair.B.contains(b)) fail(where + ".violation.b", "witness is not in B");
      Core core = compute_core(twisted_pair(pair, a, b));
      std::uint64_t ord = core_automorphism_order(core);
      check("violation core order matches a fresh twisted-core computation",
            Json(core.H.order()) == field(vj, "core_order", where + ".violation"));
      check("violation map order matches the recomputed automorphism order",
            Json(ord) == field(vj, "map_order", where + ".violation"));
      check("the twisted-core automorphism order is not a power of p",
            !is_power_of(ord, p));
      return;
    }
    // Layer violations live in subquotient coordinates; the full refutation
    // is re-established by re-running the exhaustive scan below.
  }

  if (dec.contains("passing")) {
    Filtration f = filtration_from_json(pair.G, dec["passing"], where + ".passing");
    check("passing filtration is a central series", is_central_series(f));
    check("passing filtration is compatible with the pair", is_compatible(pair, f));
    bool clean = true;
    for (std::size_t i = 0; i + 1 < f.terms.size() && clean; ++i)
      for (std::size_t j = i + 1; j < f.terms.size() && clean; ++j) {
        InducedPair layer = induced_layer_pair(pair, f, i, j);
        if (obstruction_toplevel(layer.pair)) clean = false;
      }
    check("every subquotient twist of the passing filtration has p-power core order",
          clean);
    check("a passing filtration implies verdict inconclusive",
          verdict == "inconclusive");
    return;
  }

  // No standalone witness object: re-run the recorded method and compare.
  DecideOptions opts;
  if (spec.options.cap) opts.cap = *spec.options.cap;
  std::string reproduced;
  if (method == "trivial_pair") {
    reproduced = (pair.A.is_trivial() && pair.B.is_trivial())
                     ? "residually_p"
                     : "(pair is not trivial)";
  } else if (method == "decide_abelian") {
    reproduced = verdict_name(decide_abelian(pair).verdict);
  } else if (method == "decide_chief") {
    reproduced = verdict_name(decide_chief(pair, opts).verdict);
  } else if (method == "obstruction_full") {
    reproduced = verdict_name(obstruction_full(pair).verdict);
  } else if (method == "obstruction_toplevel") {
    reproduced = obstruction_toplevel(pair) ? "not_residually_p" : "inconclusive";
  } else {
    fail(where + ".method", "unknown method \"" + method + "\"");
  }
  check("re-running " + method + " reproduces verdict " + verdict,
        reproduced == verdict);
}

void verify_elementary_witness(const HnnPair& pair, const Json& w, Checker& check) {
  const std::string where = "witness";
  check_keys(w, {"route", "X", "gamma", "gamma_order", "iota", "P", "Q", "S",
                 "wrap", "sizes"},
             where);
  const auto p = static_cast<std::uint64_t>(pair.G.prime());
  Group x = group_from_json(field(w, "X", where));
  check("X is an elementary abelian p-group", exponent_p_abelian(x));

  GroupMap gamma = whole_map_from_json(x, x, field(w, "gamma", where), where + ".gamma");
  check("gamma is a bijection of X", gamma.is_injective());
  std::uint64_t gord = automorphism_order(gamma);
  check("recorded gamma order matches",
        Json(gord) == field(w, "gamma_order", where));
  check("gamma has p-power order", is_power_of(gord, p));

  GroupMap iota = whole_map_from_json(pair.G, x, field(w, "iota", where), where + ".iota");
  EmbeddingCheck emb = embedding_into_automorphism(iota, pair, gamma);
  check("iota embeds the pair into (X, gamma)" +
            (emb.ok ? std::string() : " (" + emb.failure + ")"),
        emb.ok);

  Subgroup n = intersect(pair.A, pair.B);
  Subgroup ps = subgroup_from_json(pair.G, field(w, "P", where), where + ".P");
  Subgroup qs = subgroup_from_json(pair.G, field(w, "Q", where), where + ".Q");
  Subgroup ss = subgroup_from_json(pair.G, field(w, "S", where), where + ".S");
  check("A = (A ∩ B) ⊕ P",
        subgroup_product(n, ps).same_set(pair.A) && intersect(n, ps).is_trivial() &&
            n.order() * ps.order() == pair.A.order());
  check("B = (A ∩ B) ⊕ Q",
        subgroup_product(n, qs).same_set(pair.B) && intersect(n, qs).is_trivial() &&
            n.order() * qs.order() == pair.B.order());
  Subgroup aq = subgroup_product(pair.A, qs);
  check("G = A ⊕ Q ⊕ S",
        subgroup_product(aq, ss).order() == pair.G.order() &&
            pair.A.order() * qs.order() * ss.order() == pair.G.order());
  std::uint64_t expected =
      pair.A.order() *
      checked_pow_u64(qs.order(), p - 1, where + ".sizes") * ss.order();
  check("|X| = |A| · |Q|^(p-1) · |S|", x.order() == expected);

  const Json& wrap = field(w, "wrap", where);
  check_keys(wrap, {"k", "y"}, where + ".wrap");
  std::int64_t k = int_field(wrap, "k", where + ".wrap");
  if (k < 0) fail(where + ".wrap.k", "negative exponent");
  Group y_group = make_cyclic_extension(static_cast<std::int64_t>(p),
                                        static_cast<int>(k), x, gamma.table());
  Element y = element_from_json(y_group, field(wrap, "y", where + ".wrap"),
                                where + ".wrap.y");
  std::vector<std::pair<Element, Element>> include_pairs;
  for (const Element& xe : x.elements()) {
    Element ye(y_group.width(), 0);
    std::copy(xe.begin(), xe.end(), ye.begin() + 1);
    include_pairs.emplace_back(xe, ye);
  }
  GroupMap include = GroupMap::from_pairs(Subgroup::whole(x), Subgroup::whole(y_group),
                                          include_pairs, /*validate=*/true);
  EmbeddingCheck wemb =
      embedding_into_conjugation(include.compose(iota), pair, y_group, y);
  check("the wrapped embedding realizes phi as conjugation by y" +
            (wemb.ok ? std::string() : " (" + wemb.failure + ")"),
        wemb.ok);
}

// Shared by the pipeline and cover+pipeline routes: rebuilds the hull pair,
// checks the embedding of `base` into it and re-checks the chief
// certificate.  Returns through `check` only.
void verify_pipeline_block(const HnnPair& base, const Json& w, Checker& check) {
  const std::string where = "witness";
  Group hull = group_from_json(field(w, "hull", where));
  Subgroup ha = subgroup_from_json(hull, field(w, "hull_A", where), where + ".hull_A");
  Subgroup hb = subgroup_from_json(hull, field(w, "hull_B", where), where + ".hull_B");
  GroupMap hphi = map_from_json(ha, hb, field(w, "hull_phi", where), where + ".hull_phi");
  HnnPair hull_pair;
  try {
    hull_pair = make_pair(hull, ha, hb, hphi);
  } catch (const Error& e) {
    fail(where + ".hull_phi", e.what());
  }

  GroupMap iota =
      whole_map_from_json(base.G, hull, field(w, "iota", where), where + ".iota");
  check("iota is injective", iota.is_injective());
  check("iota maps A onto hull_A", map_image(iota, base.A).same_set(ha));
  check("iota maps B onto hull_B", map_image(iota, base.B).same_set(hb));
  bool commutes = true;
  for (const Element& a : base.A.elements())
    if (iota.apply(base.phi.apply(a)) != hphi.apply(iota.apply(a))) commutes = false;
  check("iota carries phi to the hull pair's map", commutes);

  ChiefCertificate cert = certificate_from_json(hull_pair, field(w, "certificate", where));
  std::string why;
  bool ok = check_chief_certificate(hull_pair, cert, &why);
  check("hull chief certificate re-checks independently" +
            (ok ? std::string() : " (" + why + ")"),
        ok);
}

// Rebuilds the cover pair and re-checks its defining properties; returns the
// cover pair so the pipeline block can be verified on top of it.
HnnPair verify_cover_block(const HnnPair& base, const Json& c, Checker& check) {
  const std::string where = "witness.cover";
  check_keys(c, {"s", "Gp", "A_prime", "B_prime", "phi_prime", "psi", "order",
                 "expected_order", "core_order", "phi_prime_order"},
             where);
  std::int64_t s = int_field(c, "s", where);
  if (s < 2) fail(where + ".s", "cover degree must be at least 2");
  Group gp = group_from_json(field(c, "Gp", where));
  Subgroup ap = subgroup_from_json(gp, field(c, "A_prime", where), where + ".A_prime");
  Subgroup bp = subgroup_from_json(gp, field(c, "B_prime", where), where + ".B_prime");
  GroupMap phip =
      map_from_json(ap, bp, field(c, "phi_prime", where), where + ".phi_prime");
  HnnPair cover;
  try {
    cover = make_pair(gp, ap, bp, phip);
  } catch (const Error& e) {
    fail(where + ".phi_prime", e.what());
  }

  check("recorded cover order matches", Json(gp.order()) == field(c, "order", where));
  std::uint64_t lhs = gp.order();
  for (std::int64_t i = 0; i + 1 < s; ++i) {
    if (lhs > std::numeric_limits<std::uint64_t>::max() / base.A.order())
      fail(where + ".order", "order product overflows");
    lhs *= base.A.order();
  }
  std::uint64_t rhs = checked_pow_u64(base.G.order(), static_cast<std::uint64_t>(s),
                                      where + ".order");
  check("|G'| · |A|^(s-1) = |G|^s", lhs == rhs);
  check("recorded expected_order matches",
        Json(gp.order()) == field(c, "expected_order", where));

  Core cover_core = compute_core(cover);
  check("the cover core is all of A' ∩ B'",
        cover_core.H.same_set(intersect(ap, bp)));
  check("recorded cover core order matches",
        Json(cover_core.H.order()) == field(c, "core_order", where));
  std::uint64_t phip_ord = core_automorphism_order(cover_core);
  check("recorded cover map order matches",
        Json(phip_ord) == field(c, "phi_prime_order", where));

  GroupMap psi = whole_map_from_json(base.G, gp, field(c, "psi", where), where + ".psi");
  check("psi is injective", psi.is_injective());
  Core base_core = compute_core(base);
  check("psi carries the base core onto the cover core",
        map_image(psi, base_core.H).same_set(cover_core.H));
  bool conj = true;
  for (const Element& h : base_core.H.elements()) {
    Element img = h;
    for (std::int64_t i = 0; i < s; ++i) img = base.phi.apply(img);
    if (psi.apply(img) != phip.apply(psi.apply(h))) conj = false;
  }
  check("psi conjugates phi^s to phi' on the core", conj);
  return cover;
}

void verify_witness_block(const HnnPair& pair, const Json& w, Checker& check) {
  const std::string where = "witness";
  std::string route = string_field(w, "route", where);
  if (route == "elementary") {
    verify_elementary_witness(pair, w, check);
  } else if (route == "pipeline") {
    check_keys(w, {"route", "hull", "k", "iota", "hull_A", "hull_B", "hull_phi",
                   "power_orders", "witness_X", "witness_gamma_order", "certificate"},
               where);
    verify_pipeline_block(pair, w, check);
  } else if (route == "cover+pipeline") {
    check_keys(w, {"route", "cover", "hull", "k", "iota", "hull_A", "hull_B",
                   "hull_phi", "power_orders", "witness_X", "witness_gamma_order",
                   "certificate"},
               where);
    HnnPair cover = verify_cover_block(pair, field(w, "cover", where), check);
    verify_pipeline_block(cover, w, check);
  } else if (route == "cover") {
    check_keys(w, {"route", "cover", "note"}, where);
    verify_cover_block(pair, field(w, "cover", where), check);
  } else {
    fail(where + ".route", "unknown route \"" + route + "\"");
  }
}

}  // namespace

VerifyReport verify_certificate(const Json& doc) {
  if (!doc.is_object()) throw Error("verify: expected an object document");
  VerifyReport rep;
  Checker check(rep);
  ProblemSpec spec = parse_problem(field(doc, "problem", "verify"));
  const HnnPair& pair = spec.pair;

  bool any = false;
  if (doc.contains("core")) {
    any = true;
    Core core = compute_core(pair);
    check("core elements match a fresh computation",
          elements_to_json(core.H.elements()) == doc["core"]);
    check("r matches the fixpoint index",
          doc.contains("r") && doc["r"] == Json(core.fix_index));
    check("order matches the core automorphism order",
          doc.contains("order") && doc["order"] == Json(core_automorphism_order(core)));
  }
  if (doc.contains("decision")) {
    any = true;
    verify_decision_block(pair, spec, field(doc, "decision", "verify"), check);
  }
  if (doc.contains("witness")) {
    any = true;
    verify_witness_block(pair, field(doc, "witness", "verify"), check);
  }
  if (doc.contains("reduced")) {
    any = true;
    if (!spec.doc.contains("word"))
      throw Error("verify: document has \"reduced\" but the problem has no word");
    Word input = word_from_json(pair, spec.doc["word"], "problem.word");
    Word red = britton_reduce(pair, input);
    check("reduced word matches a fresh reduction",
          word_to_json(red) == doc["reduced"]);
    check("the reduction is Britton-reduced", is_britton_reduced(pair, red));
  }
  if (!any)
    throw Error(
        "verify: document contains no verifiable block (core, decision, witness "
        "or reduced)");
  return rep;
}

// Commands ---------------------------------------------------------------------

namespace {

Json output_skeleton(const char* command, const ProblemSpec& spec) {
  return Json{{"schema", kSchemaVersion}, {"command", command}, {"problem", spec.doc}};
}

std::string core_text(const Core& core, std::uint64_t ord) {
  std::ostringstream os;
  os << "core: " << core.H.order() << " element(s), r = " << core.fix_index
     << ", automorphism order " << ord << "\n";
  return os.str();
}

// Problem document for a programmatically built pair (used by enumerate's
// examples); phi is emitted as its full table, which parses back.
Json problem_doc_from_pair(const HnnPair& pair) {
  Json doc{{"schema", kSchemaVersion}, {"group", pair.G.describe()}};
  const std::vector<Element>& ag = pair.A.gens();
  const std::vector<Element>& bg = pair.B.gens();
  doc["A"] = elements_to_json(ag.empty() ? pair.A.elements() : ag);
  doc["B"] = elements_to_json(bg.empty() ? pair.B.elements() : bg);
  doc["phi"] = map_to_json(pair.phi);
  return doc;
}

Json witness_elementary_json(const HnnPair& pair, const ElementaryWitness& w,
                             const Wrap& wrap) {
  int k = 0;
  for (std::uint64_t v = 1; v < w.gamma_order;
       v *= static_cast<std::uint64_t>(pair.G.prime()))
    ++k;
  return Json{{"route", "elementary"},
              {"X", w.X.describe()},
              {"gamma", map_to_json(w.gamma)},
              {"gamma_order", w.gamma_order},
              {"iota", map_to_json(w.iota)},
              {"P", subgroup_to_json(w.P)},
              {"Q", subgroup_to_json(w.Q)},
              {"S", subgroup_to_json(w.S)},
              {"wrap", Json{{"k", k}, {"y", element_to_json(wrap.y)}}},
              {"sizes", Json{{"A", pair.A.order()},
                             {"Q", w.Q.order()},
                             {"S", w.S.order()},
                             {"X", w.X.order()}}}};
}

Json witness_pipeline_json(const PipelineResult& pr) {
  Json orders = Json::array();
  for (const Subgroup& t : pr.filtration.f.terms) orders.push_back(t.order());
  return Json{{"hull", pr.embedding.hull.describe()},
              {"k", pr.embedding.k},
              {"iota", map_to_json(pr.embedding.iota)},
              {"hull_A", subgroup_to_json(pr.embedding.pair.A)},
              {"hull_B", subgroup_to_json(pr.embedding.pair.B)},
              {"hull_phi", map_to_json(pr.embedding.pair.phi)},
              {"power_orders", orders},
              {"witness_X", pr.top_witness.X.describe()},
              {"witness_gamma_order", pr.top_witness.gamma_order},
              {"certificate", certificate_to_json(pr.certificate)}};
}

}  // namespace

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

CmdResult cmd_core(const ProblemSpec& spec) {
  Core core = compute_core(spec.pair);
  std::uint64_t ord = core_automorphism_order(core);
  CmdResult res;
  res.output = output_skeleton("core", spec);
  res.output["core"] = elements_to_json(core.H.elements());
  res.output["r"] = core.fix_index;
  res.output["order"] = ord;
  res.text = core_text(core, ord);
  return res;
}

CmdResult cmd_decide(const ProblemSpec& spec) {
  DecideOptions opts;
  if (spec.options.cap) opts.cap = *spec.options.cap;
  Decision d = decide_auto(spec.pair, opts);
  CmdResult res;
  res.exit_code = d.verdict == Verdict::Inconclusive ? 1 : 0;
  res.output = output_skeleton("decide", spec);
  res.output["decision"] = decision_to_json(d);
  std::ostringstream os;
  os << "verdict: " << verdict_name(d.verdict) << " (" << d.method << ")\n";
  if (d.chief)
    os << "chief filtration of length " << d.chief->filtration.terms.size() << "\n";
  if (d.violation)
    os << "violation at (i, j) = (" << d.violation->i << ", " << d.violation->j
       << "): twisted core order " << d.violation->core_order << ", map order "
       << d.violation->map_order << "\n";
  res.text = os.str();
  return res;
}

CmdResult cmd_obstruct(const ProblemSpec& spec) {
  Decision d;
  if (spec.pair.G.order() <= kFiltrationCap) {
    d = obstruction_full(spec.pair);
  } else {
    SearchStats stats;
    std::optional<Violation> v = obstruction_toplevel(spec.pair, &stats);
    d.method = "obstruction_toplevel";
    d.verdict = v ? Verdict::NotResiduallyP : Verdict::Inconclusive;
    d.violation = v;
    d.stats = stats;
    d.transcript = Json{{"twists", stats.twists}, {"exhausted", !v.has_value()}};
  }
  CmdResult res;
  res.exit_code = d.verdict == Verdict::NotResiduallyP ? 0 : 1;
  res.output = output_skeleton("obstruct", spec);
  res.output["decision"] = decision_to_json(d);
  std::ostringstream os;
  os << "verdict: " << verdict_name(d.verdict) << " (" << d.method << ")\n";
  res.text = os.str();
  return res;
}

CmdResult cmd_witness(const ProblemSpec& spec) {
  const HnnPair& pair = spec.pair;
  if (!is_abelian(pair.G))
    throw Error("witness construction requires an abelian base group");
  Decision dec = decide_abelian(pair);
  if (dec.verdict != Verdict::ResiduallyP)
    throw Error("no witness exists: the core automorphism has order " +
                dec.transcript["phi_order"].dump() + ", not a power of p");

  Core core = compute_core(pair);
  Subgroup n = intersect(pair.A, pair.B);
  bool invariant = core.H.same_set(n);

  CmdResult res;
  res.output = output_skeleton("witness", spec);
  std::ostringstream os;

  if (invariant && exponent_p_abelian(pair.G)) {
    ElementaryWitness w = build_witness_elementary(pair);
    Wrap wrap = semidirect_wrap(w.X, w.gamma);
    res.output["witness"] = witness_elementary_json(pair, w, wrap);
    os << "route: elementary; |X| = " << w.X.order() << ", gamma order "
       << w.gamma_order << ", |Y| = " << wrap.Y.order() << "\n";
  } else if (invariant) {
    PipelineResult pr = abelian_pipeline(pair);
    Json w = witness_pipeline_json(pr);
    w["route"] = "pipeline";
    res.output["witness"] = std::move(w);
    os << "route: pipeline; hull exponent p^" << pr.embedding.k
       << ", chief filtration of length " << pr.certificate.filtration.terms.size()
       << "\n";
  } else {
    std::int64_t s = spec.options.s.value_or(default_cover_exponent(pair));
    CyclicCover cov = cyclic_cover(pair, s);
    AbprimeReport rep = check_abprime(pair, cov);
    if (!rep.ok)
      throw InternalCheckError("cover self-checks failed: " + join(rep.failures, "; "));
    Json cover_json{{"s", cov.s},
                    {"Gp", cov.Gp.describe()},
                    {"A_prime", subgroup_to_json(cov.cover.A)},
                    {"B_prime", subgroup_to_json(cov.cover.B)},
                    {"phi_prime", map_to_json(cov.cover.phi)},
                    {"psi", map_to_json(cov.Psi)},
                    {"order", cov.Gp.order()},
                    {"expected_order", cov.expected_order},
                    {"core_order", rep.core_order},
                    {"phi_prime_order", rep.phi_prime_order}};
    // The cover degree is forced above the orbit bound, so the cover can be
    // exponentially larger than G; continue into the chief pipeline only
    // when the cover is small enough for the chief machinery.
    std::optional<std::string> skipped;
    if (cov.Gp.order() > kDecideCap)
      skipped = "the degree-" + std::to_string(cov.s) + " cover has order " +
                std::to_string(cov.Gp.order()) + ", above the chief search cap " +
                std::to_string(kDecideCap);
    if (!skipped) {
      try {
        PipelineResult pr = abelian_pipeline(cov.cover);
        Json w = witness_pipeline_json(pr);
        w["route"] = "cover+pipeline";
        w["cover"] = std::move(cover_json);
        res.output["witness"] = std::move(w);
        os << "route: cover+pipeline; degree " << cov.s << " cover of order "
           << cov.Gp.order() << ", chief filtration of length "
           << pr.certificate.filtration.terms.size() << "\n";
      } catch (const Error& e) {
        skipped = std::string("the chief pipeline on the cover exceeds the "
                              "enumeration caps (") +
                  e.what() + ")";
      }
    }
    if (skipped) {
      Json w{{"route", "cover"},
             {"cover", std::move(cover_json)},
             {"note", *skipped}};
      res.output["witness"] = std::move(w);
      os << "route: cover; degree " << cov.s << " cover of order " << cov.Gp.order()
         << " (" << *skipped << ")\n";
    }
  }
  res.text = os.str();
  return res;
}

CmdResult cmd_reduce(const ProblemSpec& spec) {
  if (!spec.doc.contains("word"))
    throw Error("problem.word: required by the reduce command");
  Word input = word_from_json(spec.pair, spec.doc["word"], "problem.word");
  Word red = britton_reduce(spec.pair, input);
  CmdResult res;
  res.output = output_skeleton("reduce", spec);
  res.output["reduced"] = word_to_json(red);
  res.output["formatted"] = format_word(red);
  res.output["is_group_letter"] = reduces_to_group_letter(spec.pair, input);
  res.text = "reduced: " + format_word(red) + "\n";
  return res;
}

CmdResult cmd_verify_paper(bool heavy) {
  CmdResult res;
  res.output = Json{{"schema", kSchemaVersion}, {"command", "verify-paper"}};
  Json fixtures = Json::array();
  std::ostringstream os;
  int total = 0, passed = 0;
  for (const Fixture& f : reference_fixtures(heavy)) {
    Json facts = Json::array();
    for (const FactResult& r : run_fixture(f)) {
      ++total;
      if (r.ok) ++passed;
      Json fact{{"id", r.id}, {"claim", r.claim}, {"ok", r.ok}};
      if (!r.error.empty()) fact["error"] = r.error;
      facts.push_back(std::move(fact));
      os << (r.ok ? "[PASS] " : "[FAIL] ") << f.name << "/" << r.id << " — "
         << r.claim << (r.error.empty() ? "" : " (" + r.error + ")") << "\n";
    }
    fixtures.push_back(Json{{"name", f.name}, {"summary", f.summary},
                            {"facts", std::move(facts)}});
  }
  res.output["fixtures"] = std::move(fixtures);
  res.output["total"] = total;
  res.output["passed"] = passed;
  res.output["ok"] = (total == passed);
  os << passed << "/" << total << " facts pass\n";
  res.text = os.str();
  res.exit_code = (total == passed) ? 0 : 3;
  return res;
}

CmdResult cmd_verify_cert(const Json& doc) {
  VerifyReport rep = verify_certificate(doc);
  CmdResult res;
  res.output = Json{{"schema", kSchemaVersion},
                    {"command", "verify-cert"},
                    {"ok", rep.ok},
                    {"checks", rep.checks},
                    {"failures", rep.failures}};
  std::ostringstream os;
  for (const std::string& c : rep.checks) {
    bool failed = std::find(rep.failures.begin(), rep.failures.end(), c) !=
                  rep.failures.end();
    os << (failed ? "[FAIL] " : "[PASS] ") << c << "\n";
  }
  os << (rep.ok ? "certificate verifies" : "certificate REJECTED") << "\n";
  res.text = os.str();
  res.exit_code = rep.ok ? 0 : 3;
  return res;
}

CmdResult cmd_enumerate(std::int64_t p, std::uint64_t seed, int count,
                        std::uint64_t max_order) {
  if (p < 2) throw Error("--p: prime must be at least 2");
  if (count < 1) throw Error("--count: need at least one sample");
  std::mt19937_64 rng(seed);
  Json verdicts{{"residually_p", 0}, {"not_residually_p", 0}, {"inconclusive", 0}};
  Json methods = Json::object();
  Json examples = Json::object();
  for (int i = 0; i < count; ++i) {
    Group g = sample_group(rng, p, max_order);
    HnnPair pair = sample_pair(rng, g);
    Decision d = decide_auto(pair);
    std::string v = verdict_name(d.verdict);
    verdicts[v] = verdicts[v].get<int>() + 1;
    methods[d.method] = methods.contains(d.method) ? methods[d.method].get<int>() + 1 : 1;
    if (!examples.contains(v))
      examples[v] = Json{{"method", d.method}, {"problem", problem_doc_from_pair(pair)}};
  }
  CmdResult res;
  res.output = Json{{"schema", kSchemaVersion}, {"command", "enumerate"},
                    {"p", p},           {"seed", seed},
                    {"count", count},   {"max_order", max_order},
                    {"verdicts", verdicts}, {"methods", methods},
                    {"examples", examples}};
  std::ostringstream os;
  os << count << " pairs over p = " << p << ", max order " << max_order << ": "
     << verdicts["residually_p"].get<int>() << " yes, "
     << verdicts["not_residually_p"].get<int>() << " no, "
     << verdicts["inconclusive"].get<int>() << " inconclusive\n";
  res.text = os.str();
  return res;
}

}  // namespace resp
