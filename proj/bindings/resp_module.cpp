// Python bindings: document-level access to the decision procedures.  A
// Problem wraps a validated pair plus its normalized document; every method
// returns the same self-contained JSON documents (as dicts) that the CLI
// emits, so results can be re-verified independently with
// verify_certificate.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>

#include "resp/problem_io.hpp"

namespace py = pybind11;
using namespace resp;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const Json& e : j) out.append(json_to_py(e));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& item : j.items()) out[py::str(item.key())] = json_to_py(item.value());
      return out;
    }
  }
}

Json py_to_json(const py::handle& h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    Json out = Json::object();
    for (const auto& item : h.cast<py::dict>())
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    return out;
  }
  if (py::isinstance<py::sequence>(h)) {
    Json out = Json::array();
    for (const auto& e : h.cast<py::sequence>()) out.push_back(py_to_json(e));
    return out;
  }
  throw Error("cannot convert this Python value to JSON");
}

// A validated problem document plus its pair.
struct Problem {
  ProblemSpec spec;

  static Problem from_object(const py::object& doc) {
    if (py::isinstance<py::str>(doc))
      return Problem{parse_problem_text(doc.cast<std::string>())};
    return Problem{parse_problem(py_to_json(doc))};
  }

  py::object document() const { return json_to_py(spec.doc); }

  py::object core() const { return json_to_py(cmd_core(spec).output); }

  py::object decide(const std::optional<std::uint64_t>& cap) const {
    ProblemSpec s = spec;
    apply_overrides(s, std::nullopt, cap, std::nullopt);
    return json_to_py(cmd_decide(s).output);
  }

  py::object obstruct() const { return json_to_py(cmd_obstruct(spec).output); }

  py::object witness(const std::optional<std::int64_t>& s) const {
    ProblemSpec sp = spec;
    apply_overrides(sp, std::nullopt, std::nullopt, s);
    return json_to_py(cmd_witness(sp).output);
  }

  py::object reduce(const py::object& word) const {
    if (word.is_none()) return json_to_py(cmd_reduce(spec).output);
    Json doc = spec.doc;
    doc["word"] = py_to_json(word);
    return json_to_py(cmd_reduce(parse_problem(doc)).output);
  }

  Problem twisted(const py::object& a, const py::object& b) const {
    Json doc = spec.doc;
    doc["twist"] = Json{{"a", py_to_json(a)}, {"b", py_to_json(b)}};
    return Problem{parse_problem(doc)};
  }

  py::tuple phi(const py::object& a) const {
    Element x = element_from_json(spec.pair.G, py_to_json(a), "a");
    if (!spec.pair.A.contains(x)) throw Error("a: not an element of A");
    Element img = spec.pair.phi.apply(x);
    py::tuple out(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = py::int_(img[i]);
    return out;
  }

  std::string repr() const {
    std::string name = spec.fixture ? (" fixture=" + *spec.fixture) : "";
    return "<resp_hnn.Problem |G|=" + std::to_string(spec.pair.G.order()) +
           " |A|=" + std::to_string(spec.pair.A.order()) +
           " |B|=" + std::to_string(spec.pair.B.order()) + name + ">";
  }
};

}  // namespace

PYBIND11_MODULE(resp_hnn, m) {
  m.doc() =
      "Decides and certifies whether the HNN extension of a finite p-group "
      "pair (G, phi: A -> B) is residually p.  Problems are schema-1 JSON "
      "documents; every result is a self-contained document that "
      "verify_certificate re-checks from scratch.";

  py::register_exception<Error>(m, "InputError");
  py::register_exception<InternalCheckError>(m, "InternalCheckError");

  py::class_<Problem>(m, "Problem")
      .def_property_readonly(
          "prime", [](const Problem& p) { return p.spec.pair.G.prime(); },
          "The prime p of the ambient group.")
      .def_property_readonly(
          "group_order", [](const Problem& p) { return p.spec.pair.G.order(); })
      .def_property_readonly(
          "a_order", [](const Problem& p) { return p.spec.pair.A.order(); })
      .def_property_readonly(
          "b_order", [](const Problem& p) { return p.spec.pair.B.order(); })
      .def_property_readonly(
          "fixture",
          [](const Problem& p) -> py::object {
            return p.spec.fixture ? py::object(py::str(*p.spec.fixture))
                                  : py::object(py::none());
          },
          "Fixture name when the group kind is \"fixture\", else None.")
      .def("document", &Problem::document,
           "The normalized problem document echoed into every output.")
      .def("core", &Problem::core,
           "Core document: the largest subgroup H with phi(H) = H, its "
           "fixpoint index r and the order of phi on it.")
      .def("decide", &Problem::decide, py::arg("cap") = py::none(),
           "Decision document: residually_p / not_residually_p / "
           "inconclusive, with a chief certificate or violation when one "
           "exists.")
      .def("obstruct", &Problem::obstruct,
           "Obstruction document: scans twisted cores over central "
           "filtrations (small groups) or the top level only.")
      .def("witness", &Problem::witness, py::arg("s") = py::none(),
           "Constructive witness document for abelian bases (elementary "
           "witness, chief pipeline, or degree-s cyclic cover).")
      .def("reduce", &Problem::reduce, py::arg("word") = py::none(),
           "Britton reduction of the given word (list of {\"t\": +-1} / "
           "{\"g\": [...]} letters) or of the document's own word.")
      .def("twisted", &Problem::twisted, py::arg("a"), py::arg("b"),
           "The problem with phi replaced by c_b o phi o c_a (a in A, b in "
           "B); replaces any twist already in the document.")
      .def("phi", &Problem::phi, py::arg("a"),
           "Applies phi to an element of A; returns the image tuple.")
      .def("__repr__", &Problem::repr);

  m.def(
      "problem",
      [](const py::object& doc) { return Problem::from_object(doc); },
      py::arg("doc"),
      "Parses and validates a schema-1 problem document (dict or JSON "
      "string).");

  m.def(
      "fixture",
      [](const std::string& name) {
        Json doc{{"schema", kSchemaVersion},
                 {"group", Json{{"kind", "fixture"}, {"name", name}}}};
        return Problem{parse_problem(doc)};
      },
      py::arg("name"),
      "Loads a bundled reference pair by name (e.g. \"cyclic_shift\", "
      "\"wreath\", \"abelian_rank3\" variants).");

  m.def(
      "verify_certificate",
      [](const py::object& doc) {
        VerifyReport rep = verify_certificate(py_to_json(doc));
        py::dict out;
        out["ok"] = rep.ok;
        out["checks"] = json_to_py(Json(rep.checks));
        out["failures"] = json_to_py(Json(rep.failures));
        return out;
      },
      py::arg("doc"),
      "Re-verifies an emitted document from scratch: re-parses the problem "
      "and re-checks every certificate condition independently.");

  m.def(
      "verify_fixtures",
      [](bool heavy) { return json_to_py(cmd_verify_paper(heavy).output); },
      py::arg("heavy") = false,
      "Re-checks every recorded fact of the bundled reference pairs; heavy "
      "includes the order-3^11 wreath pair.");

  m.def(
      "enumerate_pairs",
      [](std::int64_t p, std::uint64_t seed, int count, std::uint64_t max_order) {
        return json_to_py(cmd_enumerate(p, seed, count, max_order).output);
      },
      py::arg("p") = 3, py::arg("seed") = 0, py::arg("count") = 100,
      py::arg("max_order") = 81,
      "Random survey: samples pairs, decides each, tallies verdicts and "
      "methods, and keeps one example document per verdict.");

  m.def(
      "to_canonical_json",
      [](const py::object& doc) { return dump_json(py_to_json(doc)); },
      py::arg("doc"),
      "Canonical byte form used by the CLI: two-space indent, sorted keys, "
      "trailing newline.");

  m.attr("__version__") = "1.0.0";
}
