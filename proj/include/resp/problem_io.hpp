#pragma once

// JSON interchange for the command-line front end: schema-1 problem parsing
// with located diagnostics, serialization of cores / decisions / chief
// certificates / witness constructions, independent re-verification of
// emitted documents, and the command implementations shared by the CLI
// binary and the tests.
//
// Wire conventions: every document carries a top-level "schema": 1; group
// elements are arrays of integer coordinates (the canonical tuples); maps
// are [element, image] pair lists; objects serialize with sorted keys, so
// output bytes are deterministic for a fixed input and version.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resp/abelian.hpp"
#include "resp/decide.hpp"
#include "resp/fixtures.hpp"
#include "resp/hnn.hpp"
#include "resp/words.hpp"

namespace resp {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ProblemOptions {
  std::optional<std::int64_t> p;    // expected prime, validated against the group
  std::optional<std::uint64_t> cap; // decision-search cap override
  std::optional<std::int64_t> s;    // cover degree override
};

// A parsed problem: the ambient pair plus the normalized document it came
// from.  The document is echoed into every output so that emitted
// certificates are self-contained for re-verification.
struct ProblemSpec {
  Json doc;
  HnnPair pair;
  ProblemOptions options;
  std::optional<std::string> fixture;  // set when the group kind is "fixture"
};

// Group construction from a descriptor {"kind": ..., ...}.  Supported kinds:
// "abelian" (p + exponents or moduli), "matrix_semidirect" (p, m, action,
// relations), "group_ring_semidirect" (p, rank).  The descriptors emitted by
// Group::describe() for these kinds parse back to an equivalent group.
Group group_from_json(const Json& g);

Json element_to_json(const Element& e);
Element element_from_json(const Group& g, const Json& j, const std::string& where);
Json elements_to_json(const std::vector<Element>& es);

// Parses and validates a schema-1 problem document.  Error messages name
// the offending field.  Fields: "group" (descriptor, or {"kind": "fixture",
// "name": ...}), "A" / "B" (generator lists), "phi" ([generator, image]
// pairs extending to an isomorphism A -> B; all three are forbidden for
// fixture problems), optional "twist" ({"a": ..., "b": ...} replacing phi
// by c_b ∘ phi ∘ c_a), optional "options" ({"p", "cap", "s"}), optional
// "word" (consumed by the reduce command).
ProblemSpec parse_problem(const Json& doc);
ProblemSpec parse_problem_text(const std::string& text);

// Folds command-line overrides into both the parsed options and the echoed
// document, keeping the round trip faithful.
void apply_overrides(ProblemSpec& spec, std::optional<std::int64_t> p,
                     std::optional<std::uint64_t> cap, std::optional<std::int64_t> s);

// Serializers ----------------------------------------------------------------

Json subgroup_to_json(const Subgroup& s);       // sorted element list
Json map_to_json(const GroupMap& f);            // [element, image] pairs
Json core_to_json(const Core& core);            // {"core", "r", "order"}
Json violation_to_json(const Violation& v);
Json stats_to_json(const SearchStats& s);
Json filtration_to_json(const Filtration& f);   // {"orders", "terms"}
Json certificate_to_json(const ChiefCertificate& c);
Json decision_to_json(const Decision& d);
Json word_to_json(const Word& w);

// Rebuilders used by the independent verifier --------------------------------

Subgroup subgroup_from_json(const Group& g, const Json& j, const std::string& where);
GroupMap map_from_json(const Subgroup& dom, const Subgroup& cod, const Json& j,
                       const std::string& where);
Filtration filtration_from_json(const Group& g, const Json& j, const std::string& where);
ChiefCertificate certificate_from_json(const HnnPair& pair, const Json& j);
Word word_from_json(const HnnPair& pair, const Json& j, const std::string& where);

// Independent re-verification of an emitted document: the problem block is
// re-parsed and every certificate condition is re-checked from scratch
// (chief certificates through check_chief_certificate, violations by
// recomputing the twisted core, passing filtrations by re-running the
// twisted-core scan, witness blocks by rebuilding X / gamma / iota and the
// wrap and re-running the embedding checks, cover blocks by re-checking the
// defining core property and the order identity).
struct VerifyReport {
  bool ok = true;
  std::vector<std::string> checks;    // descriptions of checks that ran
  std::vector<std::string> failures;  // empty iff ok
};
VerifyReport verify_certificate(const Json& doc);

// Command implementations -----------------------------------------------------
//
// Exit codes: 0 = decided/constructed, 1 = inconclusive, 2 = invalid input,
// 3 = internal oracle disagreement.  The wrappers here return 0/1 and throw
// Error (2) or InternalCheckError (3); the CLI maps exceptions to codes.

struct CmdResult {
  int exit_code = 0;
  Json output;       // always carries "schema": 1
  std::string text;  // human-readable report
};

CmdResult cmd_core(const ProblemSpec& spec);
CmdResult cmd_decide(const ProblemSpec& spec);
CmdResult cmd_obstruct(const ProblemSpec& spec);
CmdResult cmd_witness(const ProblemSpec& spec);
CmdResult cmd_reduce(const ProblemSpec& spec);
CmdResult cmd_verify_paper(bool heavy = true);
CmdResult cmd_verify_cert(const Json& doc);
CmdResult cmd_enumerate(std::int64_t p, std::uint64_t seed, int count,
                        std::uint64_t max_order);

// Canonical byte form used by the CLI: two-space indentation, sorted keys,
// trailing newline.
std::string dump_json(const Json& j);

}  // namespace resp
