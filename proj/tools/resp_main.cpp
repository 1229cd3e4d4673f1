// resp — decide and certify residual p-ness of HNN extensions of finite
// p-groups.  Problems are JSON documents (schema 1) read from stdin or
// --file; results are human-readable reports or, with --json, byte-stable
// JSON documents that re-verify through `resp verify-cert`.
//
// Exit codes: 0 = decided/constructed, 1 = inconclusive, 2 = invalid input,
// 3 = internal oracle disagreement or failed verification.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "resp/problem_io.hpp"

namespace {

struct CommonOpts {
  std::string file;
  bool json = false;
  std::optional<std::int64_t> p;
  std::optional<std::uint64_t> cap;
  std::optional<std::int64_t> s;
};

std::string read_input(const std::string& file) {
  std::ostringstream ss;
  if (!file.empty() && file != "-") {
    std::ifstream in(file);
    if (!in) throw resp::Error("cannot open \"" + file + "\"");
    ss << in.rdbuf();
  } else {
    ss << std::cin.rdbuf();
  }
  return ss.str();
}

void add_common(CLI::App* cmd, CommonOpts& opt, bool takes_pair_options) {
  cmd->add_option("-f,--file", opt.file, "problem JSON file (default: stdin)");
  cmd->add_flag("--json", opt.json, "emit the JSON document instead of a report");
  if (takes_pair_options) {
    cmd->add_option("--p", opt.p, "expected prime (validated against the group)");
    cmd->add_option("--cap", opt.cap, "largest |G| the decision search accepts");
    cmd->add_option("--s", opt.s, "cyclic cover degree override (a power of p)");
  }
}

resp::ProblemSpec load_problem(const CommonOpts& opt) {
  resp::ProblemSpec spec = resp::parse_problem_text(read_input(opt.file));
  resp::apply_overrides(spec, opt.p, opt.cap, opt.s);
  return spec;
}

void emit(const resp::CmdResult& res, bool json) {
  if (json)
    std::cout << resp::dump_json(res.output);
  else
    std::cout << res.text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"residual p-ness of HNN extensions of finite p-groups"};
  app.require_subcommand(1);

  CommonOpts core_opt, decide_opt, obstruct_opt, witness_opt, reduce_opt;
  CommonOpts paper_opt, cert_opt;
  bool paper_light = false;
  std::int64_t enum_p = 3;
  std::uint64_t enum_seed = 0, enum_max_order = 81;
  int enum_count = 50;
  bool enum_json = false;

  CLI::App* c_core = app.add_subcommand("core", "compute the core H(G, phi)");
  add_common(c_core, core_opt, true);
  CLI::App* c_decide =
      app.add_subcommand("decide", "decide residual p-ness (abelian / chief / "
                                   "obstruction routing)");
  add_common(c_decide, decide_opt, true);
  CLI::App* c_obstruct = app.add_subcommand(
      "obstruct", "scan twisted cores for a non-p-power order obstruction");
  add_common(c_obstruct, obstruct_opt, true);
  CLI::App* c_witness = app.add_subcommand(
      "witness", "construct an embedding witness for an abelian pair");
  add_common(c_witness, witness_opt, true);
  CLI::App* c_reduce =
      app.add_subcommand("reduce", "Britton-reduce the word in the problem");
  add_common(c_reduce, reduce_opt, true);

  CLI::App* c_paper = app.add_subcommand(
      "verify-paper", "re-verify every reference fixture fact");
  c_paper->add_flag("--json", paper_opt.json, "emit the JSON report");
  c_paper->add_flag("--light", paper_light, "skip the order-3^11 fixture");

  CLI::App* c_cert = app.add_subcommand(
      "verify-cert", "independently re-verify an emitted document");
  add_common(c_cert, cert_opt, false);

  CLI::App* c_enum = app.add_subcommand(
      "enumerate", "survey random small-order pairs and tally verdicts");
  c_enum->add_option("--p", enum_p, "prime (default 3)");
  c_enum->add_option("--seed", enum_seed, "random seed (default 0)");
  c_enum->add_option("--count", enum_count, "number of pairs (default 50)");
  c_enum->add_option("--max-order", enum_max_order,
                     "largest ambient order (default 81)");
  c_enum->add_flag("--json", enum_json, "emit the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    resp::CmdResult res;
    bool json = false;
    if (c_core->parsed()) {
      res = resp::cmd_core(load_problem(core_opt));
      json = core_opt.json;
    } else if (c_decide->parsed()) {
      res = resp::cmd_decide(load_problem(decide_opt));
      json = decide_opt.json;
    } else if (c_obstruct->parsed()) {
      res = resp::cmd_obstruct(load_problem(obstruct_opt));
      json = obstruct_opt.json;
    } else if (c_witness->parsed()) {
      res = resp::cmd_witness(load_problem(witness_opt));
      json = witness_opt.json;
    } else if (c_reduce->parsed()) {
      res = resp::cmd_reduce(load_problem(reduce_opt));
      json = reduce_opt.json;
    } else if (c_paper->parsed()) {
      res = resp::cmd_verify_paper(!paper_light);
      json = paper_opt.json;
    } else if (c_cert->parsed()) {
      resp::Json doc = resp::Json::parse(read_input(cert_opt.file), nullptr,
                                         /*allow_exceptions=*/false);
      if (doc.is_discarded()) throw resp::Error("verify: input is not valid JSON");
      res = resp::cmd_verify_cert(doc);
      json = cert_opt.json;
    } else if (c_enum->parsed()) {
      res = resp::cmd_enumerate(enum_p, enum_seed, enum_count, enum_max_order);
      json = enum_json;
    }
    emit(res, json);
    return res.exit_code;
  } catch (const resp::InternalCheckError& e) {
    std::cerr << "internal check failed: " << e.what() << "\n";
    return 3;
  } catch (const resp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
