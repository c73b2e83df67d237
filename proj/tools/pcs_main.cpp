// Command-line front end: one problem file per invocation, subcommand picks
// the verb, results go to stdout as JSON (CSV for plot-data).
//
// Exit codes: 0 success, 2 malformed input, 3 the requested object provably
// does not exist, 4 internal invariant breach.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcs/commands.hpp"

namespace {

struct Options {
  std::string problem;
  std::string mode = "one";
  std::size_t extension_index = 0;
  std::string reorder_path;
  unsigned decimals = 0;
};

std::vector<std::optional<pcs::ReorderAssignment>> load_reorderings(const std::string& path) {
  const auto j = pcs::io::load_json_file(path);
  if (!j.is_array()) {
    throw pcs::input_error("rearrangement file must hold one entry (or null) per branch");
  }
  std::vector<std::optional<pcs::ReorderAssignment>> out;
  for (const auto& item : j) {
    if (item.is_null()) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(pcs::io::parse_reorder_assignment(item));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toolkit for privacy-constrained information disclosure"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("problem", opt.problem, "problem file (JSON)")->required();
    cmd->add_option("--decimals", opt.decimals,
                    "add decimal renderings alongside the exact rationals")
        ->check(CLI::Range(1u, 50u));
    return cmd;
  };
  add_common(app.add_subcommand("check-dominance",
                                "compare gamma and gamma_b in the Blackwell order"));
  auto* minext = add_common(
      app.add_subcommand("min-extension", "compute minimum-informative extensions of gamma"));
  minext->add_option("--mode", opt.mode, "one (direct solve) or vertices (full enumeration)")
      ->check(CLI::IsMember({"one", "vertices"}));
  add_common(app.add_subcommand("frontier",
                                "enumerate the undominated support of the privacy spec"));
  auto* synth = add_common(app.add_subcommand(
      "synthesize", "build and verify a two-stage signal for a frontier gamma"));
  synth->add_option("--extension-index", opt.extension_index,
                    "which enumerated extension to use (0 = lexicographic least)");
  synth->add_option("--reorder", opt.reorder_path,
                    "JSON file with one rearrangement (or null) per branch");
  add_common(app.add_subcommand("verify",
                                "run the invariant suite on gamma, tau, or composite"));
  add_common(app.add_subcommand("plot-data", "emit the artifact as plot-ready CSV"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  pcs::io::json echo{{"verb", verb}, {"problem", opt.problem}};
  if (verb == "min-extension") echo["mode"] = opt.mode;
  if (verb == "synthesize") {
    echo["extension_index"] = opt.extension_index;
    if (!opt.reorder_path.empty()) echo["reorder"] = opt.reorder_path;
  }
  if (opt.decimals > 0) echo["decimals"] = opt.decimals;

  try {
    const pcs::io::ProblemFile pf = pcs::io::load_problem_file(opt.problem);
    if (verb == "plot-data") {
      std::cout << pcs::io::cmd_plot_data(pf, opt.decimals);
      return 0;
    }
    pcs::io::json payload;
    if (verb == "check-dominance") {
      payload = pcs::io::cmd_check_dominance(pf);
    } else if (verb == "min-extension") {
      payload = pcs::io::cmd_min_extension(pf, opt.mode);
    } else if (verb == "frontier") {
      payload = pcs::io::cmd_frontier(pf);
    } else if (verb == "synthesize") {
      std::vector<std::optional<pcs::ReorderAssignment>> reorderings;
      if (!opt.reorder_path.empty()) reorderings = load_reorderings(opt.reorder_path);
      payload = pcs::io::cmd_synthesize(pf, opt.extension_index, reorderings);
    } else {
      payload = pcs::io::cmd_verify(pf);
    }
    std::cout << pcs::io::make_result(std::move(echo), "ok", std::move(payload), opt.decimals)
                     .dump(2)
              << '\n';
    return 0;
  } catch (const pcs::contract_error& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return 4;
  } catch (const pcs::infeasible_error& e) {
    std::cout << pcs::io::make_result(std::move(echo), "infeasible", {{"reason", e.what()}})
                     .dump(2)
              << '\n';
    return 3;
  } catch (const pcs::input_error& e) {
    std::cout << pcs::io::make_result(std::move(echo), "error", {{"reason", e.what()}}).dump(2)
              << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "json error: " << e.what() << '\n';
    return 2;
  }
}
