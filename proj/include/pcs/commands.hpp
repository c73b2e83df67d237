#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pcs/io.hpp"

// The CLI verbs as library functions.  Each returns the result payload (or
// CSV text for plot-data) and reports problems by throwing: input_error for
// malformed or missing inputs, infeasible_error when the requested object
// provably does not exist.  The binary maps those onto exit codes.

namespace pcs::io {

inline json cmd_check_dominance(const ProblemFile& pf) {
  if (!pf.gamma || !pf.gamma_b) {
    throw input_error("check-dominance needs both 'gamma' and 'gamma_b'");
  }
  const DominanceResult res = compare(*pf.gamma, *pf.gamma_b);
  json payload{{"relation", to_string(res.relation)}};
  if (res.a_spread_of_b) {
    payload["gamma_spread_of_gamma_b"] = serialize_dilation(*res.a_spread_of_b);
  }
  if (res.b_spread_of_a) {
    payload["gamma_b_spread_of_gamma"] = serialize_dilation(*res.b_spread_of_a);
  }
  return payload;
}

inline json cmd_min_extension(const ProblemFile& pf, const std::string& mode) {
  if (!pf.gamma) throw input_error("min-extension needs 'gamma'");
  if (mode == "one") {
    return {{"extension", serialize_extension(lex_min_extension(*pf.gamma, pf.space))}};
  }
  if (mode == "vertices") {
    const auto all = enumerate_min_extensions(*pf.gamma, pf.space);
    json list = json::array();
    for (const auto& ext : all) list.push_back(serialize_extension(ext));
    return {{"count", all.size()}, {"extensions", std::move(list)}};
  }
  throw input_error("mode must be 'one' or 'vertices'");
}

inline json cmd_frontier(const ProblemFile& pf) {
  const Posterior prior_theta = marginal_theta(pf.space.prior(), pf.space);
  json support = json::array();
  if (const auto* sb = std::get_if<SingleBound>(&pf.privacy)) {
    for (std::size_t n = 0; n < sb->bound.size(); ++n) {
      support.push_back({{"posterior", serialize_posterior(sb->bound.atom(n))}});
    }
  } else if (const auto* ep = std::get_if<ExPost>(&pf.privacy)) {
    for (const auto& p : expost_frontier_support(*ep)) {
      support.push_back({{"posterior", serialize_posterior(p)}});
    }
  } else if (const auto* inf = std::get_if<Inferential>(&pf.privacy)) {
    for (const auto& pt : inferential_frontier_support(prior_theta, inf->lambda)) {
      json labels = json::array();
      for (std::size_t j : pt.subset_E) labels.push_back(pf.space.theta_label(j));
      support.push_back({{"posterior", serialize_posterior(pt.posterior)},
                         {"subset_E", std::move(labels)}});
    }
  } else {
    const auto gamma = frontier_construct(pf.privacy, prior_theta);
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      support.push_back({{"posterior", serialize_posterior(gamma.atom(n))}});
    }
    return {{"support", std::move(support)}, {"gamma", serialize_belief(gamma)}};
  }
  return {{"support", std::move(support)},
          {"gamma", serialize_belief(frontier_construct(pf.privacy, prior_theta))}};
}

inline json cmd_synthesize(const ProblemFile& pf, std::size_t extension_index,
                           const std::vector<std::optional<ReorderAssignment>>& reorderings) {
  if (!pf.gamma) throw input_error("synthesize needs 'gamma'");
  const CompositeSignal c =
      synthesize(*pf.gamma, pf.privacy, pf.space, extension_index, reorderings);
  return {{"composite", serialize_composite(c)}, {"verified", true}};
}

namespace detail {

// When permissibility fails atom-by-atom (ex-post region or inferential
// band), name the first atom that breaks it; the MPS-based variants have no
// single culprit, so they get no annotation.
inline void annotate_offending_atom(json& check, const BeliefDistribution& gamma,
                                    const PrivacySpec& spec, const Posterior& prior_theta) {
  if (gamma.dim() != prior_theta.dim()) return;
  const auto annotate = [&](std::size_t n) {
    check["offending_atom"] = {{"index", n},
                               {"posterior", serialize_posterior(gamma.atom(n))}};
  };
  if (const auto* inf = std::get_if<Inferential>(&spec)) {
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      if (!pcs::detail::ratio_band_ok(gamma.atom(n), prior_theta, inf->lambda)) {
        annotate(n);
        return;
      }
    }
  } else if (const auto* ep = std::get_if<ExPost>(&spec)) {
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      if (!ep->region.satisfied_by(gamma.atom(n).weights())) {
        annotate(n);
        return;
      }
    }
  }
}

}  // namespace detail

inline json cmd_verify(const ProblemFile& pf) {
  const Posterior prior_theta = marginal_theta(pf.space.prior(), pf.space);
  json checks = json::array();
  bool all_pass = true;
  // A failed precondition inside a check (dimension mismatch, broken grid,
  // non-stochastic kernel) counts as that check failing, not as a file error:
  // verify's job is to report on the artifact as given.
  const auto run = [&](const char* name, auto&& fn) {
    bool pass = false;
    try {
      pass = fn();
    } catch (const input_error&) {
      pass = false;
    }
    checks.push_back({{"name", name}, {"pass", pass}});
    all_pass = all_pass && pass;
    return pass;
  };

  std::string artifact;
  if (pf.composite) {
    artifact = "composite";
    const CompositeSignal& c = *pf.composite;
    run("min_extension", [&] {
      return verify_min_extension(extension_distribution(c.extension), c.extension.gamma,
                                  pf.space);
    });
    run("first_stage_stochastic", [&] {
      first_stage_kernel(c.extension).validate(pf.space.num_omega());
      return true;
    });
    run("uniform_marginal", [&] {
      for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
        if (!conditional_privacy_check(c.branch_signals[n], c.extension.extended_atoms[n])) {
          return false;
        }
      }
      return true;
    });
    run("conditionally_revealing", [&] {
      for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
        if (!conditionally_revealing_check(c.branch_signals[n], c.extension.extended_atoms[n])) {
          return false;
        }
      }
      return true;
    });
    run("attribute_marginal_matches", [&] {
      return marginal_theta_belief(composite_belief_distribution(c), pf.space) ==
             c.extension.gamma;
    });
    if (!run("permissible",
             [&] { return permissible(c.extension.gamma, pf.privacy, prior_theta); })) {
      detail::annotate_offending_atom(checks.back(), c.extension.gamma, pf.privacy, prior_theta);
    }
    run("frontier_membership",
        [&] { return frontier_membership(c.extension.gamma, pf.privacy, prior_theta); });
  } else if (pf.tau) {
    artifact = "extension";
    const BeliefDistribution& tau = *pf.tau;
    run("bayes_plausible", [&] { return bayes_plausible(tau, pf.space.prior()); });
    if (pf.gamma) {
      run("attribute_marginal_matches",
          [&] { return marginal_theta_belief(tau, pf.space) == *pf.gamma; });
      run("min_extension", [&] { return verify_min_extension(tau, *pf.gamma, pf.space); });
    }
    const BeliefDistribution tau_theta = marginal_theta_belief(tau, pf.space);
    if (!run("permissible", [&] { return permissible(tau_theta, pf.privacy, prior_theta); })) {
      detail::annotate_offending_atom(checks.back(), tau_theta, pf.privacy, prior_theta);
    }
    run("frontier_membership",
        [&] { return frontier_membership(tau_theta, pf.privacy, prior_theta); });
  } else if (pf.gamma) {
    artifact = "gamma";
    const BeliefDistribution& gamma = *pf.gamma;
    run("bayes_plausible", [&] { return bayes_plausible(gamma, prior_theta); });
    if (!run("permissible", [&] { return permissible(gamma, pf.privacy, prior_theta); })) {
      detail::annotate_offending_atom(checks.back(), gamma, pf.privacy, prior_theta);
    }
    run("frontier_membership",
        [&] { return frontier_membership(gamma, pf.privacy, prior_theta); });
  } else {
    throw input_error("verify needs one of 'composite', 'tau', or 'gamma'");
  }
  return {{"artifact", artifact}, {"checks", std::move(checks)}, {"all_pass", all_pass}};
}

namespace detail {

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os << ',';
    os << fields[k];
  }
  os << '\n';
}

// One belief distribution as index/weight/coordinate rows.
inline std::string belief_csv(const BeliefDistribution& b, unsigned decimals) {
  std::ostringstream os;
  std::vector<std::string> header{"index", "weight"};
  for (std::size_t i = 0; i < b.dim(); ++i) header.push_back("coord_" + std::to_string(i));
  if (decimals > 0) {
    header.push_back("weight_dec");
    for (std::size_t i = 0; i < b.dim(); ++i) {
      header.push_back("coord_" + std::to_string(i) + "_dec");
    }
  }
  csv_row(os, header);
  for (std::size_t n = 0; n < b.size(); ++n) {
    std::vector<std::string> row{std::to_string(n), format_rational(b.prob(n))};
    for (std::size_t i = 0; i < b.dim(); ++i) row.push_back(format_rational(b.atom(n)[i]));
    if (decimals > 0) {
      row.push_back(format_decimal(b.prob(n), decimals));
      for (std::size_t i = 0; i < b.dim(); ++i) {
        row.push_back(format_decimal(b.atom(n)[i], decimals));
      }
    }
    csv_row(os, row);
  }
  return os.str();
}

// One row per positive-mass (branch, cell) pair of a composite signal: the
// realization interval, its probability, and the posterior over states it
// induces.
inline std::string composite_csv(const CompositeSignal& c, unsigned decimals) {
  const StateSpace& space = c.extension.space;
  std::ostringstream os;
  std::vector<std::string> header{"branch", "cell", "lo", "hi", "weight"};
  for (std::size_t i = 0; i < space.num_omega(); ++i) {
    header.push_back("coord_" + std::to_string(i));
  }
  if (decimals > 0) {
    for (const char* base : {"lo", "hi", "weight"}) {
      header.push_back(std::string(base) + "_dec");
    }
    for (std::size_t i = 0; i < space.num_omega(); ++i) {
      header.push_back("coord_" + std::to_string(i) + "_dec");
    }
  }
  csv_row(os, header);
  for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
    const QuantileSignal& q = c.branch_signals[n];
    const Posterior& mu = c.extension.extended_atoms[n];
    for (std::size_t k = 0; k < q.num_cells(); ++k) {
      std::vector<Rational> mass(space.num_omega());
      Rational total = 0;
      for (std::size_t i = 0; i < space.num_omega(); ++i) {
        mass[i] = mu[i] * q.density[i][k] * q.cell_length(k);
        total += mass[i];
      }
      if (total == 0) continue;
      const Rational weight = c.extension.gamma.prob(n) * total;
      std::vector<std::string> row{std::to_string(n), std::to_string(k),
                                   format_rational(q.breakpoints[k]),
                                   format_rational(q.breakpoints[k + 1]),
                                   format_rational(weight)};
      for (std::size_t i = 0; i < space.num_omega(); ++i) {
        row.push_back(format_rational(mass[i] / total));
      }
      if (decimals > 0) {
        row.push_back(format_decimal(q.breakpoints[k], decimals));
        row.push_back(format_decimal(q.breakpoints[k + 1], decimals));
        row.push_back(format_decimal(weight, decimals));
        for (std::size_t i = 0; i < space.num_omega(); ++i) {
          row.push_back(format_decimal(mass[i] / total, decimals));
        }
      }
      csv_row(os, row);
    }
  }
  return os.str();
}

}  // namespace detail

inline std::string cmd_plot_data(const ProblemFile& pf, unsigned decimals) {
  if (pf.composite) return detail::composite_csv(*pf.composite, decimals);
  if (pf.tau) return detail::belief_csv(*pf.tau, decimals);
  if (pf.gamma) return detail::belief_csv(*pf.gamma, decimals);
  // No artifact: emit just the header an attribute distribution would get.
  std::ostringstream os;
  std::vector<std::string> header{"index", "weight"};
  for (std::size_t i = 0; i < pf.space.num_theta(); ++i) {
    header.push_back("coord_" + std::to_string(i));
  }
  detail::csv_row(os, header);
  return os.str();
}

// The envelope every JSON-emitting verb prints: an echo of the invocation,
// a machine-readable status, and the exact payload (plus a decimal mirror
// when requested; the exact strings remain authoritative).
inline json make_result(json command_echo, const std::string& status, json payload,
                        unsigned decimals = 0) {
  json out{{"command", std::move(command_echo)},
           {"status", status},
           {"payload", payload}};
  if (decimals > 0) out["payload_decimal"] = decimal_mirror(payload, decimals);
  return out;
}

}  // namespace pcs::io
