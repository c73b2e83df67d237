#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pcs/min_extension.hpp"
#include "pcs/privacy.hpp"
#include "pcs/quantile_signal.hpp"

namespace pcs {

// ---------------------------------------------------------------------------
// Composite signals: a first stage drawing an extended atom (the minimally
// informative extension of a frontier distribution) followed by a quantile
// signal built on that atom's full-state conditional.  The pair is kept
// structurally rather than flattened, so each stage can be verified on its
// own terms.
// ---------------------------------------------------------------------------

struct CompositeSignal {
  MinExtension extension;
  std::vector<QuantileSignal> branch_signals;  // one per extended atom
};

// The first stage as an explicit kernel: row omega gives the probability of
// announcing each extended atom, p(n | omega) = prob(n) mu_n(omega) / mu0(omega).
inline SignalKernel first_stage_kernel(const MinExtension& ext) {
  const Posterior& prior = ext.space.prior();
  SignalKernel kernel;
  kernel.rows.resize(ext.space.num_omega());
  for (std::size_t i = 0; i < ext.space.num_omega(); ++i) {
    kernel.rows[i].resize(ext.gamma.size());
    for (std::size_t n = 0; n < ext.gamma.size(); ++n) {
      kernel.rows[i][n] = ext.gamma.prob(n) * ext.extended_atoms[n][i] / prior[i];
    }
  }
  kernel.validate(ext.space.num_omega());
  return kernel;
}

// Structural validity: one branch per atom, each branch a well-formed
// quantile signal on the same state space that leaves the attribute belief
// of its own atom untouched.
inline void validate_composite(const CompositeSignal& c) {
  if (c.branch_signals.size() != c.extension.gamma.size()) {
    throw input_error("composite needs one branch per extended atom");
  }
  for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
    const QuantileSignal& q = c.branch_signals[n];
    if (q.space.num_omega() != c.extension.space.num_omega()) {
      throw input_error("branch state space mismatch");
    }
    if (!conditional_privacy_check(q, c.extension.extended_atoms[n])) {
      throw input_error("branch is not conditionally privacy-preserving");
    }
  }
  first_stage_kernel(c.extension);
}

// The finite belief distribution induced by observing both stages: one atom
// per (branch, grid cell) with positive realization mass, merged canonically.
inline BeliefDistribution composite_belief_distribution(const CompositeSignal& c) {
  validate_composite(c);
  std::vector<std::pair<Posterior, Rational>> raw;
  for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
    const QuantileSignal& q = c.branch_signals[n];
    const Posterior& mu_n = c.extension.extended_atoms[n];
    for (std::size_t k = 0; k < q.num_cells(); ++k) {
      Rational cell_mass = 0;
      std::vector<Rational> w(q.space.num_omega());
      for (std::size_t i = 0; i < q.space.num_omega(); ++i) {
        w[i] = mu_n[i] * q.density[i][k];
        cell_mass += w[i];
      }
      if (cell_mass == 0) continue;
      for (auto& wi : w) wi /= cell_mass;
      raw.emplace_back(Posterior(std::move(w)),
                       c.extension.gamma.prob(n) * cell_mass * q.cell_length(k));
    }
  }
  return BeliefDistribution::make(std::move(raw));
}

// True iff the composite certifies Blackwell-undominatedness within the
// permissible set: the extension is minimally informative for its attribute
// distribution, every branch reveals the state once the attribute is known,
// and the induced attribute belief distribution sits on the spec's frontier.
inline bool verify_undominated(const CompositeSignal& c, const PrivacySpec& spec) {
  validate_composite(c);
  const StateSpace& space = c.extension.space;
  if (!verify_min_extension(extension_distribution(c.extension), c.extension.gamma, space)) {
    return false;
  }
  for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
    if (!conditionally_revealing_check(c.branch_signals[n], c.extension.extended_atoms[n])) {
      return false;
    }
  }
  const Posterior prior_theta = marginal_theta(space.prior(), space);
  return frontier_membership(marginal_theta_belief(composite_belief_distribution(c), space),
                             spec, prior_theta);
}

// Builds the undominated two-stage signal for a frontier distribution: the
// chosen minimally informative extension, then a quantile signal per branch,
// optionally rearranged.  Refuses distributions off the spec's frontier.
inline CompositeSignal synthesize(
    const BeliefDistribution& gamma_frontier, const PrivacySpec& spec, const StateSpace& space,
    std::size_t extension_choice = 0,
    const std::vector<std::optional<ReorderAssignment>>& reorderings = {}) {
  const Posterior prior_theta = marginal_theta(space.prior(), space);
  if (!frontier_membership(gamma_frontier, spec, prior_theta)) {
    throw infeasible_error(
        "refused: frontier_membership failed for the target distribution");
  }
  if (!reorderings.empty() && reorderings.size() != gamma_frontier.size()) {
    throw input_error("need one (possibly empty) rearrangement per branch");
  }
  MinExtension chosen = [&] {
    // Index 0 is the lexicographically least vertex, solvable without
    // enumerating the whole polytope.
    if (extension_choice == 0) return lex_min_extension(gamma_frontier, space);
    auto extensions = enumerate_min_extensions(gamma_frontier, space);
    if (extension_choice >= extensions.size()) {
      throw input_error("extension index out of range");
    }
    return std::move(extensions[extension_choice]);
  }();
  CompositeSignal c{std::move(chosen), {}};
  c.branch_signals.reserve(gamma_frontier.size());
  for (std::size_t n = 0; n < gamma_frontier.size(); ++n) {
    QuantileSignal q = quantile_signal(c.extension.extended_atoms[n], space);
    if (!reorderings.empty() && reorderings[n]) {
      q = reorder(q, *reorderings[n]);
    }
    c.branch_signals.push_back(std::move(q));
  }
  if (!verify_undominated(c, spec)) {
    throw contract_error("synthesized composite failed verification");
  }
  return c;
}

}  // namespace pcs
