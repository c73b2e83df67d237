#pragma once

#include <set>
#include <utility>
#include <vector>

#include "pcs/blackwell.hpp"
#include "pcs/state_space.hpp"
#include "pcs/vertex_enum.hpp"

namespace pcs {

// A minimum-informative extension of an attribute belief distribution gamma:
// each atom nu_n extends to exactly one posterior over the full state space,
// assembled from per-attribute conditionals.
struct MinExtension {
  BeliefDistribution gamma;                 // over the attribute simplex
  StateSpace space;
  // cond[n][i] = mu_n(omega_i | theta(omega_i)); the conditional given any
  // other attribute value is zero (see cond_at).
  std::vector<std::vector<Rational>> cond;
  // extended_atoms[n](omega_i) = nu_n(theta(omega_i)) * cond[n][i], aligned
  // with gamma's atoms.
  std::vector<Posterior> extended_atoms;

  // Three-index view mu_n(omega_i | theta_j).
  Rational cond_at(std::size_t n, std::size_t i, std::size_t j) const {
    if (space.theta_of(i) != j) return Rational(0);
    return cond[n][i];
  }
};

namespace detail {

inline void require_extension_inputs(const BeliefDistribution& gamma,
                                     const StateSpace& space) {
  if (gamma.dim() != space.num_theta()) {
    throw input_error("gamma must live on the attribute simplex");
  }
  if (!bayes_plausible(gamma, marginal_theta(space.prior(), space))) {
    // No signal induces an implausible belief distribution, so the
    // extension problem itself is infeasible rather than malformed.
    throw infeasible_error("gamma is not Bayes-plausible for the prior attribute marginal");
  }
}

// Multiplies an equality row through by the least common multiple of all
// denominators, keeping coefficients integral.
inline void add_cleared_eq(LinearSystem& sys, std::vector<Rational> coeffs, Rational rhs) {
  Integer lcm = denominator_of(rhs);
  for (const auto& c : coeffs) {
    lcm = boost::multiprecision::lcm(lcm, denominator_of(c));
  }
  const Rational scale(lcm, 1);
  for (auto& c : coeffs) c *= scale;
  sys.add_eq(std::move(coeffs), rhs * scale);
}

}  // namespace detail

// The linear system whose solutions are exactly the per-attribute
// conditional tables of extensions of gamma.  Variables are indexed
// atom-major: variable n * num_omega + i is mu_n(omega_i | theta(omega_i)).
// Rows: per-state prior recovery (gamma-weighted conditionals reproduce the
// prior, cleared of denominators), per-(atom, attribute) normalization, and
// nonnegativity; conditionals of attribute blocks an atom puts zero mass on
// are pinned to the prior conditional so that distinct solutions are
// distinct extensions.
inline LinearSystem build_extension_system(const BeliefDistribution& gamma,
                                           const StateSpace& space) {
  detail::require_extension_inputs(gamma, space);
  const std::size_t n_atoms = gamma.size();
  const std::size_t n_omega = space.num_omega();
  LinearSystem sys(n_atoms * n_omega);
  for (std::size_t v = 0; v < sys.num_vars; ++v) sys.lower[v] = Rational(0);

  const Posterior& prior = space.prior();
  Posterior prior_theta = marginal_theta(prior, space);

  // Prior recovery, one row per state.
  for (std::size_t i = 0; i < n_omega; ++i) {
    const std::size_t j = space.theta_of(i);
    std::vector<Rational> row(sys.num_vars, Rational(0));
    for (std::size_t n = 0; n < n_atoms; ++n) {
      row[n * n_omega + i] = gamma.prob(n) * gamma.atom(n)[j];
    }
    detail::add_cleared_eq(sys, std::move(row), prior[i]);
  }
  // Normalization per atom and attribute block, plus pinning of blocks the
  // atom never reaches.
  for (std::size_t n = 0; n < n_atoms; ++n) {
    for (std::size_t j = 0; j < space.num_theta(); ++j) {
      std::vector<Rational> row(sys.num_vars, Rational(0));
      for (std::size_t i : space.theta_block(j)) row[n * n_omega + i] = 1;
      sys.add_eq(std::move(row), Rational(1));
      if (gamma.atom(n)[j] == 0) {
        for (std::size_t i : space.theta_block(j)) {
          std::vector<Rational> pin(sys.num_vars, Rational(0));
          pin[n * n_omega + i] = 1;
          detail::add_cleared_eq(sys, std::move(pin), prior[i] / prior_theta[j]);
        }
      }
    }
  }
  return sys;
}

namespace detail {

// Assembles a MinExtension from a solution of build_extension_system and
// re-verifies every invariant exactly.
inline MinExtension make_extension(const BeliefDistribution& gamma, const StateSpace& space,
                                   const std::vector<Rational>& x) {
  const std::size_t n_omega = space.num_omega();
  MinExtension ext{gamma, space, {}, {}};
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    std::vector<Rational> row(x.begin() + static_cast<std::ptrdiff_t>(n * n_omega),
                              x.begin() + static_cast<std::ptrdiff_t>((n + 1) * n_omega));
    std::vector<Rational> atom(n_omega);
    for (std::size_t i = 0; i < n_omega; ++i) {
      atom[i] = gamma.atom(n)[space.theta_of(i)] * row[i];
    }
    ext.cond.push_back(std::move(row));
    ext.extended_atoms.emplace_back(std::move(atom));
    if (marginal_theta(ext.extended_atoms.back(), space) != gamma.atom(n)) {
      throw contract_error("extension atom does not marginalize to its gamma atom");
    }
  }
  // Prior recovery residual must vanish identically.
  for (std::size_t i = 0; i < n_omega; ++i) {
    Rational total = 0;
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      total += gamma.prob(n) * ext.extended_atoms[n][i];
    }
    if (total != space.prior()[i]) {
      throw contract_error("extension does not average back to the prior");
    }
  }
  return ext;
}

}  // namespace detail

// One minimum-informative extension of gamma (the solver's deterministic
// feasible point).  Throws infeasible_error when no extension exists, which
// cannot happen for Bayes-plausible gamma.
inline MinExtension solve_min_extension(const BeliefDistribution& gamma,
                                        const StateSpace& space) {
  auto x = feasible_point(build_extension_system(gamma, space));
  if (!x) throw infeasible_error("no extension exists");
  return detail::make_extension(gamma, space, *x);
}

// The lexicographically least vertex of the extension polytope, solved
// directly (no enumeration).  Coincides with the first entry of
// enumerate_min_extensions.
inline MinExtension lex_min_extension(const BeliefDistribution& gamma,
                                      const StateSpace& space) {
  auto x = lex_min_point(build_extension_system(gamma, space));
  if (!x) throw infeasible_error("no extension exists");
  return detail::make_extension(gamma, space, *x);
}

// All vertices of the extension polytope, in lexicographic order of the
// conditional tables.  Interior extensions are convex combinations of these
// and are not enumerated.
inline std::vector<MinExtension> enumerate_min_extensions(const BeliefDistribution& gamma,
                                                          const StateSpace& space) {
  auto vertices = enumerate_vertices(build_extension_system(gamma, space));
  if (vertices.empty()) throw infeasible_error("no extension exists");
  std::vector<MinExtension> out;
  out.reserve(vertices.size());
  for (const auto& x : vertices) out.push_back(detail::make_extension(gamma, space, x));
  return out;
}

// The extension viewed as a belief distribution over the full state space.
inline BeliefDistribution extension_distribution(const MinExtension& ext) {
  std::vector<std::pair<Posterior, Rational>> raw;
  for (std::size_t n = 0; n < ext.gamma.size(); ++n) {
    raw.emplace_back(ext.extended_atoms[n], ext.gamma.prob(n));
  }
  return BeliefDistribution::make(std::move(raw));
}

// True iff tau is a minimum-informative extension of gamma: its attribute
// marginal distribution is exactly gamma and no two distinct atoms share an
// attribute marginal (each nu extends to exactly one state posterior).
inline bool verify_min_extension(const BeliefDistribution& tau,
                                 const BeliefDistribution& gamma, const StateSpace& space) {
  if (tau.dim() != space.num_omega()) {
    throw input_error("tau must live on the state simplex");
  }
  if (marginal_theta_belief(tau, space) != gamma) return false;
  std::set<Posterior> marginals;
  for (std::size_t n = 0; n < tau.size(); ++n) {
    if (!marginals.insert(marginal_theta(tau.atom(n), space)).second) return false;
  }
  return true;
}

}  // namespace pcs
