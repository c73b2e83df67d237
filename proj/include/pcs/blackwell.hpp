#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pcs/belief.hpp"
#include "pcs/simplex.hpp"

namespace pcs {

// A dilation certifying that one belief distribution spreads another:
// rows[s] lists (target atom index, weight) pairs with positive weights
// summing to one, the row barycenter equals source atom s, and mixing the
// rows with the source probabilities reproduces the spread.
struct Dilation {
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
};

// Exact re-verification of a dilation certificate; used by tests and to
// double-check solver output.
inline bool dilation_certifies(const Dilation& dil, const BeliefDistribution& spread,
                               const BeliefDistribution& contraction) {
  if (dil.rows.size() != contraction.size()) return false;
  const std::size_t dim = spread.dim();
  if (contraction.dim() != dim) return false;
  std::vector<Rational> mixed(spread.size(), Rational(0));
  for (std::size_t s = 0; s < contraction.size(); ++s) {
    Rational row_total = 0;
    std::vector<Rational> mean(dim, Rational(0));
    for (const auto& [t, w] : dil.rows[s]) {
      if (t >= spread.size() || w <= 0) return false;
      row_total += w;
      for (std::size_t d = 0; d < dim; ++d) mean[d] += w * spread.atom(t)[d];
      mixed[t] += contraction.prob(s) * w;
    }
    if (row_total != 1) return false;
    for (std::size_t d = 0; d < dim; ++d) {
      if (mean[d] != contraction.atom(s)[d]) return false;
    }
  }
  for (std::size_t t = 0; t < spread.size(); ++t) {
    if (mixed[t] != spread.prob(t)) return false;
  }
  return true;
}

// Decides whether `spread` is a mean-preserving spread of `contraction` by
// solving for a dilation exactly; returns the certificate when one exists.
// The returned dilation is the lexicographically least feasible one (row-
// major variable order), so outputs are stable across runs.
inline std::optional<Dilation> check_mps(const BeliefDistribution& spread,
                                         const BeliefDistribution& contraction) {
  const std::size_t dim = spread.dim();
  if (contraction.dim() != dim) {
    throw input_error("belief distributions live on different simplices");
  }
  const std::size_t ns = spread.size();
  const std::size_t nc = contraction.size();
  // Variable (s, t) = weight the dilation moves from contraction atom s to
  // spread atom t, indexed s * ns + t.
  LinearSystem sys(nc * ns);
  for (std::size_t v = 0; v < sys.num_vars; ++v) sys.lower[v] = Rational(0);
  for (std::size_t s = 0; s < nc; ++s) {
    std::vector<Rational> stochastic(sys.num_vars, Rational(0));
    for (std::size_t t = 0; t < ns; ++t) stochastic[s * ns + t] = 1;
    sys.add_eq(std::move(stochastic), Rational(1));
    for (std::size_t d = 0; d < dim; ++d) {
      std::vector<Rational> mean(sys.num_vars, Rational(0));
      for (std::size_t t = 0; t < ns; ++t) mean[s * ns + t] = spread.atom(t)[d];
      sys.add_eq(std::move(mean), contraction.atom(s)[d]);
    }
  }
  for (std::size_t t = 0; t < ns; ++t) {
    std::vector<Rational> marginal(sys.num_vars, Rational(0));
    for (std::size_t s = 0; s < nc; ++s) marginal[s * ns + t] = contraction.prob(s);
    sys.add_eq(std::move(marginal), spread.prob(t));
  }
  auto x = lex_min_point(sys);
  if (!x) return std::nullopt;
  Dilation dil;
  dil.rows.resize(nc);
  for (std::size_t s = 0; s < nc; ++s) {
    for (std::size_t t = 0; t < ns; ++t) {
      const Rational& w = (*x)[s * ns + t];
      if (w > 0) dil.rows[s].emplace_back(t, w);
    }
  }
  if (!dilation_certifies(dil, spread, contraction)) {
    throw contract_error("dilation solver returned an invalid certificate");
  }
  return dil;
}

enum class Relation { dominates, dominated, equivalent, incomparable };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::dominates: return "dominates";
    case Relation::dominated: return "dominated";
    case Relation::equivalent: return "equivalent";
    default: return "incomparable";
  }
}

// Outcome of a two-sided Blackwell comparison of a against b; a witness is
// present exactly when the corresponding direction holds.
struct DominanceResult {
  Relation relation = Relation::incomparable;
  std::optional<Dilation> a_spread_of_b;  // certifies a dominates b
  std::optional<Dilation> b_spread_of_a;  // certifies b dominates a
};

inline DominanceResult compare(const BeliefDistribution& a, const BeliefDistribution& b) {
  DominanceResult out;
  out.a_spread_of_b = check_mps(a, b);
  out.b_spread_of_a = check_mps(b, a);
  if (out.a_spread_of_b && out.b_spread_of_a) {
    out.relation = Relation::equivalent;
  } else if (out.a_spread_of_b) {
    out.relation = Relation::dominates;
  } else if (out.b_spread_of_a) {
    out.relation = Relation::dominated;
  } else {
    out.relation = Relation::incomparable;
  }
  return out;
}

// Coarsens a belief distribution by routing each atom's probability through
// a row-stochastic merge map; slot j receives mass sum_n prob(n) rows[n][j]
// and carries the corresponding average posterior.  The result is always
// Blackwell-dominated by the input.
inline BeliefDistribution garble(const BeliefDistribution& tau,
                                 const std::vector<std::vector<Rational>>& merge_rows) {
  if (merge_rows.size() != tau.size()) {
    throw input_error("merge map needs one row per atom");
  }
  if (merge_rows.front().empty()) throw input_error("merge map needs at least one slot");
  const std::size_t slots = merge_rows.front().size();
  for (const auto& row : merge_rows) {
    if (row.size() != slots) throw input_error("merge map rows must have equal width");
    for (const auto& w : row) {
      if (w < 0) throw input_error("merge map entries must be nonnegative");
    }
    if (vector_sum(row) != 1) throw input_error("merge map rows must sum to 1");
  }
  std::vector<std::pair<Posterior, Rational>> raw;
  for (std::size_t j = 0; j < slots; ++j) {
    Rational mass = 0;
    std::vector<Rational> mean(tau.dim(), Rational(0));
    for (std::size_t n = 0; n < tau.size(); ++n) {
      const Rational w = tau.prob(n) * merge_rows[n][j];
      if (w == 0) continue;
      mass += w;
      for (std::size_t d = 0; d < tau.dim(); ++d) mean[d] += w * tau.atom(n)[d];
    }
    if (mass == 0) continue;
    for (auto& v : mean) v /= mass;
    raw.emplace_back(Posterior(std::move(mean)), mass);
  }
  BeliefDistribution out = BeliefDistribution::make(std::move(raw));
#ifndef NDEBUG
  if (!check_mps(tau, out)) {
    throw contract_error("garbling produced a non-dominated distribution");
  }
#endif
  return out;
}

}  // namespace pcs
