#pragma once

#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "pcs/blackwell.hpp"
#include "pcs/scalar_distribution.hpp"
#include "pcs/vertex_enum.hpp"

namespace pcs {

// ---------------------------------------------------------------------------
// Privacy specifications (the permissible set P of attribute belief
// distributions), as a tagged union of the four supported families.
// ---------------------------------------------------------------------------

// P = { gamma : gamma Blackwell-below `bound` }.
struct SingleBound {
  BeliefDistribution bound;
};

// P = { gamma : every atom lies in the polytope `region` }.  The region
// always carries the simplex rows; build it via ex_post_spec.
struct ExPost {
  LinearSystem region;
};

// P = { gamma : every atom nu keeps the density ratio nu/prior within a
// multiplicative band lambda }.  lambda plays the role of e^epsilon and is
// supplied directly as a rational so all arithmetic stays exact.
struct Inferential {
  Rational lambda;
};

// P = { gamma : the induced distribution of posterior means of f is a
// mean-preserving contraction of kappa_bar }.
struct PosteriorMean {
  std::vector<Rational> f_values;  // f(theta_j) per attribute index
  ScalarDistribution kappa_bar;
};

using PrivacySpec = std::variant<SingleBound, ExPost, Inferential, PosteriorMean>;

// Wraps caller constraint rows over the attribute simplex coordinates into
// an ExPost spec, appending the simplex rows (sum one, coordinates >= 0).
inline ExPost ex_post_spec(LinearSystem user_rows) {
  user_rows.validate();
  LinearSystem region = std::move(user_rows);
  region.add_eq(std::vector<Rational>(region.num_vars, Rational(1)), Rational(1));
  for (std::size_t j = 0; j < region.num_vars; ++j) {
    if (!region.lower[j] || *region.lower[j] < 0) region.lower[j] = Rational(0);
  }
  return ExPost{std::move(region)};
}

// The distribution of f under a posterior's weights.
inline Rational posterior_mean(const Posterior& nu, const std::vector<Rational>& f_values) {
  if (nu.dim() != f_values.size()) throw input_error("f must be defined on the attribute set");
  return dot(nu.weights(), f_values);
}

// Full-information benchmark: the distribution of f(theta) under a prior.
inline ScalarDistribution full_information_distribution(const Posterior& prior_theta,
                                                        const std::vector<Rational>& f_values) {
  if (prior_theta.dim() != f_values.size()) {
    throw input_error("f must be defined on the attribute set");
  }
  std::vector<std::pair<Rational, Rational>> raw;
  for (std::size_t j = 0; j < f_values.size(); ++j) {
    raw.emplace_back(f_values[j], prior_theta[j]);
  }
  return ScalarDistribution::make(std::move(raw));
}

// The induced distribution of posterior means of f; atoms with equal means
// merge.
inline ScalarDistribution kappa_of(const BeliefDistribution& gamma,
                                   const std::vector<Rational>& f_values) {
  std::vector<std::pair<Rational, Rational>> raw;
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    raw.emplace_back(posterior_mean(gamma.atom(n), f_values), gamma.prob(n));
  }
  return ScalarDistribution::make(std::move(raw));
}

// Checks the structural invariants of a spec against the prior attribute
// marginal; throws input_error on violation.
inline void validate_privacy_spec(const PrivacySpec& spec, const Posterior& prior_theta) {
  if (const auto* sb = std::get_if<SingleBound>(&spec)) {
    if (!bayes_plausible(sb->bound, prior_theta)) {
      throw input_error("single-bound distribution must be Bayes-plausible");
    }
  } else if (const auto* ep = std::get_if<ExPost>(&spec)) {
    if (ep->region.num_vars != prior_theta.dim()) {
      throw input_error("ex-post region dimension mismatch");
    }
    if (!ep->region.satisfied_by(prior_theta.weights())) {
      throw input_error("ex-post region must contain the prior attribute marginal");
    }
  } else if (const auto* inf = std::get_if<Inferential>(&spec)) {
    if (inf->lambda < 1) {
      throw input_error("inferential ratio bound must be at least 1");
    }
  } else {
    const auto& pm = std::get<PosteriorMean>(spec);
    if (pm.f_values.size() != prior_theta.dim()) {
      throw input_error("f must be defined on the attribute set");
    }
    if (!mps_1d_check(full_information_distribution(prior_theta, pm.f_values), pm.kappa_bar)) {
      throw input_error("kappa_bar must be a mean-preserving contraction of full information");
    }
  }
}

namespace detail {

// max_theta r <= lambda * min_theta r for the density ratio r = nu / prior.
inline bool ratio_band_ok(const Posterior& nu, const Posterior& prior_theta,
                          const Rational& lambda) {
  if (nu.dim() != prior_theta.dim()) throw input_error("posterior dimension mismatch");
  Rational lo, hi;
  for (std::size_t j = 0; j < nu.dim(); ++j) {
    Rational r = nu[j] / prior_theta[j];
    if (j == 0) {
      lo = hi = r;
    } else {
      if (r < lo) lo = r;
      if (r > hi) hi = r;
    }
  }
  return hi <= lambda * lo;
}

}  // namespace detail

// Membership of gamma in the permissible set.  The prior attribute marginal
// anchors the inferential ratio test and spec validation.
inline bool permissible(const BeliefDistribution& gamma, const PrivacySpec& spec,
                        const Posterior& prior_theta) {
  validate_privacy_spec(spec, prior_theta);
  if (gamma.dim() != prior_theta.dim()) {
    throw input_error("gamma must live on the attribute simplex");
  }
  if (const auto* sb = std::get_if<SingleBound>(&spec)) {
    return check_mps(sb->bound, gamma).has_value();
  }
  if (const auto* ep = std::get_if<ExPost>(&spec)) {
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      if (!ep->region.satisfied_by(gamma.atom(n).weights())) return false;
    }
    return true;
  }
  if (const auto* inf = std::get_if<Inferential>(&spec)) {
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      if (!detail::ratio_band_ok(gamma.atom(n), prior_theta, inf->lambda)) return false;
    }
    return true;
  }
  const auto& pm = std::get<PosteriorMean>(spec);
  return mps_1d_check(pm.kappa_bar, kappa_of(gamma, pm.f_values));
}

// ---------------------------------------------------------------------------
// Ex-post frontier (vertex support).
// ---------------------------------------------------------------------------

// The extreme points of the ex-post region, sorted lexicographically.
inline std::vector<Posterior> expost_frontier_support(const ExPost& spec) {
  auto vertices = enumerate_vertices(spec.region);
  if (vertices.empty()) throw input_error("ex-post region is empty");
  std::vector<Posterior> out;
  out.reserve(vertices.size());
  for (auto& v : vertices) out.emplace_back(std::move(v));
  return out;
}

// A Bayes-plausible distribution over the given support points with
// barycenter prior_theta: the lexicographically least weight vector.
// Throws infeasible_error when the prior lies outside their convex hull.
inline BeliefDistribution frontier_distribution(const std::vector<Posterior>& support,
                                                const Posterior& prior_theta) {
  if (support.empty()) throw input_error("support must be nonempty");
  LinearSystem sys(support.size());
  for (std::size_t n = 0; n < support.size(); ++n) {
    if (support[n].dim() != prior_theta.dim()) {
      throw input_error("support point dimension mismatch");
    }
    sys.lower[n] = Rational(0);
  }
  sys.add_eq(std::vector<Rational>(support.size(), Rational(1)), Rational(1));
  for (std::size_t j = 0; j < prior_theta.dim(); ++j) {
    std::vector<Rational> row(support.size());
    for (std::size_t n = 0; n < support.size(); ++n) row[n] = support[n][j];
    sys.add_eq(std::move(row), prior_theta[j]);
  }
  auto w = lex_min_point(sys);
  if (!w) {
    throw infeasible_error("prior is not representable over the frontier support");
  }
  std::vector<std::pair<Posterior, Rational>> raw;
  for (std::size_t n = 0; n < support.size(); ++n) raw.emplace_back(support[n], (*w)[n]);
  return BeliefDistribution::make(std::move(raw));
}

// ---------------------------------------------------------------------------
// Inferential frontier (dichotomy extreme points).
// ---------------------------------------------------------------------------

// One frontier point of the inferential band: the ratio is lambda on the
// subset E and 1 off it (up to common normalization).
struct InferentialExtremePoint {
  std::vector<std::size_t> subset_E;  // attribute indices, increasing
  Posterior posterior;
};

// All dichotomy extreme points, one per proper nonempty subset E of the
// attribute set, in ascending bitmask order of E.
inline std::vector<InferentialExtremePoint> inferential_frontier_support(
    const Posterior& prior_theta, const Rational& lambda) {
  if (lambda <= 1) {
    throw input_error("inferential frontier needs a ratio bound above 1");
  }
  const std::size_t m = prior_theta.dim();
  if (m > 20) throw input_error("attribute set too large for subset enumeration");
  std::vector<InferentialExtremePoint> out;
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << m); ++mask) {
    Rational mass_E = 0;
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (std::size_t{1} << j)) {
        subset.push_back(j);
        mass_E += prior_theta[j];
      }
    }
    const Rational z = lambda * mass_E + (1 - mass_E);
    std::vector<Rational> w(m);
    for (std::size_t j = 0; j < m; ++j) {
      const bool in_E = (mask & (std::size_t{1} << j)) != 0;
      w[j] = (in_E ? lambda : Rational(1)) * prior_theta[j] / z;
    }
    out.push_back(InferentialExtremePoint{std::move(subset), Posterior(std::move(w))});
  }
  return out;
}

// True iff every atom of gamma is exactly one of the dichotomy extreme
// points for (prior_theta, lambda).
inline bool inferential_frontier_membership(const BeliefDistribution& gamma,
                                            const Posterior& prior_theta,
                                            const Rational& lambda) {
  if (gamma.dim() != prior_theta.dim()) {
    throw input_error("gamma must live on the attribute simplex");
  }
  std::set<Posterior> support;
  for (auto& p : inferential_frontier_support(prior_theta, lambda)) {
    support.insert(std::move(p.posterior));
  }
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    if (!support.count(gamma.atom(n))) return false;
  }
  return true;
}

// The two-child split of nu along a subset F: the F-part is tilted up by
// (1+delta) in one child and down by (1-delta) in the other, normalized;
// the children average back to nu under the returned probabilities.
inline std::pair<std::pair<Posterior, Rational>, std::pair<Posterior, Rational>>
ratio_tilt_split(const Posterior& nu, const std::vector<bool>& in_F, const Rational& delta) {
  if (in_F.size() != nu.dim()) throw input_error("subset indicator length mismatch");
  if (delta <= 0 || delta > 1) throw input_error("tilt must lie in (0, 1]");
  Rational mass_F = 0;
  for (std::size_t j = 0; j < nu.dim(); ++j) {
    if (in_F[j]) mass_F += nu[j];
  }
  std::vector<Rational> up(nu.dim()), down(nu.dim());
  const Rational z_up = 1 + delta * mass_F, z_down = 1 - delta * mass_F;
  for (std::size_t j = 0; j < nu.dim(); ++j) {
    const Rational tilt = in_F[j] ? delta : Rational(0);
    up[j] = (1 + tilt) * nu[j] / z_up;
    down[j] = (1 - tilt) * nu[j] / z_down;
  }
  return {{Posterior(std::move(up)), z_up / 2}, {Posterior(std::move(down)), z_down / 2}};
}

// Searches for a permissible strict spread of gamma obtained by tilting one
// non-dichotomy atom, the construction used to show dichotomy points are the
// only undominated ones.  Returns the spread when some atom admits one;
// dichotomy-only gammas admit none.
inline std::optional<BeliefDistribution> inferential_dominating_split(
    const BeliefDistribution& gamma, const Posterior& prior_theta, const Rational& lambda) {
  if (gamma.dim() != prior_theta.dim()) {
    throw input_error("gamma must live on the attribute simplex");
  }
  const std::size_t m = prior_theta.dim();
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    const Posterior& nu = gamma.atom(n);
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << m); ++mask) {
      std::vector<bool> in_F(m);
      // Band edges of the density ratio inside and outside F.
      std::optional<Rational> a, b, c, d;  // max_F, min_F, max_F', min_F'
      for (std::size_t j = 0; j < m; ++j) {
        in_F[j] = (mask & (std::size_t{1} << j)) != 0;
        Rational r = nu[j] / prior_theta[j];
        if (in_F[j]) {
          if (!a || r > *a) a = r;
          if (!b || r < *b) b = r;
        } else {
          if (!c || r > *c) c = r;
          if (!d || r < *d) d = r;
        }
      }
      // Both children stay within the band iff the tilt keeps the top of
      // the raised part under lambda times the untouched bottom, and the
      // untouched top under lambda times the lowered bottom.
      if (*a >= lambda * *d || *c >= lambda * *b) continue;
      const Rational room_up = lambda * *d / *a - 1;
      const Rational room_down = 1 - *c / (lambda * *b);
      const Rational delta = std::min(room_up, room_down) / 2;
      auto [child_up, child_down] = ratio_tilt_split(nu, in_F, delta);
      if (!detail::ratio_band_ok(child_up.first, prior_theta, lambda) ||
          !detail::ratio_band_ok(child_down.first, prior_theta, lambda)) {
        throw contract_error("tilt split left the permissible band");
      }
      std::vector<std::pair<Posterior, Rational>> raw;
      for (std::size_t k = 0; k < gamma.size(); ++k) {
        if (k != n) raw.emplace_back(gamma.atom(k), gamma.prob(k));
      }
      raw.emplace_back(child_up.first, gamma.prob(n) * child_up.second);
      raw.emplace_back(child_down.first, gamma.prob(n) * child_down.second);
      return BeliefDistribution::make(std::move(raw));
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Posterior-mean frontier (two-point menus).
// ---------------------------------------------------------------------------

// True iff gamma has the frontier shape: every atom is supported on at most
// two attribute values (with distinct f-values when two), and the induced
// mean distribution equals kappa_bar exactly.
inline bool posterior_mean_frontier_check(const BeliefDistribution& gamma,
                                          const PosteriorMean& spec) {
  if (gamma.dim() != spec.f_values.size()) {
    throw input_error("gamma must live on the attribute simplex");
  }
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < gamma.dim(); ++j) {
      if (gamma.atom(n)[j] > 0) support.push_back(j);
    }
    if (support.size() > 2) return false;
    if (support.size() == 2 &&
        spec.f_values[support[0]] == spec.f_values[support[1]]) {
      return false;
    }
  }
  return kappa_of(gamma, spec.f_values) == spec.kappa_bar;
}

// Builds a frontier gamma for kappa_bar as a mixture over the menu of
// two-point posteriors: for each atom y of kappa_bar, every attribute pair
// with f-values bracketing y (mixing weight pinned by the mean) plus every
// single attribute with f-value exactly y.  Weights solve total-per-atom and
// barycenter equations; the lexicographically least solution is returned.
inline BeliefDistribution posterior_mean_frontier_construct(const PosteriorMean& spec,
                                                            const Posterior& prior_theta) {
  validate_privacy_spec(PrivacySpec{spec}, prior_theta);
  const std::size_t m = prior_theta.dim();
  std::vector<Posterior> menu;
  std::vector<std::size_t> menu_atom;  // kappa_bar atom index per menu entry
  for (std::size_t k = 0; k < spec.kappa_bar.size(); ++k) {
    const Rational& y = spec.kappa_bar.value(k);
    for (std::size_t j = 0; j < m; ++j) {
      if (spec.f_values[j] == y) {
        std::vector<Rational> w(m, Rational(0));
        w[j] = 1;
        menu.emplace_back(std::move(w));
        menu_atom.push_back(k);
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (spec.f_values[a] >= y || spec.f_values[b] <= y) continue;
        const Rational alpha = (spec.f_values[b] - y) / (spec.f_values[b] - spec.f_values[a]);
        std::vector<Rational> w(m, Rational(0));
        w[a] = alpha;
        w[b] = 1 - alpha;
        menu.emplace_back(std::move(w));
        menu_atom.push_back(k);
      }
    }
  }
  if (menu.empty()) {
    throw infeasible_error("frontier not attainable with a two-point menu");
  }
  LinearSystem sys(menu.size());
  for (std::size_t e = 0; e < menu.size(); ++e) sys.lower[e] = Rational(0);
  for (std::size_t k = 0; k < spec.kappa_bar.size(); ++k) {
    std::vector<Rational> row(menu.size(), Rational(0));
    for (std::size_t e = 0; e < menu.size(); ++e) {
      if (menu_atom[e] == k) row[e] = 1;
    }
    sys.add_eq(std::move(row), spec.kappa_bar.prob(k));
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Rational> row(menu.size());
    for (std::size_t e = 0; e < menu.size(); ++e) row[e] = menu[e][j];
    sys.add_eq(std::move(row), prior_theta[j]);
  }
  auto w = lex_min_point(sys);
  if (!w) {
    throw infeasible_error("frontier not attainable with a two-point menu");
  }
  std::vector<std::pair<Posterior, Rational>> raw;
  for (std::size_t e = 0; e < menu.size(); ++e) raw.emplace_back(menu[e], (*w)[e]);
  auto gamma = BeliefDistribution::make(std::move(raw));
  if (!posterior_mean_frontier_check(gamma, spec)) {
    throw contract_error("constructed menu mixture is not a frontier distribution");
  }
  return gamma;
}

// ---------------------------------------------------------------------------
// Frontier dispatchers across spec variants.
// ---------------------------------------------------------------------------

// True iff gamma is Blackwell-undominated within the permissible set.
inline bool frontier_membership(const BeliefDistribution& gamma, const PrivacySpec& spec,
                                const Posterior& prior_theta) {
  validate_privacy_spec(spec, prior_theta);
  if (const auto* sb = std::get_if<SingleBound>(&spec)) {
    return compare(gamma, sb->bound).relation == Relation::equivalent;
  }
  if (const auto* ep = std::get_if<ExPost>(&spec)) {
    std::set<std::vector<Rational>> vertices;
    for (auto& v : enumerate_vertices(ep->region)) vertices.insert(std::move(v));
    for (std::size_t n = 0; n < gamma.size(); ++n) {
      if (!vertices.count(gamma.atom(n).weights())) return false;
    }
    return true;
  }
  if (const auto* inf = std::get_if<Inferential>(&spec)) {
    return inferential_frontier_membership(gamma, prior_theta, inf->lambda);
  }
  return posterior_mean_frontier_check(gamma, std::get<PosteriorMean>(spec));
}

// A canonical frontier distribution for the spec (Bayes-plausible for the
// prior marginal and passing frontier_membership).
inline BeliefDistribution frontier_construct(const PrivacySpec& spec,
                                             const Posterior& prior_theta) {
  validate_privacy_spec(spec, prior_theta);
  if (const auto* sb = std::get_if<SingleBound>(&spec)) {
    return sb->bound;
  }
  if (const auto* ep = std::get_if<ExPost>(&spec)) {
    return frontier_distribution(expost_frontier_support(*ep), prior_theta);
  }
  if (const auto* inf = std::get_if<Inferential>(&spec)) {
    std::vector<Posterior> support;
    for (auto& p : inferential_frontier_support(prior_theta, inf->lambda)) {
      support.push_back(std::move(p.posterior));
    }
    return frontier_distribution(support, prior_theta);
  }
  return posterior_mean_frontier_construct(std::get<PosteriorMean>(spec), prior_theta);
}

}  // namespace pcs
