#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "pcs/rational.hpp"

namespace pcs {

// A probability vector over a finite, ordered label set.  Weights are
// validated on construction: nonnegative and summing to exactly one.
class Posterior {
 public:
  explicit Posterior(std::vector<Rational> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw input_error("posterior needs at least one weight");
    for (const auto& x : w_) {
      if (x < 0) throw input_error("posterior weights must be nonnegative");
    }
    if (vector_sum(w_) != 1) throw input_error("posterior weights must sum to 1");
  }

  std::size_t dim() const { return w_.size(); }
  const Rational& operator[](std::size_t i) const { return w_[i]; }
  const std::vector<Rational>& weights() const { return w_; }

  friend bool operator==(const Posterior& a, const Posterior& b) { return a.w_ == b.w_; }
  friend bool operator<(const Posterior& a, const Posterior& b) { return a.w_ < b.w_; }

 private:
  std::vector<Rational> w_;
};

// A finite-support distribution over posteriors.  Stored canonically:
// zero-probability atoms dropped, equal atoms merged, atoms sorted
// lexicographically by weight vector; probabilities are positive and sum
// to one.  Two equal distributions therefore compare equal structurally.
class BeliefDistribution {
 public:
  static BeliefDistribution make(std::vector<std::pair<Posterior, Rational>> raw) {
    if (raw.empty()) throw input_error("belief distribution needs at least one atom");
    Rational total = 0;
    const std::size_t dim = raw.front().first.dim();
    for (const auto& [atom, prob] : raw) {
      if (atom.dim() != dim) throw input_error("belief atoms must share a dimension");
      if (prob < 0) throw input_error("atom probabilities must be nonnegative");
      total += prob;
    }
    if (total != 1) throw input_error("atom probabilities must sum to 1");
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    BeliefDistribution out;
    for (auto& [atom, prob] : raw) {
      if (prob == 0) continue;
      if (!out.atoms_.empty() && out.atoms_.back() == atom) {
        out.probs_.back() += prob;
      } else {
        out.atoms_.push_back(std::move(atom));
        out.probs_.push_back(std::move(prob));
      }
    }
    return out;
  }

  std::size_t size() const { return atoms_.size(); }
  std::size_t dim() const { return atoms_.front().dim(); }
  const Posterior& atom(std::size_t n) const { return atoms_[n]; }
  const Rational& prob(std::size_t n) const { return probs_[n]; }

  // The mean posterior sum_n prob(n) * atom(n).
  Posterior barycenter() const {
    std::vector<Rational> mean(dim(), Rational(0));
    for (std::size_t n = 0; n < size(); ++n) {
      for (std::size_t d = 0; d < dim(); ++d) mean[d] += probs_[n] * atoms_[n][d];
    }
    return Posterior(std::move(mean));
  }

  friend bool operator==(const BeliefDistribution& a, const BeliefDistribution& b) {
    return a.atoms_ == b.atoms_ && a.probs_ == b.probs_;
  }

 private:
  BeliefDistribution() = default;
  std::vector<Posterior> atoms_;
  std::vector<Rational> probs_;
};

// Point mass on a single posterior.
inline BeliefDistribution point_mass(Posterior atom) {
  std::vector<std::pair<Posterior, Rational>> raw;
  raw.emplace_back(std::move(atom), Rational(1));
  return BeliefDistribution::make(std::move(raw));
}

// Exact check that the distribution averages to the reference posterior.
inline bool bayes_plausible(const BeliefDistribution& dist, const Posterior& reference) {
  if (dist.dim() != reference.dim()) {
    throw input_error("reference posterior dimension mismatch");
  }
  return dist.barycenter() == reference;
}

}  // namespace pcs
