#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "pcs/rational.hpp"

namespace pcs {

// A finite-support probability distribution on the rational line, stored
// canonically: values strictly increasing, probabilities positive and
// summing to one.
class ScalarDistribution {
 public:
  static ScalarDistribution make(std::vector<std::pair<Rational, Rational>> raw) {
    if (raw.empty()) throw input_error("scalar distribution needs at least one atom");
    Rational total = 0;
    for (const auto& [value, prob] : raw) {
      if (prob < 0) throw input_error("atom probabilities must be nonnegative");
      total += prob;
    }
    if (total != 1) throw input_error("atom probabilities must sum to 1");
    std::sort(raw.begin(), raw.end());
    ScalarDistribution out;
    for (auto& [value, prob] : raw) {
      if (prob == 0) continue;
      if (!out.values_.empty() && out.values_.back() == value) {
        out.probs_.back() += prob;
      } else {
        out.values_.push_back(std::move(value));
        out.probs_.push_back(std::move(prob));
      }
    }
    return out;
  }

  std::size_t size() const { return values_.size(); }
  const Rational& value(std::size_t k) const { return values_[k]; }
  const Rational& prob(std::size_t k) const { return probs_[k]; }

  Rational mean() const {
    Rational m = 0;
    for (std::size_t k = 0; k < size(); ++k) m += values_[k] * probs_[k];
    return m;
  }

  // Integrated upper tail E[(X - x)^+]; piecewise linear in x.
  Rational stop_loss(const Rational& x) const {
    Rational s = 0;
    for (std::size_t k = 0; k < size(); ++k) {
      if (values_[k] > x) s += probs_[k] * (values_[k] - x);
    }
    return s;
  }

  friend bool operator==(const ScalarDistribution& a, const ScalarDistribution& b) {
    return a.values_ == b.values_ && a.probs_ == b.probs_;
  }

 private:
  ScalarDistribution() = default;
  std::vector<Rational> values_;
  std::vector<Rational> probs_;
};

inline ScalarDistribution scalar_point_mass(Rational value) {
  return ScalarDistribution::make({{std::move(value), Rational(1)}});
}

// Decides whether `spread` is a mean-preserving spread of `contraction` on
// the line.  Exact test: equal means plus the stop-loss comparison
// E[(S-x)^+] >= E[(C-x)^+] at every atom of either distribution (both sides
// are piecewise linear with kinks only at atoms, and they agree at +/-
// infinity once means match, so checking kinks decides the whole line).
inline bool mps_1d_check(const ScalarDistribution& spread,
                         const ScalarDistribution& contraction) {
  if (spread.mean() != contraction.mean()) return false;
  std::vector<Rational> grid;
  for (std::size_t k = 0; k < spread.size(); ++k) grid.push_back(spread.value(k));
  for (std::size_t k = 0; k < contraction.size(); ++k) grid.push_back(contraction.value(k));
  for (const auto& x : grid) {
    if (spread.stop_loss(x) < contraction.stop_loss(x)) return false;
  }
  return true;
}

}  // namespace pcs
