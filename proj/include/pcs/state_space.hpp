#pragma once

#include <set>
#include <string>
#include <vector>

#include "pcs/belief.hpp"

namespace pcs {

// A finite payoff-relevant state space Omega, a finite sensitive attribute
// set Theta, the attribute map omega -> theta, and a full-support prior on
// Omega.  The attribute map must be total and surjective.
class StateSpace {
 public:
  StateSpace(std::vector<std::string> omega_labels, std::vector<std::string> theta_labels,
             std::vector<std::size_t> theta_map, Posterior prior)
      : omega_(std::move(omega_labels)),
        theta_(std::move(theta_labels)),
        map_(std::move(theta_map)),
        prior_(std::move(prior)) {
    if (omega_.empty() || theta_.empty()) {
      throw input_error("state and attribute label sets must be nonempty");
    }
    for (const auto* labels : {&omega_, &theta_}) {
      std::set<std::string> seen(labels->begin(), labels->end());
      if (seen.size() != labels->size()) throw input_error("labels must be distinct");
      if (seen.count("")) throw input_error("labels must be nonempty strings");
    }
    if (map_.size() != omega_.size()) {
      throw input_error("attribute map must cover every state");
    }
    blocks_.resize(theta_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (map_[i] >= theta_.size()) throw input_error("attribute map index out of range");
      blocks_[map_[i]].push_back(i);
    }
    for (const auto& block : blocks_) {
      if (block.empty()) throw input_error("attribute map must be surjective");
    }
    if (prior_.dim() != omega_.size()) throw input_error("prior dimension mismatch");
    for (std::size_t i = 0; i < prior_.dim(); ++i) {
      if (prior_[i] == 0) throw input_error("prior must have full support");
    }
  }

  std::size_t num_omega() const { return omega_.size(); }
  std::size_t num_theta() const { return theta_.size(); }
  const std::string& omega_label(std::size_t i) const { return omega_[i]; }
  const std::string& theta_label(std::size_t j) const { return theta_[j]; }
  std::size_t theta_of(std::size_t i) const { return map_[i]; }
  // States mapping to attribute j, in declaration order.
  const std::vector<std::size_t>& theta_block(std::size_t j) const { return blocks_[j]; }
  const Posterior& prior() const { return prior_; }

 private:
  std::vector<std::string> omega_;
  std::vector<std::string> theta_;
  std::vector<std::size_t> map_;
  Posterior prior_;
  std::vector<std::vector<std::size_t>> blocks_;
};

// Pushes a posterior on Omega forward through the attribute map.
inline Posterior marginal_theta(const Posterior& mu, const StateSpace& space) {
  if (mu.dim() != space.num_omega()) throw input_error("posterior dimension mismatch");
  std::vector<Rational> out(space.num_theta(), Rational(0));
  for (std::size_t i = 0; i < mu.dim(); ++i) out[space.theta_of(i)] += mu[i];
  return Posterior(std::move(out));
}

// Pushes a whole belief distribution on Omega forward; atoms with equal
// attribute marginals merge.
inline BeliefDistribution marginal_theta_belief(const BeliefDistribution& tau,
                                                const StateSpace& space) {
  std::vector<std::pair<Posterior, Rational>> raw;
  raw.reserve(tau.size());
  for (std::size_t n = 0; n < tau.size(); ++n) {
    raw.emplace_back(marginal_theta(tau.atom(n), space), tau.prob(n));
  }
  return BeliefDistribution::make(std::move(raw));
}

// A finite-realization signal: rows[omega][s] = P(realization s | omega).
struct SignalKernel {
  std::vector<std::vector<Rational>> rows;

  void validate(std::size_t num_states) const {
    if (rows.size() != num_states) throw input_error("kernel needs one row per state");
    if (rows.empty() || rows.front().empty()) {
      throw input_error("kernel needs at least one realization");
    }
    const std::size_t width = rows.front().size();
    for (const auto& row : rows) {
      if (row.size() != width) throw input_error("kernel rows must have equal width");
      for (const auto& p : row) {
        if (p < 0) throw input_error("kernel entries must be nonnegative");
      }
      if (vector_sum(row) != 1) throw input_error("kernel rows must sum to 1");
    }
  }
};

// The distribution over posteriors a signal induces under the prior:
// realization s occurs with probability sum_i prior(i) rows[i][s] and leads
// to the Bayes posterior; zero-probability realizations vanish and equal
// posteriors merge.
inline BeliefDistribution induced_belief_distribution(const SignalKernel& kernel,
                                                      const StateSpace& space) {
  kernel.validate(space.num_omega());
  const std::size_t width = kernel.rows.front().size();
  std::vector<std::pair<Posterior, Rational>> raw;
  for (std::size_t s = 0; s < width; ++s) {
    Rational p = 0;
    for (std::size_t i = 0; i < space.num_omega(); ++i) {
      p += space.prior()[i] * kernel.rows[i][s];
    }
    if (p == 0) {
      continue;
    }
    std::vector<Rational> w(space.num_omega());
    for (std::size_t i = 0; i < space.num_omega(); ++i) {
      w[i] = space.prior()[i] * kernel.rows[i][s] / p;
    }
    raw.emplace_back(Posterior(std::move(w)), p);
  }
  return BeliefDistribution::make(std::move(raw));
}

}  // namespace pcs
