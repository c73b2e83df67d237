#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pcs/state_space.hpp"

namespace pcs {

// ---------------------------------------------------------------------------
// Quantile signals: a realization drawn from [0, 1] whose conditional law
// given the state is piecewise-constant on a shared rational grid, so every
// integral is an exact finite sum.
// ---------------------------------------------------------------------------

struct QuantileSignal {
  StateSpace space;
  // 0 = t_0 < t_1 < ... < t_m = 1; cell k is [t_k, t_{k+1}].
  std::vector<Rational> breakpoints;
  // density[omega][cell]: conditional density of the realization given the
  // state.  Rows of zero-probability states are identically zero.
  std::vector<std::vector<Rational>> density;

  std::size_t num_cells() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }

  Rational cell_length(std::size_t k) const { return breakpoints[k + 1] - breakpoints[k]; }
};

// Structural invariants: a valid grid over [0, 1], nonnegative densities of
// the right shape, and every row integrating to one (or identically zero for
// a state the conditional puts no mass on).
inline void validate_quantile_signal(const QuantileSignal& q) {
  if (q.breakpoints.size() < 2 || q.breakpoints.front() != 0 || q.breakpoints.back() != 1) {
    throw input_error("breakpoints must run from 0 to 1");
  }
  for (std::size_t k = 0; k + 1 < q.breakpoints.size(); ++k) {
    if (q.breakpoints[k] >= q.breakpoints[k + 1]) {
      throw input_error("breakpoints must be strictly increasing");
    }
  }
  if (q.density.size() != q.space.num_omega()) {
    throw input_error("density must have one row per state");
  }
  for (const auto& row : q.density) {
    if (row.size() != q.num_cells()) throw input_error("density row length mismatch");
    Rational total = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] < 0) throw input_error("densities must be nonnegative");
      total += row[k] * q.cell_length(k);
    }
    if (total != 0 && total != 1) {
      throw input_error("each density row must integrate to one (or be zero)");
    }
  }
}

// The quantile signal of mu: within each attribute block, states are laid
// out in declaration order as consecutive subintervals of [0, 1] with
// lengths mu(omega | theta), carrying the flat density 1/length.  The grid
// is the union of all block cut points.
inline QuantileSignal quantile_signal(const Posterior& mu, const StateSpace& space) {
  if (mu.dim() != space.num_omega()) {
    throw input_error("posterior must live on the state space");
  }
  const Posterior mu_theta = marginal_theta(mu, space);

  std::set<Rational> cuts{Rational(0), Rational(1)};
  for (std::size_t j = 0; j < space.num_theta(); ++j) {
    if (mu_theta[j] == 0) continue;
    Rational running = 0;
    for (std::size_t i : space.theta_block(j)) {
      running += mu[i] / mu_theta[j];
      if (running > 0 && running < 1) cuts.insert(running);
    }
  }
  QuantileSignal q{space, std::vector<Rational>(cuts.begin(), cuts.end()),
                   std::vector<std::vector<Rational>>(
                       space.num_omega(), std::vector<Rational>(cuts.size() - 1, Rational(0)))};

  for (std::size_t j = 0; j < space.num_theta(); ++j) {
    if (mu_theta[j] == 0) continue;
    Rational lo = 0;
    for (std::size_t i : space.theta_block(j)) {
      const Rational len = mu[i] / mu_theta[j];
      if (len == 0) continue;
      const Rational hi = lo + len;
      for (std::size_t k = 0; k < q.num_cells(); ++k) {
        if (q.breakpoints[k] >= lo && q.breakpoints[k + 1] <= hi) {
          q.density[i][k] = 1 / len;
        }
      }
      lo = hi;
    }
  }
  return q;
}

// A rearrangement target: a fresh grid over [0, 1] plus, for every state,
// the list of grid cells carrying that state's realization mass.
struct ReorderAssignment {
  std::vector<Rational> breakpoints;
  std::vector<std::vector<std::size_t>> cells;  // per state, cell indices
};

// Moves each state's realization mass onto the assigned cells, keeping the
// flat density value.  Within every attribute block the assigned cell-sets
// must partition the new grid and preserve each state's total length.
inline QuantileSignal reorder(const QuantileSignal& q, const ReorderAssignment& assignment) {
  validate_quantile_signal(q);
  if (assignment.breakpoints.size() < 2 || assignment.breakpoints.front() != 0 ||
      assignment.breakpoints.back() != 1) {
    throw input_error("breakpoints must run from 0 to 1");
  }
  for (std::size_t k = 0; k + 1 < assignment.breakpoints.size(); ++k) {
    if (assignment.breakpoints[k] >= assignment.breakpoints[k + 1]) {
      throw input_error("breakpoints must be strictly increasing");
    }
  }
  if (assignment.cells.size() != q.space.num_omega()) {
    throw input_error("assignment must list cells for every state");
  }
  const std::size_t new_cells = assignment.breakpoints.size() - 1;
  auto new_length = [&](std::size_t k) {
    return assignment.breakpoints[k + 1] - assignment.breakpoints[k];
  };

  QuantileSignal out{q.space, assignment.breakpoints,
                     std::vector<std::vector<Rational>>(
                         q.space.num_omega(), std::vector<Rational>(new_cells, Rational(0)))};
  for (std::size_t i = 0; i < q.space.num_omega(); ++i) {
    // The flat density value of the state's current row, if any.
    std::optional<Rational> value;
    Rational old_length = 0;
    for (std::size_t k = 0; k < q.num_cells(); ++k) {
      if (q.density[i][k] == 0) continue;
      if (value && *value != q.density[i][k]) {
        throw input_error("reorder requires a single density value per state");
      }
      value = q.density[i][k];
      old_length += q.cell_length(k);
    }
    if (!value) {
      if (!assignment.cells[i].empty()) {
        throw input_error("zero-mass states must keep an empty cell-set");
      }
      continue;
    }
    Rational assigned_length = 0;
    for (std::size_t k : assignment.cells[i]) {
      if (k >= new_cells) throw input_error("assigned cell index out of range");
      assigned_length += new_length(k);
      out.density[i][k] = *value;
    }
    if (assigned_length != old_length) {
      throw input_error("assigned length must match the state's conditional mass");
    }
  }

  // Within each block the assigned cells must tile the whole grid exactly.
  for (std::size_t j = 0; j < q.space.num_theta(); ++j) {
    std::vector<bool> owned(new_cells, false);
    bool block_active = false;
    for (std::size_t i : q.space.theta_block(j)) {
      for (std::size_t k : assignment.cells[i]) {
        if (owned[k]) throw input_error("a grid cell is assigned twice within a block");
        owned[k] = true;
      }
      block_active = block_active || !assignment.cells[i].empty();
    }
    if (block_active) {
      for (std::size_t k = 0; k < new_cells; ++k) {
        if (!owned[k]) throw input_error("assignment must cover the grid within each block");
      }
    }
  }
  return out;
}

// True iff observing the realization never moves the attribute belief: on
// every cell the marginal density of the realization is the same under
// every attribute value of positive mass.
inline bool conditional_privacy_check(const QuantileSignal& q, const Posterior& mu) {
  validate_quantile_signal(q);
  if (mu.dim() != q.space.num_omega()) {
    throw input_error("posterior must live on the state space");
  }
  const Posterior mu_theta = marginal_theta(mu, q.space);
  for (std::size_t k = 0; k < q.num_cells(); ++k) {
    std::optional<Rational> common;
    for (std::size_t j = 0; j < q.space.num_theta(); ++j) {
      if (mu_theta[j] == 0) continue;
      Rational marginal = 0;
      for (std::size_t i : q.space.theta_block(j)) {
        marginal += mu[i] / mu_theta[j] * q.density[i][k];
      }
      if (!common) {
        common = marginal;
      } else if (*common != marginal) {
        return false;
      }
    }
  }
  return true;
}

// True iff the realization pins down the state once the attribute is known:
// on every cell, each positive-mass attribute block has at most one state
// with positive density.
inline bool conditionally_revealing_check(const QuantileSignal& q, const Posterior& mu) {
  validate_quantile_signal(q);
  if (mu.dim() != q.space.num_omega()) {
    throw input_error("posterior must live on the state space");
  }
  const Posterior mu_theta = marginal_theta(mu, q.space);
  for (std::size_t k = 0; k < q.num_cells(); ++k) {
    for (std::size_t j = 0; j < q.space.num_theta(); ++j) {
      if (mu_theta[j] == 0) continue;
      std::size_t positive = 0;
      for (std::size_t i : q.space.theta_block(j)) {
        if (q.density[i][k] > 0) ++positive;
      }
      if (positive > 1) return false;
    }
  }
  return true;
}

}  // namespace pcs
