#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pcs/linear_system.hpp"

namespace pcs {
namespace detail {

// Exact two-phase simplex over a dense rational tableau.
//
// The system is rewritten in standard equality form A y = b, y >= 0, b >= 0:
//   * a variable with a lower bound is shifted so the bound becomes 0;
//   * a variable without a lower bound is split into a positive and a
//     negative part;
//   * upper bounds and inequality rows gain slack columns;
//   * every row receives an artificial column for phase 1.
//
// Pivot selection is Bland's rule (least eligible column index in, least
// basic variable index out among minimum-ratio rows), which guarantees
// termination and makes every answer deterministic.  After an objective has
// been minimized, block_nonoptimal_columns freezes all columns with a
// strictly positive reduced cost; subsequent objectives then optimize over
// the previous optimal face only.  Chaining coordinate objectives this way
// yields lexicographic minima without re-solving from scratch.
class SimplexTableau {
 public:
  explicit SimplexTableau(const LinearSystem& sys) : n_(sys.num_vars) {
    sys.validate();
    plus_col_.assign(n_, 0);
    minus_col_.assign(n_, npos);
    shift_.assign(n_, Rational(0));
    std::size_t ncols = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      plus_col_[j] = ncols++;
      if (sys.lower[j]) {
        shift_[j] = *sys.lower[j];
      } else {
        minus_col_[j] = ncols++;
      }
    }

    // Rows in original variable space: equalities, then inequalities, then
    // upper-bound rows.  Lower bounds are already absorbed by the shift.
    struct RawRow {
      const std::vector<Rational>* coeffs;
      std::vector<Rational> unit;  // storage for bound rows
      Rational rhs;
      bool is_eq;
    };
    std::vector<RawRow> raw;
    for (const auto& row : sys.eq_rows) {
      raw.push_back(RawRow{&row.coeffs, {}, row.rhs, true});
    }
    for (const auto& row : sys.ineq_rows) {
      raw.push_back(RawRow{&row.coeffs, {}, row.rhs, false});
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (sys.upper[j]) {
        RawRow r{nullptr, std::vector<Rational>(n_, Rational(0)), *sys.upper[j], false};
        r.unit[j] = 1;
        raw.push_back(std::move(r));
      }
    }

    const std::size_t m = raw.size();
    std::size_t slack_base = ncols;
    for (const auto& r : raw) {
      if (!r.is_eq) ++ncols;
    }
    std::size_t artificial_base = ncols;
    ncols += m;
    ncols_ = ncols;
    artificial_base_ = artificial_base;

    rows_.assign(m, std::vector<Rational>(ncols_ + 1, Rational(0)));
    basis_.assign(m, 0);
    blocked_.assign(ncols_, false);
    std::size_t next_slack = slack_base;
    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<Rational>& coeffs = raw[i].coeffs ? *raw[i].coeffs : raw[i].unit;
      Rational rhs = raw[i].rhs;
      auto& row = rows_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        if (coeffs[j] == 0) continue;
        row[plus_col_[j]] = coeffs[j];
        if (minus_col_[j] != npos) row[minus_col_[j]] = -coeffs[j];
        rhs -= coeffs[j] * shift_[j];
      }
      if (!raw[i].is_eq) row[next_slack++] = 1;
      row[ncols_] = rhs;
      if (rhs < 0) {
        for (auto& v : row) v = -v;
      }
      row[artificial_base + i] = 1;
      basis_[i] = artificial_base + i;
    }
  }

  // Minimizes the sum of artificials.  Returns false when the system is
  // infeasible; otherwise leaves a feasible basis with all artificials
  // blocked and redundant rows dropped.
  bool phase1() {
    std::vector<Rational> costs(ncols_, Rational(0));
    for (std::size_t c = artificial_base_; c < ncols_; ++c) costs[c] = 1;
    rebuild_cost(costs);
    run();
    if (objective_value() != 0) return false;
    // Drive surviving artificials out of the basis; a row where that is
    // impossible is linearly dependent and can be dropped.
    for (std::size_t i = rows_.size(); i-- > 0;) {
      if (basis_[i] < artificial_base_) continue;
      std::size_t c = npos;
      for (std::size_t j = 0; j < artificial_base_; ++j) {
        if (rows_[i][j] != 0) {
          c = j;
          break;
        }
      }
      if (c == npos) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        pivot(i, c);  // rhs is zero here, so feasibility is untouched
      }
    }
    for (std::size_t c = artificial_base_; c < ncols_; ++c) blocked_[c] = true;
    return true;
  }

  // Minimizes a linear objective over the original variables, starting from
  // the current feasible basis and honoring blocked columns.  Returns the
  // optimal value in original-variable terms.
  Rational minimize(const std::vector<Rational>& objective) {
    if (objective.size() != n_) throw input_error("objective length mismatch");
    std::vector<Rational> costs(ncols_, Rational(0));
    Rational constant = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (objective[j] == 0) continue;
      costs[plus_col_[j]] += objective[j];
      if (minus_col_[j] != npos) costs[minus_col_[j]] -= objective[j];
      constant += objective[j] * shift_[j];
    }
    rebuild_cost(costs);
    run();
    return objective_value() + constant;
  }

  // Freezes every nonbasic column whose reduced cost is strictly positive;
  // later pivots then stay on the optimal face of the objective just solved.
  void block_nonoptimal_columns() {
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (cost_[j] > 0) blocked_[j] = true;
    }
  }

  // Current basic solution mapped back to the original variables.
  std::vector<Rational> point() const {
    std::vector<Rational> col_val(ncols_, Rational(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      col_val[basis_[i]] = rows_[i][ncols_];
    }
    std::vector<Rational> x(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      x[j] = shift_[j] + col_val[plus_col_[j]];
      if (minus_col_[j] != npos) x[j] -= col_val[minus_col_[j]];
    }
    return x;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void rebuild_cost(const std::vector<Rational>& costs) {
    cost_.assign(ncols_ + 1, Rational(0));
    for (std::size_t j = 0; j < ncols_; ++j) cost_[j] = costs[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational f = cost_[basis_[i]];
      if (f == 0) continue;
      for (std::size_t k = 0; k <= ncols_; ++k) {
        if (rows_[i][k] != 0) cost_[k] -= f * rows_[i][k];
      }
    }
  }

  Rational objective_value() const { return -cost_[ncols_]; }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = rows_[r];
    const Rational piv = prow[c];
    if (piv != 1) {
      for (auto& v : prow) {
        if (v != 0) v /= piv;
      }
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || rows_[i][c] == 0) continue;
      const Rational f = rows_[i][c];
      for (std::size_t k = 0; k <= ncols_; ++k) {
        if (prow[k] != 0) rows_[i][k] -= f * prow[k];
      }
    }
    if (cost_[c] != 0) {
      const Rational f = cost_[c];
      for (std::size_t k = 0; k <= ncols_; ++k) {
        if (prow[k] != 0) cost_[k] -= f * prow[k];
      }
    }
    basis_[r] = c;
  }

  // Bland's rule main loop; throws when the restricted problem is unbounded.
  void run() {
    for (;;) {
      std::size_t entering = npos;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (!blocked_[j] && cost_[j] < 0) {
          entering = j;
          break;
        }
      }
      if (entering == npos) return;
      std::size_t leaving = npos;
      Rational best_ratio = 0;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational& a = rows_[i][entering];
        if (a <= 0) continue;
        Rational ratio = rows_[i][ncols_] / a;
        if (leaving == npos || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == npos) {
        throw contract_error("linear objective is unbounded on the region");
      }
      pivot(leaving, entering);
    }
  }

  std::size_t n_ = 0;
  std::size_t ncols_ = 0;
  std::size_t artificial_base_ = 0;
  std::vector<std::size_t> plus_col_;
  std::vector<std::size_t> minus_col_;  // npos when the variable is shifted
  std::vector<Rational> shift_;
  std::vector<std::vector<Rational>> rows_;  // width ncols_ + 1, last = rhs
  std::vector<Rational> cost_;
  std::vector<std::size_t> basis_;
  std::vector<bool> blocked_;
};

}  // namespace detail

// Any feasible point of the system, or absent when infeasible.  The result
// is deterministic (phase-1 basic solution under Bland's rule).
inline std::optional<std::vector<Rational>> feasible_point(const LinearSystem& sys) {
  detail::SimplexTableau tab(sys);
  if (!tab.phase1()) return std::nullopt;
  return tab.point();
}

// The lexicographically least feasible point: coordinates are minimized one
// at a time, each over the optimal face of the previous stages.  Requires
// each coordinate to be bounded below on the region (throws contract_error
// otherwise); absent when infeasible.
inline std::optional<std::vector<Rational>> lex_min_point(const LinearSystem& sys) {
  detail::SimplexTableau tab(sys);
  if (!tab.phase1()) return std::nullopt;
  std::vector<Rational> e(sys.num_vars, Rational(0));
  for (std::size_t j = 0; j < sys.num_vars; ++j) {
    e[j] = 1;
    tab.minimize(e);
    tab.block_nonoptimal_columns();
    e[j] = 0;
  }
  return tab.point();
}

// Maximizes objective . x.  Returns the optimal value together with the
// lexicographically least maximizer (ties on the optimal face are broken
// the same way as lex_min_point, keeping golden outputs stable).  Absent
// when infeasible; throws contract_error when unbounded above.
inline std::optional<std::pair<Rational, std::vector<Rational>>> maximize(
    const LinearSystem& sys, const std::vector<Rational>& objective) {
  detail::SimplexTableau tab(sys);
  if (!tab.phase1()) return std::nullopt;
  std::vector<Rational> neg(objective.size());
  for (std::size_t j = 0; j < objective.size(); ++j) neg[j] = -objective[j];
  const Rational value = -tab.minimize(neg);
  tab.block_nonoptimal_columns();
  std::vector<Rational> e(sys.num_vars, Rational(0));
  for (std::size_t j = 0; j < sys.num_vars; ++j) {
    e[j] = 1;
    tab.minimize(e);
    tab.block_nonoptimal_columns();
    e[j] = 0;
  }
  return std::make_pair(value, tab.point());
}

// True when the feasible region is bounded (or empty).  Decided exactly by
// maximizing each +/- coordinate direction over the recession cone
// intersected with the unit box.
inline bool is_bounded(const LinearSystem& sys) {
  sys.validate();
  LinearSystem cone(sys.num_vars);
  for (const auto& row : sys.eq_rows) cone.add_eq(row.coeffs, Rational(0));
  for (const auto& row : sys.ineq_rows) cone.add_ineq(row.coeffs, Rational(0));
  for (std::size_t j = 0; j < sys.num_vars; ++j) {
    cone.lower[j] = sys.lower[j] ? Rational(0) : Rational(-1);
    cone.upper[j] = sys.upper[j] ? Rational(0) : Rational(1);
  }
  detail::SimplexTableau tab(cone);
  tab.phase1();  // the cone always contains the origin
  std::vector<Rational> obj(sys.num_vars, Rational(0));
  for (std::size_t j = 0; j < sys.num_vars; ++j) {
    for (int sign : {+1, -1}) {
      obj[j] = sign;
      if (tab.minimize(obj) < 0) return false;  // nonzero recession direction
    }
    obj[j] = 0;
  }
  return true;
}

}  // namespace pcs
