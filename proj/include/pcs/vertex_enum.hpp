#pragma once

#include <set>
#include <vector>

#include "pcs/simplex.hpp"

namespace pcs {
namespace detail {

// In-place Gauss-Jordan on an augmented matrix (last column = rhs).
// Returns the list of pivot columns; deterministic (first nonzero pivot).
inline std::vector<std::size_t> row_reduce(std::vector<std::vector<Rational>>& m,
                                           std::size_t num_vars) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < num_vars && row < m.size(); ++col) {
    std::size_t pr = row;
    while (pr < m.size() && m[pr][col] == 0) ++pr;
    if (pr == m.size()) continue;
    std::swap(m[row], m[pr]);
    const Rational piv = m[row][col];
    for (auto& v : m[row]) {
      if (v != 0) v /= piv;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][col] == 0) continue;
      const Rational f = m[i][col];
      for (std::size_t k = col; k <= num_vars; ++k) {
        if (m[row][k] != 0) m[i][k] -= f * m[row][k];
      }
    }
    pivot_cols.push_back(col);
    ++row;
  }
  return pivot_cols;
}

// Rank of the coefficient matrix of a set of rows.
inline std::size_t coefficient_rank(const std::vector<LinearRow>& rows,
                                    std::size_t num_vars) {
  std::vector<std::vector<Rational>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<Rational> row = r.coeffs;
    row.push_back(Rational(0));
    m.push_back(std::move(row));
  }
  return row_reduce(m, num_vars).size();
}

// Solves rows . x = rhs when the solution is unique; absent when the system
// is underdetermined or inconsistent.
inline std::optional<std::vector<Rational>> unique_solution(
    const std::vector<const LinearRow*>& rows, std::size_t num_vars) {
  std::vector<std::vector<Rational>> m;
  m.reserve(rows.size());
  for (const auto* r : rows) {
    std::vector<Rational> row = r->coeffs;
    row.push_back(r->rhs);
    m.push_back(std::move(row));
  }
  const auto pivot_cols = row_reduce(m, num_vars);
  for (std::size_t i = pivot_cols.size(); i < m.size(); ++i) {
    if (m[i][num_vars] != 0) return std::nullopt;  // 0 = nonzero
  }
  if (pivot_cols.size() < num_vars) return std::nullopt;
  std::vector<Rational> x(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) {
    x[pivot_cols[i]] = m[i][num_vars];
  }
  return x;
}

}  // namespace detail

// All vertices (extreme points) of the feasible region, sorted
// lexicographically.  The region must be bounded; throws contract_error
// otherwise.  Returns an empty list for an infeasible system.
//
// Method: with r the rank of the equality rows, every vertex is the unique
// solution of the equalities plus some num_vars - r inequality or bound
// rows made tight, so all candidate basic solutions are enumerated and
// filtered for feasibility.  Intended for desk-scale systems; the subset
// count grows combinatorially.
inline std::vector<std::vector<Rational>> enumerate_vertices(const LinearSystem& sys) {
  sys.validate();
  if (!feasible_point(sys)) return {};
  if (!is_bounded(sys)) {
    throw contract_error("vertex enumeration requires a bounded region");
  }

  // Tightenable rows: inequalities first, then bounds in variable order.
  std::vector<LinearRow> tight_storage;
  for (std::size_t j = 0; j < sys.num_vars; ++j) {
    if (sys.lower[j]) {
      LinearRow r{std::vector<Rational>(sys.num_vars, Rational(0)), *sys.lower[j]};
      r.coeffs[j] = 1;
      tight_storage.push_back(std::move(r));
    }
    if (sys.upper[j]) {
      LinearRow r{std::vector<Rational>(sys.num_vars, Rational(0)), *sys.upper[j]};
      r.coeffs[j] = 1;
      tight_storage.push_back(std::move(r));
    }
  }
  std::vector<const LinearRow*> candidates;
  for (const auto& r : sys.ineq_rows) candidates.push_back(&r);
  for (const auto& r : tight_storage) candidates.push_back(&r);

  const std::size_t rank = detail::coefficient_rank(sys.eq_rows, sys.num_vars);
  const std::size_t k = sys.num_vars - rank;
  std::set<std::vector<Rational>> found;
  if (k > candidates.size()) {
    // A bounded region with fewer tightenable rows than free dimensions is
    // impossible; feasibility plus boundedness already rule this out.
    return {};
  }

  std::vector<const LinearRow*> stacked;
  for (const auto& r : sys.eq_rows) stacked.push_back(&r);
  stacked.resize(sys.eq_rows.size() + k);

  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) {
      stacked[sys.eq_rows.size() + i] = candidates[pick[i]];
    }
    if (auto x = detail::unique_solution(stacked, sys.num_vars)) {
      if (sys.satisfied_by(*x)) found.insert(std::move(*x));
    }
    // Advance to the next k-subset of candidates.
    std::size_t i = k;
    while (i-- > 0) {
      if (pick[i] + (k - i) < candidates.size()) break;
      if (i == 0) {
        return {found.begin(), found.end()};
      }
    }
    if (k == 0) return {found.begin(), found.end()};
    ++pick[i];
    for (std::size_t t = i + 1; t < k; ++t) pick[t] = pick[t - 1] + 1;
  }
}

}  // namespace pcs
