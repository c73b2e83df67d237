#pragma once

#include <optional>
#include <vector>

#include "pcs/rational.hpp"

namespace pcs {

// One linear row: coeffs . x  (= | <=)  rhs, interpretation decided by which
// list of LinearSystem it sits in.
struct LinearRow {
  std::vector<Rational> coeffs;
  Rational rhs;
};

// A finite system of exact linear constraints over num_vars variables:
//   eq_rows:    coeffs . x == rhs
//   ineq_rows:  coeffs . x <= rhs
//   lower/upper: optional per-variable bounds.
// Rows are stored dense; everything stays rational.
struct LinearSystem {
  std::size_t num_vars = 0;
  std::vector<LinearRow> eq_rows;
  std::vector<LinearRow> ineq_rows;
  std::vector<std::optional<Rational>> lower;
  std::vector<std::optional<Rational>> upper;

  LinearSystem() = default;
  explicit LinearSystem(std::size_t n) : num_vars(n), lower(n), upper(n) {}

  void add_eq(std::vector<Rational> coeffs, Rational rhs) {
    eq_rows.push_back(LinearRow{std::move(coeffs), std::move(rhs)});
  }

  void add_ineq(std::vector<Rational> coeffs, Rational rhs) {
    ineq_rows.push_back(LinearRow{std::move(coeffs), std::move(rhs)});
  }

  // Throws input_error on ragged rows or bound vectors of the wrong length.
  void validate() const {
    if (lower.size() != num_vars || upper.size() != num_vars) {
      throw input_error("bound vectors must have one entry per variable");
    }
    for (const auto* rows : {&eq_rows, &ineq_rows}) {
      for (const auto& row : *rows) {
        if (row.coeffs.size() != num_vars) {
          throw input_error("row width does not match variable count");
        }
      }
    }
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (lower[j] && upper[j] && *lower[j] > *upper[j]) {
        throw input_error("variable lower bound exceeds upper bound");
      }
    }
  }

  // Exact membership test; used by the vertex enumerator and in tests.
  bool satisfied_by(const std::vector<Rational>& x) const {
    if (x.size() != num_vars) throw input_error("point dimension mismatch");
    for (const auto& row : eq_rows) {
      if (dot(row.coeffs, x) != row.rhs) return false;
    }
    for (const auto& row : ineq_rows) {
      if (dot(row.coeffs, x) > row.rhs) return false;
    }
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (lower[j] && x[j] < *lower[j]) return false;
      if (upper[j] && x[j] > *upper[j]) return false;
    }
    return true;
  }
};

}  // namespace pcs
