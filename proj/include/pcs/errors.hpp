#pragma once

#include <stdexcept>
#include <string>

namespace pcs {

// Caller handed us something malformed: ragged rows, dimension mismatches,
// weights that do not form a probability vector, unparsable rationals.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The object the caller asked for does not exist (infeasible linear system,
// prior not representable over a support, synthesis refused off-frontier).
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition or internal invariant was violated, e.g. vertex
// enumeration on an unbounded region or a solver returning a point that fails
// re-verification.  These indicate bugs, not bad data.
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pcs
