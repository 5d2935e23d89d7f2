#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nnsparse {

// Relative tolerance for the normalization invariants (unit column sums,
// unit target sum).
inline constexpr double kRelTol = 1e-9;

// Values in (-kNonnegClamp, 0) are rounding noise from decimal round trips
// and are snapped to zero.  Anything more negative is rejected.
inline constexpr double kNonnegClamp = 1e-12;

enum class Errc {
  invalid_argument,
  parse,
  infeasible,
  insufficient_samples,
  no_candidates,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

using RowIndex = std::int32_t;
using ColId = std::int32_t;

// Sparse nonnegative column.  Entries are (row, value) pairs sorted by row
// with unique rows and strictly positive values once canonicalized.
struct SparseVec {
  std::vector<std::pair<RowIndex, double>> entries;

  double l1() const {
    double s = 0;
    for (const auto& [r, v] : entries) s += v;
    return s;
  }

  // Sorts by row, merges duplicate rows, snaps clamp-window negatives to
  // zero, drops exact zeros.  Rejects entries below the clamp window.
  void canonicalize();

  bool operator==(const SparseVec&) const = default;
};

// Column-sparse system before normalization, as read from disk or produced
// by a generator.  Column ids are 0..n-1 in storage order.
struct RawSystem {
  RowIndex m = 0;
  ColId n = 0;
  std::vector<SparseVec> columns;  // size n
  std::vector<double> b;           // size m

  bool operator==(const RawSystem&) const = default;
};

// Normalized system: every stored column has unit l1 mass, the target b sums
// to one.  Columns that were identically zero, or that put mass on rows
// where b is zero, are dropped; their original ids are recorded so that
// solutions can keep referring to input coordinates.
struct NonnegSystem {
  RowIndex m = 0;
  ColId n_input = 0;                 // column count before drops
  std::vector<SparseVec> columns;    // stored columns, unit l1
  std::vector<ColId> col_ids;        // original id of each stored column (ascending)
  std::vector<double> col_scale;     // original l1 mass of each stored column
  std::vector<double> b;             // size m, sums to 1
  double b_scale = 1.0;              // original l1 mass of b
  std::vector<ColId> dropped_columns;

  std::size_t n_stored() const { return columns.size(); }
  std::optional<std::size_t> stored_index(ColId id) const;
};

// Scales b to unit l1 mass and every column to unit l1 mass, dropping
// zero columns and columns supported on zero rows of b.  Fails if b is all
// zero (degenerate target) or if every column is dropped (no usable
// support).
NonnegSystem normalize_system(const RawSystem& raw);

// Convenience wrapper for dense column-major input.
NonnegSystem normalize_system(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& b);

// Nonnegative weights over original column ids.  Entries are strictly
// positive; l1 is kept alongside for cheap renormalization checks.
struct SparseSolution {
  std::map<ColId, double> entries;
  double l1 = 0;

  void add(ColId id, double w);
  std::size_t support() const { return entries.size(); }
  bool operator==(const SparseSolution&) const = default;
};

// Derived solver constants.  delta = epsilon/16 controls both the potential
// base (1+delta) and the step grid spacing; c = 16/epsilon enters the lower
// bound 1/(c*k) on step sizes; psi_target = 1/delta^2 is the mass at which
// the potential argument guarantees the target residual; t_theory is the
// iteration count that reaches psi_target on minimum-size steps.
struct SolverParams {
  int k = 1;
  double epsilon = 0.1;
  double delta = 0;
  double c = 0;
  double psi_target = 0;
  long t_theory = 0;
  long budget = 0;

  // budget_override == 0 picks min(t_theory, ceil(50*k/epsilon)), a desk
  // scale default; the theory count is kept available in t_theory.
  static SolverParams make(int k, double epsilon, long budget_override = 0);
};

// Certificate that an approximately feasible sparse solution exists:
// weights x over original column ids with at most k entries such that, in
// normalized coordinates, ||A x||_1 = 1 and (A x)_j <= (1 + eps0) * b_j.
struct Witness {
  SparseSolution x;
  double eps0 = 0;
  int k = 0;

  bool operator==(const Witness&) const = default;
};

}  // namespace nnsparse
