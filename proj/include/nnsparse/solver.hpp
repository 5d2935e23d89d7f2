#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nnsparse/potential.hpp"
#include "nnsparse/types.hpp"

namespace nnsparse {

enum class StopRule {
  theory,    // stop once psi >= psi_target (or at the iteration budget)
  residual,  // additionally stop once the measured residual <= epsilon
};

enum class StopReason {
  psi_target,
  budget,
  residual_target,
};

const char* to_string(StopReason r);
const char* to_string(StopRule r);

struct TraceEntry {
  long iter = 0;  // 1-based step count
  ColId col = 0;  // original column id
  double theta = 0;
  double log_ratio = 0;
  double psi = 0;      // after the step
  double log_phi = 0;  // after the step
};

struct SolveReport {
  SparseSolution solution;  // mass normalized: weights sum to 1
  long iterations = 0;
  double residual = 0;  // final l1 residual
  std::vector<TraceEntry> trace;
  StopReason stop_reason = StopReason::budget;
};

struct Increment {
  std::size_t index = 0;  // storage index within the oracle
  ColId id = 0;           // original column id
  double theta = 0;
  double log_ratio = 0;
};

// Column access for the scan.  Columns must stay fixed for the duration of
// a solve.  best_increment may implement a fast path; when it returns a
// value it must be exactly the increment the default scan would select.
class ColumnOracle {
 public:
  virtual ~ColumnOracle() = default;
  virtual std::size_t column_count() const = 0;
  virtual const SparseVec& column(std::size_t index) const = 0;
  virtual ColId column_id(std::size_t index) const {
    return static_cast<ColId>(index);
  }
  virtual std::optional<Increment> best_increment(
      const SolverState& /*state*/, const SolverParams& /*params*/,
      std::span<const double> /*grid*/) const {
    return std::nullopt;
  }
};

// Oracle over a normalized system's stored columns; ids are the original
// column ids.
class SystemOracle final : public ColumnOracle {
 public:
  explicit SystemOracle(const NonnegSystem& system) : system_(&system) {}
  std::size_t column_count() const override {
    return system_->columns.size();
  }
  const SparseVec& column(std::size_t i) const override {
    return system_->columns[i];
  }
  ColId column_id(std::size_t i) const override {
    return system_->col_ids[i];
  }

 private:
  const NonnegSystem* system_;
};

// Step size grid: (1/(c*k)) * (1+delta)^t for t = 0, 1, ..., truncated
// before the first value exceeding psi_target (the first element is always
// kept).  Strictly increasing; the first element is exactly 1/(c*k).
std::vector<double> theta_grid(const SolverParams& params);

// Reusable buffers for the scan, including a flattened copy of the oracle
// columns with precomputed a_j/b_j ratios.  Columns are flattened once per
// solve; the oracle must not change underneath.
struct ScanWorkspace;
std::unique_ptr<ScanWorkspace, void (*)(ScanWorkspace*)> make_scan_workspace();

// One greedy step.  Selection contract:
//
//   rate0_i  = d/dtheta ln phi(x + theta e_i) at theta = 0
//            = ln(1+delta) * sum_j mu_j * a_ij / b_j
//   thresh   = min_i rate0_i + 0.75 * delta * ln(1+delta)
//   qualifies(i, theta): increment_log_ratio(state, i, theta) <= thresh * theta
//
// Among all qualifying (column, grid theta) pairs, pick the largest theta;
// break theta ties toward the smallest storage index.  Because the log
// ratio is convex in theta and vanishes at 0, rate0_i lower-bounds every
// growth rate of column i, so columns with rate0_i > thresh are skipped
// without evaluation, and the largest qualifying theta per column is found
// by galloping upward.  If no pair qualifies (possible only through
// rounding at the threshold boundary), the minimum-rate column is taken at
// the smallest grid step.
//
// The slack term is what lets the solver take large steps: the minimizer
// of the raw growth rate alone is always the smallest grid step, which
// reaches psi_target only after c*k/delta^2 iterations.  Any qualifying
// step inflates the final potential bound by at most 0.75*delta per unit
// mass, which the downstream residual guarantee absorbs.
Increment select_increment(const SolverState& state, const ColumnOracle& oracle,
                           const SolverParams& params,
                           std::span<const double> grid,
                           ScanWorkspace* ws = nullptr);

// Greedy potential descent from x = 0.  Stops on psi >= psi_target, on the
// iteration budget, or (under StopRule::residual) once the measured
// residual drops to params.epsilon.  Precedence when several trigger at
// the same step: residual_target, psi_target, budget.
SolveReport solve(const ColumnOracle& oracle, std::span<const double> b,
                  const SolverParams& params,
                  StopRule rule = StopRule::theory);
SolveReport solve(const NonnegSystem& system, const SolverParams& params,
                  StopRule rule = StopRule::theory);

// Maps a solution in normalized coordinates back to the original column
// scaling: x_orig_i = x_i * b_scale / col_scale_i.
SparseSolution denormalize(const SparseSolution& x, const NonnegSystem& system);

}  // namespace nnsparse
