#include "nnsparse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nnsparse {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::psi_target:
      return "psi_target";
    case StopReason::budget:
      return "budget";
    case StopReason::residual_target:
      return "residual_target";
  }
  return "unknown";
}

const char* to_string(StopRule r) {
  return r == StopRule::theory ? "theory" : "residual";
}

std::vector<double> theta_grid(const SolverParams& params) {
  const double start = 1.0 / (params.c * static_cast<double>(params.k));
  const double l = std::log1p(params.delta);
  // Values at or just above psi_target stay in (a single step past the
  // target is the last useful one); the relative guard keeps a value that
  // is the target up to rounding from being dropped.
  const double guard = params.psi_target * (1.0 + 1e-9);
  std::vector<double> grid;
  grid.push_back(start);
  for (long t = 1;; ++t) {
    const double v = start * std::exp(static_cast<double>(t) * l);
    if (v > guard) break;
    grid.push_back(v);
  }
  return grid;
}

// Flattened copy of the oracle columns with per-entry a_j/b_j ratios.  The
// ratio division must stay written exactly as in increment_log_ratio so
// the scan reproduces its values bit for bit.
struct ScanWorkspace {
  bool built = false;
  std::vector<std::size_t> col_ptr;
  std::vector<RowIndex> rows;
  std::vector<double> ratio;
  std::vector<double> rate0;
};

std::unique_ptr<ScanWorkspace, void (*)(ScanWorkspace*)> make_scan_workspace() {
  return {new ScanWorkspace, [](ScanWorkspace* p) { delete p; }};
}

namespace {

void build_workspace(ScanWorkspace& ws, const ColumnOracle& oracle,
                     std::span<const double> b) {
  const std::size_t n = oracle.column_count();
  ws.col_ptr.assign(1, 0);
  ws.rows.clear();
  ws.ratio.clear();
  ws.rate0.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [r, a] : oracle.column(i).entries) {
      if (b[r] == 0) {
        if (a > 0)
          fail(Errc::invalid_argument,
               "column puts mass on a zero target row");
        continue;
      }
      ws.rows.push_back(r);
      ws.ratio.push_back(a / b[r]);
    }
    ws.col_ptr.push_back(ws.rows.size());
  }
  ws.built = true;
}

// Same accumulation as increment_log_ratio's direct branch, on the
// flattened ratios.  +inf signals overflow, which can only lose against
// any finite threshold.
double scan_log_ratio(const ScanWorkspace& ws, std::span<const double> mu,
                      std::size_t i, double tl) {
  double s = 0;
  const std::size_t lo = ws.col_ptr[i], hi = ws.col_ptr[i + 1];
  for (std::size_t e = lo; e < hi; ++e) {
    const double d = tl * ws.ratio[e];
    if (d > 700.0) return std::numeric_limits<double>::infinity();
    s += mu[ws.rows[e]] * std::expm1(d);
  }
  if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
  return std::log1p(s);
}

}  // namespace

Increment select_increment(const SolverState& state, const ColumnOracle& oracle,
                           const SolverParams& params,
                           std::span<const double> grid, ScanWorkspace* ws) {
  const std::size_t n = oracle.column_count();
  if (n == 0) fail(Errc::invalid_argument, "no columns to scan");
  if (grid.empty()) fail(Errc::invalid_argument, "empty step grid");

  auto local = std::unique_ptr<ScanWorkspace>();
  if (ws == nullptr) {
    local = std::make_unique<ScanWorkspace>();
    ws = local.get();
  }
  if (!ws->built) build_workspace(*ws, oracle, state.b());

  const auto mu = state.mu();
  const double l = state.log1p_delta();

  // Pass 1: initial growth rates (derivative of the log potential at
  // theta = 0).  Multiply-adds only; by convexity rate0 lower-bounds the
  // growth rate of every step of the column, so it both sets the
  // threshold and prunes columns that can never qualify.
  double rate_min = std::numeric_limits<double>::infinity();
  std::size_t i_min = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    const std::size_t lo = ws->col_ptr[i], hi = ws->col_ptr[i + 1];
    for (std::size_t e = lo; e < hi; ++e) acc += mu[ws->rows[e]] * ws->ratio[e];
    ws->rate0[i] = l * acc;
    if (ws->rate0[i] < rate_min) {
      rate_min = ws->rate0[i];
      i_min = i;
    }
  }
  const double thresh = rate_min + 0.75 * params.delta * l;

  // Pass 2: largest qualifying step.  Columns are visited in storage
  // order with strict improvement, so theta ties resolve to the smallest
  // index.  Each candidate column is probed just above the current best;
  // on success it gallops and bisects to its own largest qualifying grid
  // point (growth rates are nondecreasing in theta).
  const long last = static_cast<long>(grid.size()) - 1;
  std::size_t best_i = n;
  long best_t = -1;
  double best_g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ws->rate0[i] > thresh) continue;
    long probe = best_t + 1;
    if (probe > last) break;  // grid max reached; later ties lose anyway
    double g = scan_log_ratio(*ws, mu, i, grid[probe] * l);
    if (!(g <= thresh * grid[probe])) continue;
    long lo = probe;
    double lo_g = g;
    long hi = -1;
    for (long step = 1; lo < last;) {
      const long cand = std::min(lo + step, last);
      const double gc = scan_log_ratio(*ws, mu, i, grid[cand] * l);
      if (gc <= thresh * grid[cand]) {
        lo = cand;
        lo_g = gc;
        step *= 2;
      } else {
        hi = cand;
        break;
      }
    }
    if (hi != -1) {
      while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        const double gm = scan_log_ratio(*ws, mu, i, grid[mid] * l);
        if (gm <= thresh * grid[mid]) {
          lo = mid;
          lo_g = gm;
        } else {
          hi = mid;
        }
      }
    }
    best_i = i;
    best_t = lo;
    best_g = lo_g;
  }

  if (best_i == n) {
    // Rounding at the threshold boundary left nothing qualified; take the
    // minimum-rate column at the smallest step.
    best_i = i_min;
    best_t = 0;
    best_g = scan_log_ratio(*ws, mu, best_i, grid[0] * l);
  }
  return Increment{best_i, oracle.column_id(best_i), grid[best_t], best_g};
}

SolveReport solve(const ColumnOracle& oracle, std::span<const double> b,
                  const SolverParams& params, StopRule rule) {
  SolverState state(std::vector<double>(b.begin(), b.end()), params.delta);
  const std::vector<double> grid = theta_grid(params);
  auto ws = make_scan_workspace();

  SolveReport report;
  StopReason reason = StopReason::budget;
  for (;;) {
    if (state.iterations() >= params.budget) {
      reason = StopReason::budget;
      break;
    }
    std::optional<Increment> inc = oracle.best_increment(state, params, grid);
    if (!inc) inc = select_increment(state, oracle, params, grid, ws.get());
    state.apply(inc->id, oracle.column(inc->index), inc->theta);
    report.trace.push_back(TraceEntry{state.iterations(), inc->id, inc->theta,
                                      inc->log_ratio, state.psi(),
                                      state.log_phi()});
    if (rule == StopRule::residual && l1_residual(state) <= params.epsilon) {
      reason = StopReason::residual_target;
      break;
    }
    if (state.psi() >= params.psi_target) {
      reason = StopReason::psi_target;
      break;
    }
  }
  report.stop_reason = reason;
  report.iterations = state.iterations();
  if (state.iterations() > 0) {
    report.residual = l1_residual(state);
    double total = 0;
    for (const auto& [id, w] : state.x().entries) total += w;
    for (const auto& [id, w] : state.x().entries)
      report.solution.add(id, w / total);
  } else {
    fail(Errc::invalid_argument, "solve needs a positive iteration budget");
  }
  return report;
}

SolveReport solve(const NonnegSystem& system, const SolverParams& params,
                  StopRule rule) {
  SystemOracle oracle(system);
  return solve(oracle, system.b, params, rule);
}

SparseSolution denormalize(const SparseSolution& x,
                           const NonnegSystem& system) {
  SparseSolution out;
  for (const auto& [id, w] : x.entries) {
    auto idx = system.stored_index(id);
    if (!idx)
      fail(Errc::invalid_argument,
           "solution references unknown column " + std::to_string(id));
    out.add(id, w * system.b_scale / system.col_scale[*idx]);
  }
  return out;
}

}  // namespace nnsparse
