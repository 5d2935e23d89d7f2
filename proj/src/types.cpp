#include "nnsparse/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nnsparse {

void SparseVec::canonicalize() {
  for (auto& [r, v] : entries) {
    if (v < 0) {
      if (v > -kNonnegClamp) {
        v = 0;
      } else {
        fail(Errc::invalid_argument,
             "negative entry " + std::to_string(v) + " at row " +
                 std::to_string(r));
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<RowIndex, double>> merged;
  merged.reserve(entries.size());
  for (const auto& [r, v] : entries) {
    if (!merged.empty() && merged.back().first == r) {
      merged.back().second += v;
    } else {
      merged.emplace_back(r, v);
    }
  }
  std::erase_if(merged, [](const auto& e) { return e.second == 0; });
  entries = std::move(merged);
}

std::optional<std::size_t> NonnegSystem::stored_index(ColId id) const {
  auto it = std::lower_bound(col_ids.begin(), col_ids.end(), id);
  if (it == col_ids.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - col_ids.begin());
}

NonnegSystem normalize_system(const RawSystem& raw) {
  if (raw.m <= 0) fail(Errc::invalid_argument, "system needs at least one row");
  if (static_cast<RowIndex>(raw.b.size()) != raw.m)
    fail(Errc::invalid_argument, "target length does not match row count");
  if (static_cast<ColId>(raw.columns.size()) != raw.n)
    fail(Errc::invalid_argument, "column count mismatch");

  NonnegSystem sys;
  sys.m = raw.m;
  sys.n_input = raw.n;
  sys.b.assign(raw.b.begin(), raw.b.end());

  double b_mass = 0;
  for (double& v : sys.b) {
    if (v < 0) {
      if (v > -kNonnegClamp) {
        v = 0;
      } else {
        fail(Errc::invalid_argument, "negative target entry");
      }
    }
    b_mass += v;
  }
  if (!(b_mass > 0)) fail(Errc::infeasible, "degenerate target: b is all zero");
  sys.b_scale = b_mass;
  for (double& v : sys.b) v /= b_mass;

  for (ColId id = 0; id < raw.n; ++id) {
    SparseVec col = raw.columns[id];
    col.canonicalize();
    for (const auto& [r, v] : col.entries) {
      if (r < 0 || r >= raw.m)
        fail(Errc::invalid_argument,
             "row index " + std::to_string(r) + " out of range in column " +
                 std::to_string(id));
      (void)v;
    }
    const double mass = col.l1();
    bool on_zero_row = false;
    for (const auto& [r, v] : col.entries) {
      if (sys.b[r] == 0 && v > 0) {
        on_zero_row = true;
        break;
      }
    }
    if (mass <= 0 || on_zero_row) {
      // A column with mass on a zero-target row can never appear in a
      // solution whose image stays proportional to b; keeping it would put
      // rows with b_j = 0 into the potential where they have no term.
      sys.dropped_columns.push_back(id);
      continue;
    }
    for (auto& [r, v] : col.entries) v /= mass;
    sys.columns.push_back(std::move(col));
    sys.col_ids.push_back(id);
    sys.col_scale.push_back(mass);
  }
  if (sys.columns.empty())
    fail(Errc::infeasible, "no usable columns after normalization");
  return sys;
}

NonnegSystem normalize_system(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& b) {
  RawSystem raw;
  raw.m = static_cast<RowIndex>(b.size());
  raw.n = static_cast<ColId>(columns.size());
  raw.b = b;
  raw.columns.resize(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (static_cast<RowIndex>(columns[c].size()) != raw.m)
      fail(Errc::invalid_argument, "dense column length mismatch");
    for (RowIndex r = 0; r < raw.m; ++r) {
      if (columns[c][r] != 0)
        raw.columns[c].entries.emplace_back(r, columns[c][r]);
    }
  }
  return normalize_system(raw);
}

void SparseSolution::add(ColId id, double w) {
  if (!(w > 0)) fail(Errc::invalid_argument, "solution weights must be > 0");
  entries[id] += w;
  l1 += w;
}

SolverParams SolverParams::make(int k, double epsilon, long budget_override) {
  if (k < 1) fail(Errc::invalid_argument, "k must be >= 1");
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    fail(Errc::invalid_argument, "epsilon must be positive and finite");
  SolverParams p;
  p.k = k;
  p.epsilon = epsilon;
  p.delta = epsilon / 16.0;
  p.c = 16.0 / epsilon;
  p.psi_target = 1.0 / (p.delta * p.delta);
  const double t = std::ceil(p.c * k / (p.delta * p.delta));
  p.t_theory = t > 4e18 ? static_cast<long>(4e18) : static_cast<long>(t);
  if (p.t_theory < 1) p.t_theory = 1;
  if (budget_override > 0) {
    p.budget = budget_override;
  } else {
    const double desk = std::ceil(50.0 * k / epsilon);
    long cap = desk > 4e18 ? static_cast<long>(4e18) : static_cast<long>(desk);
    if (cap < 1) cap = 1;
    p.budget = std::min(p.t_theory, cap);
  }
  return p;
}

}  // namespace nnsparse
