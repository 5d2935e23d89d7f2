#include "nnsparse/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nnsparse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(exp(d) - 1), finite and monotone for d > 0.
double log_expm1(double d) {
  if (d > 36.0) return d + std::log1p(-std::exp(-d));  // exp(-d) < 2^-52
  return std::log(std::expm1(d));
}

}  // namespace

SolverState::SolverState(std::vector<double> b, double delta)
    : b_(std::move(b)), delta_(delta) {
  if (!(delta_ > 0)) fail(Errc::invalid_argument, "delta must be positive");
  if (b_.empty()) fail(Errc::invalid_argument, "empty target");
  l_ = std::log1p(delta_);
  const std::size_t m = b_.size();
  ln_b_.resize(m);
  y_.assign(m, 0.0);
  term_.resize(m);
  mu_.resize(m);
  double mass = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (b_[j] < 0) fail(Errc::invalid_argument, "negative target entry");
    mass += b_[j];
    ln_b_[j] = b_[j] > 0 ? std::log(b_[j]) : kNegInf;
    term_[j] = ln_b_[j];
  }
  if (std::abs(mass - 1.0) > 1e-6)
    fail(Errc::invalid_argument, "target must be normalized to unit mass");
  rebuild_log_phi();
}

void SolverState::rebuild_log_phi() {
  // Full log-sum-exp rebuild over the term table; O(m) per accepted step
  // keeps the accumulator exact instead of drifting under incremental
  // updates.
  double mx = kNegInf;
  for (double t : term_)
    if (t > mx) mx = t;
  if (mx == kNegInf) fail(Errc::internal, "potential lost all terms");
  double s = 0;
  for (double t : term_) {
    if (t != kNegInf) s += std::exp(t - mx);
  }
  log_phi_ = mx + std::log(s);
  for (std::size_t j = 0; j < term_.size(); ++j)
    mu_[j] = term_[j] == kNegInf ? 0.0 : std::exp(term_[j] - log_phi_);
}

void SolverState::apply(ColId id, const SparseVec& col, double theta) {
  if (!(theta > 0)) fail(Errc::invalid_argument, "step must be positive");
  for (const auto& [r, a] : col.entries) {
    if (r < 0 || static_cast<std::size_t>(r) >= b_.size())
      fail(Errc::invalid_argument, "column row out of range");
    if (b_[r] == 0 && a > 0)
      fail(Errc::invalid_argument, "column puts mass on a zero target row");
    y_[r] += theta * a;
    term_[r] = ln_b_[r] + y_[r] / b_[r] * l_;
  }
  psi_ += theta;
  x_.add(id, theta);
  ++iter_;
  rebuild_log_phi();
}

double phi_log(const SolverState& state) {
  auto terms = state.terms();
  double mx = kNegInf;
  for (double t : terms)
    if (t > mx) mx = t;
  double s = 0;
  for (double t : terms) {
    if (t != kNegInf) s += std::exp(t - mx);
  }
  return mx + std::log(s);
}

double increment_log_ratio(const SolverState& state, const SparseVec& col,
                           double theta) {
  if (!(theta > 0)) fail(Errc::invalid_argument, "step must be positive");
  const auto b = state.b();
  const auto mu = state.mu();
  const double l = state.log1p_delta();
  // phi(x + theta e_i)/phi(x) = 1 + sum_j mu_j * (exp(d_j) - 1) over the
  // column support, with d_j = theta * l * (a_j/b_j) >= 0.  The grouping
  // matters: the scan workspace precomputes a_j/b_j, and both evaluation
  // sites must round identically.  The direct sum is exact while it fits
  // in a double; otherwise redo it as a shifted log-sum-exp so enormous
  // (never selected) steps still compare sanely.
  double s = 0;
  bool overflow = false;
  for (const auto& [r, a] : col.entries) {
    if (b[r] == 0) {
      if (a > 0)
        fail(Errc::invalid_argument, "column puts mass on a zero target row");
      continue;
    }
    const double d = theta * l * (a / b[r]);
    if (d > 700.0) {
      overflow = true;
      break;
    }
    s += mu[r] * std::expm1(d);
  }
  if (!overflow && std::isfinite(s)) return std::log1p(s);

  const auto terms = state.terms();
  const double log_phi = state.log_phi();
  double mx = kNegInf;
  std::vector<double> w;
  w.reserve(col.entries.size());
  for (const auto& [r, a] : col.entries) {
    if (b[r] == 0) continue;
    const double d = theta * l * (a / b[r]);
    const double wj = terms[r] - log_phi + log_expm1(d);
    w.push_back(wj);
    if (wj > mx) mx = wj;
  }
  double acc = 0;
  for (double wj : w) acc += std::exp(wj - mx);
  const double big = mx + std::log(acc);  // ln(sum mu_j (exp(d_j)-1))
  if (big > 700.0) return big;
  return std::log1p(std::exp(big));
}

double l1_residual(const SolverState& state) {
  const double psi = state.psi();
  if (!(psi > 0)) fail(Errc::invalid_argument, "residual of an empty iterate");
  const auto b = state.b();
  const auto y = state.image();
  double r = 0;
  for (std::size_t j = 0; j < b.size(); ++j) r += std::abs(y[j] / psi - b[j]);
  return r;
}

BoundCheck l1_bound_check(const SolverState& state, double eta) {
  BoundCheck out;
  const double psi = state.psi();
  if (!(psi > 0)) return out;
  out.holds = state.log_phi() <= (1.0 + eta) * psi * state.log1p_delta();
  out.bound = 2.0 * (eta + 1.0 / (state.delta() * psi));
  return out;
}

std::size_t averaging_witness(std::span<const double> a,
                              std::span<const double> b, double c, int k) {
  if (a.size() != b.size() || a.empty())
    fail(Errc::invalid_argument, "averaging pick needs matching nonempty inputs");
  if (!(c > 1.0)) fail(Errc::invalid_argument, "averaging pick needs c > 1");
  if (k < 1) fail(Errc::invalid_argument, "averaging pick needs k >= 1");
  double total = 0;
  for (double v : a) total += v;
  const double floor_b = 1.0 / (c * static_cast<double>(k));
  const double scale = total / (1.0 - 1.0 / c);
  // The indices with b_i >= 1/(ck) carry at least 1 - 1/c of b's unit mass,
  // so the a-average over them cannot exceed total/(1 - 1/c); some index
  // meets both cuts.  The relative slack keeps rounding at the boundary
  // from excluding the extremal index.
  constexpr double kSlack = 1e-12;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] >= floor_b * (1.0 - kSlack) &&
        a[i] <= b[i] * scale * (1.0 + kSlack) + 1e-300)
      return i;
  }
  fail(Errc::internal, "averaging pick found no qualifying index");
}

}  // namespace nnsparse
