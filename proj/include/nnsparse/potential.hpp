#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nnsparse/types.hpp"

namespace nnsparse {

// Potential of an iterate x against target b:
//
//   phi(x) = sum_j b_j * (1+delta)^(y_j / b_j),   y = A x,
//
// maintained in log space.  Rows with b_j = 0 carry no potential term; the
// normalization guarantees no stored column touches such rows.  Per row we
// keep term_j = ln b_j + (y_j / b_j) * ln(1+delta), so ln phi is a
// log-sum-exp over the terms.  The accumulator is rebuilt from the term
// table after every accepted step (O(m), exact); scans between steps reuse
// the cached softmax weights mu_j = exp(term_j - ln phi) <= 1.
class SolverState {
 public:
  SolverState(std::vector<double> b, double delta);

  double psi() const { return psi_; }
  double log_phi() const { return log_phi_; }
  long iterations() const { return iter_; }
  double delta() const { return delta_; }
  double log1p_delta() const { return l_; }

  const SparseSolution& x() const { return x_; }
  std::span<const double> b() const { return b_; }
  std::span<const double> image() const { return y_; }  // y = A x
  std::span<const double> terms() const { return term_; }
  std::span<const double> mu() const { return mu_; }

  // Accepts a step of theta along the given unit column (original id `id`).
  // psi advances by exactly theta; y and the term table are updated on the
  // column support; ln phi and mu are rebuilt from scratch.
  void apply(ColId id, const SparseVec& col, double theta);

 private:
  void rebuild_log_phi();

  std::vector<double> b_;
  std::vector<double> ln_b_;
  std::vector<double> y_;
  std::vector<double> term_;
  std::vector<double> mu_;
  SparseSolution x_;
  double delta_ = 0;
  double l_ = 0;  // ln(1+delta)
  double psi_ = 0;
  double log_phi_ = 0;
  long iter_ = 0;
};

// ln phi recomputed fresh by log-sum-exp over the term table.  Matches
// SolverState::log_phi() to rounding; kept separate so tests can compare
// the cached accumulator against a from-scratch evaluation.
double phi_log(const SolverState& state);

// ln( phi(x + theta e_col) / phi(x) ) without mutating the state.  Read
// only and safe to evaluate concurrently.  Cost is linear in the column
// support.  Exact for potential arguments up to ~700; beyond that it falls
// back to a shifted log-sum-exp that stays finite and monotone.
double increment_log_ratio(const SolverState& state, const SparseVec& col,
                           double theta);

// l1 distance between the mass-normalized image y/psi and b.  Requires
// psi > 0.
double l1_residual(const SolverState& state);

struct BoundCheck {
  bool holds = false;   // whether ln phi <= (1+eta) * psi * ln(1+delta)
  double bound = 0;     // 2 * (eta + 1/(delta*psi))
};

// If the potential has grown no faster than (1+delta)^((1+eta) psi), the
// normalized image is within 2*(eta + 1/(delta*psi)) of b in l1.  Returns
// whether the hypothesis holds at this state together with the implied
// bound; callers decide what to do when it does not hold.
BoundCheck l1_bound_check(const SolverState& state, double eta);

// Averaging pick: given nonnegative a and b with sum(b) = 1, c > 1, k >= 1,
// returns the first index i with b_i >= 1/(c*k) and
// a_i <= b_i * sum(a) / (1 - 1/c).  Such an index always exists; the
// comparisons carry a 1e-12 relative slack so ties at the boundary cannot
// push the search past every candidate.
std::size_t averaging_witness(std::span<const double> a,
                              std::span<const double> b, double c, int k);

}  // namespace nnsparse
