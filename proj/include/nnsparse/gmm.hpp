#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "nnsparse/solver.hpp"
#include "nnsparse/types.hpp"

namespace nnsparse {

// Axis-aligned Gaussian mixture in d dimensions: per component a weight, a
// mean vector, and a per-axis variance vector.
struct GaussianComponent {
  double w = 0;
  std::vector<double> mean;
  std::vector<double> var;

  bool operator==(const GaussianComponent&) const = default;
};

struct GaussianMixture {
  int d = 0;
  std::vector<GaussianComponent> components;

  int k() const { return static_cast<int>(components.size()); }
  void validate() const;  // weights positive and summing to 1, variances > 0

  bool operator==(const GaussianMixture&) const = default;
};

// Per-axis interval boundaries, strictly increasing.  Axis i is split into
// boundaries[i].size() + 1 intervals; the outer two are unbounded.
// Intervals are right-closed: a point equal to a boundary belongs to the
// interval on its left.
struct AxisPartitions {
  std::vector<std::vector<double>> boundaries;

  int d() const { return static_cast<int>(boundaries.size()); }
  std::size_t interval_count(int axis) const {
    return boundaries[axis].size() + 1;
  }
  // Interval index of x on an axis: count of boundaries strictly below x,
  // with boundary points going left.
  std::size_t locate(int axis, double x) const;
  // Interval bounds; lo/hi are -inf/+inf on the outer intervals.
  void interval_bounds(int axis, std::size_t idx, double* lo, double* hi) const;
  // Flat cell index radix helpers (mixed radix over axes).
  std::uint64_t cell_count() const;
  std::uint64_t cell_key(std::span<const std::size_t> idx) const;
  std::vector<std::size_t> cell_index(std::uint64_t key) const;
};

// Equal-frequency partitions: per axis, sort the samples and cut after
// every floor(n*eps1) of them, placing each boundary at the midpoint of
// the surrounding distinct order statistics.  Ties extend an interval past
// its quota; the last interval absorbs the remainder.  Requires
// n >= 1/eps1 so every interval can meet its quota.
AxisPartitions build_axis_partitions(
    const std::vector<std::vector<double>>& samples, double eps1);

// Cell occupancy counts over the partition grid, keyed by flat cell index.
// Only occupied cells appear.
std::map<std::uint64_t, long> bin_counts(
    const std::vector<std::vector<double>>& samples,
    const AxisPartitions& parts);

// Coarsened target: cells with count > n * eps1^d * eps are heavy and keep
// their empirical mass scaled to total 1 - 2*eps; everything else is the
// light region U with fixed target mass 2*eps.  Row 0 of the target is U,
// rows 1.. are the heavy cells in ascending key order.
struct CellTable {
  double eps1 = 0;
  double eps = 0;
  double threshold = 0;  // n * eps1^d * eps
  long n = 0;            // samples counted
  std::vector<std::uint64_t> heavy;  // ascending
  std::vector<long> heavy_counts;
  std::vector<double> b;  // size heavy.size()+1, b[0] = 2*eps, sums to 1
};

CellTable coarsen_and_target(const std::map<std::uint64_t, long>& counts,
                             long n, double eps1, double eps, int d);

// Probability an axis-aligned Gaussian assigns to a box; lo/hi entries may
// be +-inf.  Uses one-sided complementary error function differences so
// far tails keep relative accuracy.
double gaussian_cell_prob(std::span<const double> mean,
                          std::span<const double> var,
                          std::span<const double> lo,
                          std::span<const double> hi);

// Whether every per-axis interval of the partition carries at most `bound`
// marginal mass under the component.  Flat-enough components survive the
// flattening argument; spiky ones are filtered out.
bool is_good(std::span<const double> mean, std::span<const double> var,
             const AxisPartitions& parts, double bound);

struct Candidate {
  std::vector<double> mean;
  std::vector<double> var;
  SparseVec column;  // over the CellTable rows: 0 = U, 1.. = heavy cells
};

struct CandidateSet {
  std::vector<Candidate> items;
};

// Candidate components from ordered sample pairs: mean = x, per-axis
// variance = (x_i - y_i)^2.  Pairs sharing any coordinate are skipped
// (zero variance), duplicates are collapsed, and only components passing
// is_good(bound) are kept.  Each candidate's column stores its heavy-cell
// probabilities; the U entry absorbs the remainder so the column sums to
// one exactly.
CandidateSet gen_candidates(const std::vector<std::vector<double>>& samples,
                            const AxisPartitions& parts, const CellTable& table,
                            double bound);

struct LearnOptions {
  double eps1_override = 0;  // 0: use eps^3/(k*d)
  int n_prime = 0;           // candidate sample count; 0: min(n, 64)
  long budget = 0;           // 0: solver default
  StopRule stop = StopRule::theory;
};

struct LearnResult {
  GaussianMixture mixture;
  SolveReport report;  // residual is against the binned target
  AxisPartitions parts;
  CellTable table;
};

// Full pipeline: the first half of the samples builds the partitions and
// supplies candidate pairs, the second half is binned into the coarse
// target, and the greedy solver mixes candidates against it with target
// error 64*eps.  The output mixture reweights the selected candidates by
// the normalized solution.
LearnResult learn(const std::vector<std::vector<double>>& samples, int k,
                  double eps, const LearnOptions& options = {});

// n i.i.d. draws; one engine per (seed), component choice and coordinate
// noise interleaved deterministically.
std::vector<std::vector<double>> sample_mixture(const GaussianMixture& mixture,
                                                long n, std::uint64_t seed);

// l1 distance between a 1-d Gaussian density and its piecewise flattening
// over the given boundaries: on each bounded interval the density is
// replaced by its average; each unbounded interval contributes twice its
// mass.  Computed exactly from CDF differences split at the density/level
// crossings.
double flatten_distance_1d(double mean, double var,
                           const std::vector<double>& boundaries);

struct DistanceEstimate {
  double value = 0;
  double error = 0;
};

// l1 distance between two mixtures of equal dimension (d <= 3), by
// composite Simpson quadrature over a box covering +-8 sigma of every
// component; the mass either mixture leaves outside the box is added to
// the value as upper-bound slack and to the error estimate.  resolution is
// the grid point count per axis (0 picks a per-dimension default).
DistanceEstimate mixture_l1_distance(const GaussianMixture& f,
                                     const GaussianMixture& g,
                                     long resolution = 0);

}  // namespace nnsparse
