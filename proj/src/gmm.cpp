#include "nnsparse/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "nnsparse/rng.hpp"

namespace nnsparse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Column entries below this carry no numerical weight and only bloat the
// candidate matrix.
constexpr double kTinyProb = 1e-18;

// P(lo < X <= hi) for X ~ N(mu, sigma^2).  The erfc difference is taken on
// the side away from the mean so deep-tail intervals keep relative
// accuracy instead of cancelling near 2.
double axis_prob(double mu, double sigma, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo == -kInf && hi == kInf) return 1.0;
  const double rs = 1.0 / (sigma * std::sqrt(2.0));
  const double ul = (lo - mu) * rs;
  const double uh = (hi - mu) * rs;
  double p;
  if (ul + uh > 0)
    p = 0.5 * (std::erfc(ul) - std::erfc(uh));
  else
    p = 0.5 * (std::erfc(-uh) - std::erfc(-ul));
  if (p < 0) p = 0;
  if (p > 1) p = 1;
  return p;
}

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

}  // namespace

double normal01(std::mt19937_64& eng) {
  // Box-Muller, cosine branch only; two engine draws per variate keeps the
  // stream layout identical across standard libraries.
  const double u1 = 1.0 - uniform01(eng);  // (0, 1], log stays finite
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void GaussianMixture::validate() const {
  if (d < 1) fail(Errc::invalid_argument, "mixture dimension must be >= 1");
  if (components.empty())
    fail(Errc::invalid_argument, "mixture needs at least one component");
  double total = 0;
  for (const auto& c : components) {
    if (!(c.w > 0) || !std::isfinite(c.w))
      fail(Errc::invalid_argument, "component weights must be positive");
    if (static_cast<int>(c.mean.size()) != d ||
        static_cast<int>(c.var.size()) != d)
      fail(Errc::invalid_argument, "component dimension mismatch");
    for (double m : c.mean)
      if (!std::isfinite(m))
        fail(Errc::invalid_argument, "component means must be finite");
    for (double v : c.var)
      if (!(v > 0) || !std::isfinite(v))
        fail(Errc::invalid_argument, "component variances must be positive");
    total += c.w;
  }
  if (std::abs(total - 1.0) > kRelTol)
    fail(Errc::invalid_argument, "component weights must sum to 1");
}

std::size_t AxisPartitions::locate(int axis, double x) const {
  const auto& v = boundaries[static_cast<std::size_t>(axis)];
  return static_cast<std::size_t>(
      std::lower_bound(v.begin(), v.end(), x) - v.begin());
}

void AxisPartitions::interval_bounds(int axis, std::size_t idx, double* lo,
                                     double* hi) const {
  const auto& v = boundaries[static_cast<std::size_t>(axis)];
  if (idx > v.size())
    fail(Errc::invalid_argument, "interval index out of range");
  *lo = idx == 0 ? -kInf : v[idx - 1];
  *hi = idx == v.size() ? kInf : v[idx];
}

std::uint64_t AxisPartitions::cell_count() const {
  std::uint64_t count = 1;
  for (int a = 0; a < d(); ++a) {
    const std::uint64_t ic = interval_count(a);
    if (count > std::numeric_limits<std::uint64_t>::max() / ic)
      fail(Errc::invalid_argument, "partition grid too large");
    count *= ic;
  }
  return count;
}

std::uint64_t AxisPartitions::cell_key(std::span<const std::size_t> idx) const {
  if (static_cast<int>(idx.size()) != d())
    fail(Errc::invalid_argument, "cell index dimension mismatch");
  std::uint64_t key = 0;
  for (int a = 0; a < d(); ++a) {
    const std::uint64_t ic = interval_count(a);
    if (idx[static_cast<std::size_t>(a)] >= ic)
      fail(Errc::invalid_argument, "cell index out of range");
    key = key * ic + idx[static_cast<std::size_t>(a)];
  }
  return key;
}

std::vector<std::size_t> AxisPartitions::cell_index(std::uint64_t key) const {
  std::vector<std::size_t> idx(static_cast<std::size_t>(d()));
  for (int a = d() - 1; a >= 0; --a) {
    const std::uint64_t ic = interval_count(a);
    idx[static_cast<std::size_t>(a)] = static_cast<std::size_t>(key % ic);
    key /= ic;
  }
  if (key != 0) fail(Errc::invalid_argument, "cell key out of range");
  return idx;
}

AxisPartitions build_axis_partitions(
    const std::vector<std::vector<double>>& samples, double eps1) {
  if (samples.empty())
    fail(Errc::insufficient_samples, "no samples to partition");
  if (!(eps1 > 0) || !(eps1 < 1))
    fail(Errc::invalid_argument, "partition mass must lie in (0, 1)");
  const std::size_t n = samples.size();
  const std::size_t d = samples.front().size();
  if (d == 0) fail(Errc::invalid_argument, "samples must have dimension >= 1");
  for (const auto& s : samples)
    if (s.size() != d)
      fail(Errc::invalid_argument, "samples have mixed dimensions");
  const auto quota =
      static_cast<std::size_t>(static_cast<double>(n) * eps1);
  if (quota < 1)
    fail(Errc::insufficient_samples,
         "need at least 1/eps1 samples per axis to meet the interval quota");

  AxisPartitions parts;
  parts.boundaries.resize(d);
  std::vector<double> v(n);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t s = 0; s < n; ++s) v[s] = samples[s][a];
    std::sort(v.begin(), v.end());
    auto& cuts = parts.boundaries[a];
    std::size_t i = 0;
    for (;;) {
      std::size_t j = i + quota;
      if (j >= n) break;
      while (j < n && v[j] == v[j - 1]) ++j;  // ties stay left of the cut
      if (j >= n) break;
      if (n - j < quota) break;  // short tail joins the last interval
      cuts.push_back(0.5 * (v[j - 1] + v[j]));
      i = j;
    }
  }
  return parts;
}

std::map<std::uint64_t, long> bin_counts(
    const std::vector<std::vector<double>>& samples,
    const AxisPartitions& parts) {
  const int d = parts.d();
  std::map<std::uint64_t, long> counts;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  for (const auto& s : samples) {
    if (static_cast<int>(s.size()) != d)
      fail(Errc::invalid_argument, "sample dimension mismatch");
    for (int a = 0; a < d; ++a)
      idx[static_cast<std::size_t>(a)] =
          parts.locate(a, s[static_cast<std::size_t>(a)]);
    ++counts[parts.cell_key(idx)];
  }
  return counts;
}

CellTable coarsen_and_target(const std::map<std::uint64_t, long>& counts,
                             long n, double eps1, double eps, int d) {
  if (n < 1) fail(Errc::invalid_argument, "cell table needs n >= 1");
  if (!(eps > 0) || !(eps < 0.5))
    fail(Errc::invalid_argument,
         "coarse target needs eps in (0, 0.5) so both regions keep mass");
  if (!(eps1 > 0) || !(eps1 < 1))
    fail(Errc::invalid_argument, "partition mass must lie in (0, 1)");
  if (d < 1) fail(Errc::invalid_argument, "dimension must be >= 1");

  CellTable table;
  table.eps1 = eps1;
  table.eps = eps;
  table.n = n;
  table.threshold =
      static_cast<double>(n) * std::pow(eps1, static_cast<double>(d)) * eps;
  long heavy_total = 0;
  for (const auto& [key, count] : counts) {
    if (static_cast<double>(count) > table.threshold) {
      table.heavy.push_back(key);
      table.heavy_counts.push_back(count);
      heavy_total += count;
    }
  }
  if (table.heavy.empty())
    fail(Errc::infeasible, "no cell is heavy at this threshold");
  table.b.resize(table.heavy.size() + 1);
  table.b[0] = 2.0 * eps;
  for (std::size_t h = 0; h < table.heavy.size(); ++h)
    table.b[h + 1] = (1.0 - 2.0 * eps) *
                     static_cast<double>(table.heavy_counts[h]) /
                     static_cast<double>(heavy_total);
  return table;
}

double gaussian_cell_prob(std::span<const double> mean,
                          std::span<const double> var,
                          std::span<const double> lo,
                          std::span<const double> hi) {
  const std::size_t d = mean.size();
  if (var.size() != d || lo.size() != d || hi.size() != d)
    fail(Errc::invalid_argument, "cell probability dimension mismatch");
  double p = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(var[a] > 0))
      fail(Errc::invalid_argument, "variances must be positive");
    p *= axis_prob(mean[a], std::sqrt(var[a]), lo[a], hi[a]);
    if (p == 0) break;
  }
  return p;
}

bool is_good(std::span<const double> mean, std::span<const double> var,
             const AxisPartitions& parts, double bound) {
  for (int a = 0; a < parts.d(); ++a) {
    if (!(var[static_cast<std::size_t>(a)] > 0))
      fail(Errc::invalid_argument, "variances must be positive");
    const double sigma = std::sqrt(var[static_cast<std::size_t>(a)]);
    const double mu = mean[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < parts.interval_count(a); ++i) {
      double lo, hi;
      parts.interval_bounds(a, i, &lo, &hi);
      if (axis_prob(mu, sigma, lo, hi) > bound) return false;
    }
  }
  return true;
}

CandidateSet gen_candidates(const std::vector<std::vector<double>>& samples,
                            const AxisPartitions& parts, const CellTable& table,
                            double bound) {
  const int d = parts.d();
  const std::size_t np = samples.size();
  for (const auto& s : samples)
    if (static_cast<int>(s.size()) != d)
      fail(Errc::invalid_argument, "sample dimension mismatch");

  // Per-heavy-cell bounds, fetched once.
  const std::size_t nh = table.heavy.size();
  std::vector<std::vector<double>> cell_lo(nh), cell_hi(nh);
  for (std::size_t h = 0; h < nh; ++h) {
    const auto idx = parts.cell_index(table.heavy[h]);
    cell_lo[h].resize(static_cast<std::size_t>(d));
    cell_hi[h].resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
      parts.interval_bounds(a, idx[static_cast<std::size_t>(a)],
                            &cell_lo[h][static_cast<std::size_t>(a)],
                            &cell_hi[h][static_cast<std::size_t>(a)]);
  }

  CandidateSet out;
  std::set<std::vector<double>> seen;
  std::vector<double> key(2 * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      if (i == j) continue;
      const auto& x = samples[i];
      const auto& y = samples[j];
      bool degenerate = false;
      for (int a = 0; a < d && !degenerate; ++a)
        degenerate = x[static_cast<std::size_t>(a)] ==
                     y[static_cast<std::size_t>(a)];
      if (degenerate) continue;
      for (int a = 0; a < d; ++a) {
        const double diff =
            x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)];
        key[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)];
        key[static_cast<std::size_t>(d + a)] = diff * diff;
      }
      if (!seen.insert(key).second) continue;

      Candidate cand;
      cand.mean.assign(key.begin(), key.begin() + d);
      cand.var.assign(key.begin() + d, key.end());
      if (!is_good(cand.mean, cand.var, parts, bound)) continue;

      double heavy_sum = 0;
      SparseVec& col = cand.column;
      for (std::size_t h = 0; h < nh; ++h) {
        const double p =
            gaussian_cell_prob(cand.mean, cand.var, cell_lo[h], cell_hi[h]);
        if (p >= kTinyProb) {
          col.entries.push_back({static_cast<RowIndex>(h + 1), p});
          heavy_sum += p;
        }
      }
      double u = 1.0 - heavy_sum;
      if (u < 0) u = 0;
      if (u >= kTinyProb) col.entries.push_back({0, u});
      col.canonicalize();
      out.items.push_back(std::move(cand));
    }
  }
  return out;
}

namespace {

class CandidateOracle final : public ColumnOracle {
 public:
  explicit CandidateOracle(const CandidateSet& set) : set_(&set) {}
  std::size_t column_count() const override { return set_->items.size(); }
  const SparseVec& column(std::size_t i) const override {
    return set_->items[i].column;
  }

 private:
  const CandidateSet* set_;
};

}  // namespace

LearnResult learn(const std::vector<std::vector<double>>& samples, int k,
                  double eps, const LearnOptions& options) {
  if (k < 1) fail(Errc::invalid_argument, "learn needs k >= 1");
  if (!(eps > 0) || !(eps < 0.5))
    fail(Errc::invalid_argument, "learn needs eps in (0, 0.5)");
  if (samples.size() < 2)
    fail(Errc::insufficient_samples, "learn needs at least two samples");
  const std::size_t d = samples.front().size();
  if (d == 0) fail(Errc::invalid_argument, "samples must have dimension >= 1");
  for (const auto& s : samples)
    if (s.size() != d)
      fail(Errc::invalid_argument, "samples have mixed dimensions");

  const double eps1 = options.eps1_override > 0
                          ? options.eps1_override
                          : eps * eps * eps /
                                (static_cast<double>(k) * static_cast<double>(d));
  if (!(eps1 > 0) || !(eps1 < 1))
    fail(Errc::invalid_argument, "derived partition mass left (0, 1)");

  const std::size_t half = samples.size() / 2;
  const std::vector<std::vector<double>> first(samples.begin(),
                                               samples.begin() + half);
  const std::vector<std::vector<double>> second(samples.begin() + half,
                                                samples.end());

  LearnResult out;
  out.parts = build_axis_partitions(first, eps1);
  const auto counts = bin_counts(second, out.parts);
  out.table = coarsen_and_target(counts, static_cast<long>(second.size()),
                                 eps1, eps, static_cast<int>(d));

  std::size_t np = options.n_prime > 0
                       ? std::min(first.size(),
                                  static_cast<std::size_t>(options.n_prime))
                       : std::min(first.size(), static_cast<std::size_t>(64));
  const std::vector<std::vector<double>> pair_pool(first.begin(),
                                                   first.begin() + np);
  const double bound = 2.0 * eps * eps / static_cast<double>(d);
  const CandidateSet cands =
      gen_candidates(pair_pool, out.parts, out.table, bound);
  if (cands.items.empty())
    fail(Errc::no_candidates, "no sample pair yields a flat-enough component");

  // A coarse solve suffices: the binning already costs O(eps), so the
  // mixing step only needs matching accuracy, and the loose target keeps
  // the iteration count tiny.
  const SolverParams params =
      SolverParams::make(k, 64.0 * eps, options.budget);
  CandidateOracle oracle(cands);
  out.report = solve(oracle, out.table.b, params, options.stop);

  out.mixture.d = static_cast<int>(d);
  for (const auto& [id, w] : out.report.solution.entries) {
    GaussianComponent comp;
    comp.w = w;
    comp.mean = cands.items[static_cast<std::size_t>(id)].mean;
    comp.var = cands.items[static_cast<std::size_t>(id)].var;
    out.mixture.components.push_back(std::move(comp));
  }
  out.mixture.validate();
  return out;
}

std::vector<std::vector<double>> sample_mixture(const GaussianMixture& mixture,
                                                long n, std::uint64_t seed) {
  mixture.validate();
  if (n < 0) fail(Errc::invalid_argument, "sample count must be >= 0");
  auto eng = engine_for(seed, kStreamSamples);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  const std::size_t d = static_cast<std::size_t>(mixture.d);
  for (long s = 0; s < n; ++s) {
    const double u = uniform01(eng);
    std::size_t c = 0;
    double cum = 0;
    for (; c + 1 < mixture.components.size(); ++c) {
      cum += mixture.components[c].w;
      if (u < cum) break;
    }
    const auto& comp = mixture.components[c];
    std::vector<double> x(d);
    for (std::size_t a = 0; a < d; ++a)
      x[a] = comp.mean[a] + std::sqrt(comp.var[a]) * normal01(eng);
    out.push_back(std::move(x));
  }
  return out;
}

double flatten_distance_1d(double mean, double var,
                           const std::vector<double>& boundaries) {
  if (!(var > 0) || !std::isfinite(var))
    fail(Errc::invalid_argument, "variance must be positive");
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
    if (!(boundaries[i] < boundaries[i + 1]))
      fail(Errc::invalid_argument, "boundaries must be strictly increasing");
  if (boundaries.empty()) return 2.0;  // everything sits on unbounded mass

  const double sigma = std::sqrt(var);
  double total = 2.0 * axis_prob(mean, sigma, -kInf, boundaries.front()) +
                 2.0 * axis_prob(mean, sigma, boundaries.back(), kInf);
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    const double l = boundaries[i];
    const double r = boundaries[i + 1];
    const double mass = axis_prob(mean, sigma, l, r);
    if (mass <= 0) continue;  // level 0 matches the density's 0 tail mass
    const double level = mass / (r - l);
    // The density crosses the level at mean +- rad; between consecutive
    // cut points the sign of (density - level) is constant, so each piece
    // integrates exactly as |mass(piece) - level * len(piece)|.
    const double rad2 =
        -2.0 * var *
        (std::log(level) + std::log(sigma) + 0.5 * std::log(2.0 * kPi));
    const double rad = rad2 > 0 ? std::sqrt(rad2) : 0.0;
    double cuts[4];
    std::size_t nc = 0;
    cuts[nc++] = l;
    if (mean - rad > l && mean - rad < r) cuts[nc++] = mean - rad;
    if (rad > 0 && mean + rad > l && mean + rad < r) cuts[nc++] = mean + rad;
    cuts[nc++] = r;
    for (std::size_t c = 0; c + 1 < nc; ++c)
      total += std::abs(axis_prob(mean, sigma, cuts[c], cuts[c + 1]) -
                        level * (cuts[c + 1] - cuts[c]));
  }
  return total;
}

namespace {

double mixture_box_mass(const GaussianMixture& mix,
                        const std::vector<double>& lo,
                        const std::vector<double>& hi) {
  double mass = 0;
  for (const auto& c : mix.components)
    mass += c.w * gaussian_cell_prob(c.mean, c.var, lo, hi);
  return mass;
}

}  // namespace

DistanceEstimate mixture_l1_distance(const GaussianMixture& f,
                                     const GaussianMixture& g,
                                     long resolution) {
  f.validate();
  g.validate();
  if (f.d != g.d)
    fail(Errc::invalid_argument, "mixtures must share a dimension");
  const int d = f.d;
  if (d > 3)
    fail(Errc::invalid_argument, "quadrature distance supports d <= 3 only");

  long res = resolution;
  if (res <= 0) res = d == 1 ? 32769 : d == 2 ? 513 : 129;
  if (res < 5) res = 5;
  if ((res - 1) % 4 != 0) res += 4 - (res - 1) % 4;  // both grids stay Simpson
  const std::size_t n = static_cast<std::size_t>(res);

  std::vector<double> lo(static_cast<std::size_t>(d), kInf);
  std::vector<double> hi(static_cast<std::size_t>(d), -kInf);
  for (const GaussianMixture* mix : {&f, &g})
    for (const auto& c : mix->components)
      for (int a = 0; a < d; ++a) {
        const double s = std::sqrt(c.var[static_cast<std::size_t>(a)]);
        lo[static_cast<std::size_t>(a)] =
            std::min(lo[static_cast<std::size_t>(a)],
                     c.mean[static_cast<std::size_t>(a)] - 8.0 * s);
        hi[static_cast<std::size_t>(a)] =
            std::max(hi[static_cast<std::size_t>(a)],
                     c.mean[static_cast<std::size_t>(a)] + 8.0 * s);
      }

  // Per component and axis, densities tabulated over the grid; the
  // integrand is then products and sums only.
  struct Table {
    double w;
    std::vector<std::vector<double>> pdf;  // [axis][grid]
  };
  std::vector<Table> tf, tg;
  std::vector<std::vector<double>> coord(static_cast<std::size_t>(d));
  std::vector<double> step(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    auto& c = coord[static_cast<std::size_t>(a)];
    c.resize(n);
    step[static_cast<std::size_t>(a)] =
        (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) /
        static_cast<double>(n - 1);
    for (std::size_t t = 0; t < n; ++t)
      c[t] = lo[static_cast<std::size_t>(a)] +
             static_cast<double>(t) * step[static_cast<std::size_t>(a)];
  }
  auto tabulate = [&](const GaussianMixture& mix, std::vector<Table>& out) {
    for (const auto& c : mix.components) {
      Table tab;
      tab.w = c.w;
      tab.pdf.resize(static_cast<std::size_t>(d));
      for (int a = 0; a < d; ++a) {
        auto& row = tab.pdf[static_cast<std::size_t>(a)];
        row.resize(n);
        const double s = std::sqrt(c.var[static_cast<std::size_t>(a)]);
        for (std::size_t t = 0; t < n; ++t)
          row[t] = normal_pdf(coord[static_cast<std::size_t>(a)][t],
                              c.mean[static_cast<std::size_t>(a)], s);
      }
      out.push_back(std::move(tab));
    }
  };
  tabulate(f, tf);
  tabulate(g, tg);

  auto simpson_w = [](std::size_t t, std::size_t count) {
    if (t == 0 || t + 1 == count) return 1.0;
    return t % 2 == 1 ? 4.0 : 2.0;
  };

  const std::size_t nc = (n - 1) / 2 + 1;  // coarse grid, stride 2
  double fine = 0, coarse = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    double pf = 0, pg = 0;
    for (const auto& tab : tf) {
      double p = tab.w;
      for (int a = 0; a < d; ++a)
        p *= tab.pdf[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
      pf += p;
    }
    for (const auto& tab : tg) {
      double p = tab.w;
      for (int a = 0; a < d; ++a)
        p *= tab.pdf[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
      pg += p;
    }
    const double val = std::abs(pf - pg);

    double wf = 1.0;
    bool on_coarse = true;
    double wc = 1.0;
    for (int a = 0; a < d; ++a) {
      const std::size_t t = idx[static_cast<std::size_t>(a)];
      wf *= simpson_w(t, n);
      if (t % 2 != 0)
        on_coarse = false;
      else if (on_coarse)
        wc *= simpson_w(t / 2, nc);
    }
    fine += wf * val;
    if (on_coarse) coarse += wc * val;

    int a = d - 1;
    for (; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
    if (a < 0) break;
  }
  for (int a = 0; a < d; ++a) {
    fine *= step[static_cast<std::size_t>(a)] / 3.0;
    coarse *= 2.0 * step[static_cast<std::size_t>(a)] / 3.0;
  }

  const double tail =
      (1.0 - mixture_box_mass(f, lo, hi)) + (1.0 - mixture_box_mass(g, lo, hi));
  DistanceEstimate est;
  est.value = fine + tail;
  est.error = std::abs(fine - coarse) + tail;
  return est;
}

}  // namespace nnsparse
