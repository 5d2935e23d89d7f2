#include "nnsparse/instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnsparse/rng.hpp"

namespace nnsparse {

namespace {

SparseVec indicator_column(const std::vector<int>& members) {
  SparseVec col;
  col.entries.reserve(members.size());
  for (int u : members) col.entries.push_back({static_cast<RowIndex>(u), 1.0});
  col.canonicalize();
  return col;
}

// Independent membership with probability 1/k per element, in element order.
std::vector<int> random_set(std::mt19937_64& eng, int m, int k) {
  std::vector<int> members;
  const double p = 1.0 / static_cast<double>(k);
  for (int u = 0; u < m; ++u)
    if (uniform01(eng) < p) members.push_back(u);
  return members;
}

}  // namespace

PlantedInstance gen_planted_setcover(int m, int n, int k, PlantedCase which,
                                     std::uint64_t seed) {
  if (m < 1) fail(Errc::invalid_argument, "planted instance needs m >= 1");
  if (k < 1) fail(Errc::invalid_argument, "planted instance needs k >= 1");
  if (n < 1) fail(Errc::invalid_argument, "planted instance needs n >= 1");
  if (which == PlantedCase::yes && n < k)
    fail(Errc::invalid_argument,
         "yes-case planted instance needs n >= k to hide the partition");

  PlantedInstance out;
  out.planted_case = which;
  out.m = m;
  out.n = n;
  out.k = k;
  out.seed = seed;
  {
    const double md = static_cast<double>(m);
    const double lg = std::log(md);
    out.regime_ok = std::pow(md, 0.75) < static_cast<double>(k) &&
                    (lg > 0 && static_cast<double>(k) < md / (lg * lg));
  }

  const int n_random = which == PlantedCase::yes ? n - k : n;
  std::vector<std::vector<int>> sets;
  sets.reserve(static_cast<std::size_t>(n));
  {
    auto eng = engine_for(seed, kStreamMembership);
    for (int s = 0; s < n_random; ++s) sets.push_back(random_set(eng, m, k));
  }
  if (which == PlantedCase::yes) {
    // Partition the elements into k parts; parts may come out empty, in
    // which case the planted cover simply uses fewer than k sets.
    auto eng = engine_for(seed, kStreamPartition);
    std::vector<std::vector<int>> parts(static_cast<std::size_t>(k));
    for (int u = 0; u < m; ++u)
      parts[bounded(eng, static_cast<std::uint64_t>(k))].push_back(u);
    for (auto& p : parts) sets.push_back(std::move(p));
  }

  // Shuffle storage positions so the planted sets are not the trailing ids.
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  {
    auto eng = engine_for(seed, kStreamShuffle);
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(
          bounded(eng, static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(j)]);
    }
  }

  out.raw.m = m;
  out.raw.n = n;
  out.raw.b.assign(static_cast<std::size_t>(m), 1.0);
  out.raw.columns.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    const int src = perm[static_cast<std::size_t>(p)];
    out.raw.columns[static_cast<std::size_t>(p)] =
        indicator_column(sets[static_cast<std::size_t>(src)]);
    if (which == PlantedCase::yes && src >= n_random)
      out.planted_ids.push_back(static_cast<ColId>(p));
  }
  std::sort(out.planted_ids.begin(), out.planted_ids.end());
  out.system = normalize_system(out.raw);

  if (which == PlantedCase::yes) {
    // Part weights |S|/m solve the normalized system exactly: each covered
    // element receives (|S|/m) * (1/|S|) = 1/m, the normalized target row.
    Witness w;
    w.eps0 = 0.0;
    w.k = k;
    for (ColId id : out.planted_ids) {
      const auto& col = out.raw.columns[static_cast<std::size_t>(id)];
      if (col.entries.empty()) continue;
      w.x.add(id, static_cast<double>(col.entries.size()) /
                      static_cast<double>(m));
    }
    out.witness = std::move(w);
  }
  return out;
}

NonnegSystem encode_setcover(const std::vector<std::vector<int>>& sets,
                             int m) {
  if (m < 1) fail(Errc::invalid_argument, "set cover needs m >= 1");
  if (sets.empty()) fail(Errc::invalid_argument, "set cover needs sets");
  RawSystem raw;
  raw.m = m;
  raw.n = static_cast<int>(sets.size());
  raw.b.assign(static_cast<std::size_t>(m), 1.0);
  raw.columns.reserve(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (int u : sets[s])
      if (u < 0 || u >= m)
        fail(Errc::invalid_argument,
             "set " + std::to_string(s) + " contains out-of-range element " +
                 std::to_string(u));
    raw.columns.push_back(indicator_column(sets[s]));
  }
  return normalize_system(raw);
}

SyntheticInstance gen_synthetic(int m, int n, int k, double eps0,
                                std::uint64_t seed) {
  if (m < 1 || n < 1)
    fail(Errc::invalid_argument, "synthetic instance needs m, n >= 1");
  if (k < 1 || k > n)
    fail(Errc::invalid_argument, "synthetic instance needs 1 <= k <= n");
  if (!(eps0 >= 0) || !std::isfinite(eps0))
    fail(Errc::invalid_argument, "synthetic instance needs eps0 >= 0");

  SyntheticInstance out;
  out.raw.m = m;
  out.raw.n = n;
  out.raw.columns.resize(static_cast<std::size_t>(n));
  {
    auto eng = engine_for(seed, kStreamColumns);
    for (int i = 0; i < n; ++i) {
      SparseVec& col = out.raw.columns[static_cast<std::size_t>(i)];
      col.entries.reserve(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j)
        col.entries.push_back({static_cast<RowIndex>(j), uniform01(eng)});
      col.canonicalize();
    }
  }

  std::vector<int> support;
  std::vector<double> weights;
  {
    auto eng = engine_for(seed, kStreamWeights);
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<int>(
          i + bounded(eng, static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(j)]);
    }
    support.assign(pool.begin(), pool.begin() + k);
    std::sort(support.begin(), support.end());
    weights.resize(static_cast<std::size_t>(k));
    // Bounded away from zero so every support column genuinely matters.
    for (double& w : weights) w = 0.1 + 0.9 * uniform01(eng);
  }

  std::vector<double> image(static_cast<std::size_t>(m), 0.0);
  for (int s = 0; s < k; ++s) {
    const auto& col = out.raw.columns[static_cast<std::size_t>(
        support[static_cast<std::size_t>(s)])];
    for (const auto& [r, a] : col.entries)
      image[static_cast<std::size_t>(r)] += weights[static_cast<std::size_t>(s)] * a;
  }

  out.raw.b.resize(static_cast<std::size_t>(m));
  {
    auto eng = engine_for(seed, kStreamPerturb);
    for (int j = 0; j < m; ++j)
      out.raw.b[static_cast<std::size_t>(j)] =
          image[static_cast<std::size_t>(j)] * (1.0 + eps0 * uniform01(eng));
  }

  out.system = normalize_system(out.raw);

  // Scale the witness so its image carries exactly the target's total
  // mass.  Each inflated row still dominates: the scale is a mass-weighted
  // mean of the row inflations, hence at most 1 + eps0, while every row's
  // own inflation is at least 1.
  double image_mass = 0, b_mass = 0;
  for (double v : image) image_mass += v;
  for (double v : out.raw.b) b_mass += v;
  if (!(image_mass > 0))
    fail(Errc::internal, "synthetic witness image has no mass");
  const double scale = b_mass / image_mass;

  out.witness.eps0 = eps0;
  out.witness.k = k;
  for (int s = 0; s < k; ++s) {
    const int id = support[static_cast<std::size_t>(s)];
    out.support_ids.push_back(static_cast<ColId>(id));
    const auto idx = out.system.stored_index(static_cast<ColId>(id));
    if (!idx) fail(Errc::internal, "synthetic support column was dropped");
    // Raw weight -> normalized coordinates: multiply by the column mass,
    // divide by the target mass.
    out.witness.x.add(static_cast<ColId>(id),
                      weights[static_cast<std::size_t>(s)] * scale *
                          out.system.col_scale[*idx] / out.system.b_scale);
  }
  return out;
}

bool verify_witness(const NonnegSystem& system, const Witness& witness) {
  if (witness.x.entries.empty()) return false;
  if (static_cast<int>(witness.x.entries.size()) > witness.k) return false;
  double psi = 0;
  std::vector<double> image(system.b.size(), 0.0);
  for (const auto& [id, w] : witness.x.entries) {
    if (!(w > 0)) return false;
    const auto idx = system.stored_index(id);
    if (!idx) return false;
    psi += w;
    for (const auto& [r, a] : system.columns[*idx].entries)
      image[static_cast<std::size_t>(r)] += w * a;
  }
  if (std::abs(psi - 1.0) > kRelTol) return false;
  for (std::size_t j = 0; j < system.b.size(); ++j)
    if (image[j] > (1.0 + witness.eps0) * system.b[j] + kNonnegClamp)
      return false;
  return true;
}

}  // namespace nnsparse
