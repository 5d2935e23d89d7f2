#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nnsparse/types.hpp"

namespace nnsparse {

enum class PlantedCase { yes, no };

// Set cover instance over m elements encoded as indicator columns with an
// all-ones target.  YES instances hide a k-part partition of the elements
// among random sets, so an exact sparse cover exists; NO instances are
// purely random sets with independent membership probability 1/k.
struct PlantedInstance {
  RawSystem raw;            // indicator columns, b = ones(m)
  NonnegSystem system;      // normalized form of raw
  PlantedCase planted_case = PlantedCase::no;
  std::optional<Witness> witness;  // YES only; normalized coordinates
  int m = 0;
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  // Whether the parameters sit in the hardness window m^(3/4) < k < m/ln^2 m.
  // Reported, never enforced; desk-scale instances usually fall outside it.
  bool regime_ok = false;
  std::vector<ColId> planted_ids;  // YES: shuffled ids of the partition sets
};

PlantedInstance gen_planted_setcover(int m, int n, int k, PlantedCase which,
                                     std::uint64_t seed);

// Indicator-column encoding of an explicit set system against the all-ones
// target.  Empty sets become zero columns and are dropped by
// normalization; the returned system's dropped_columns records them.
NonnegSystem encode_setcover(const std::vector<std::vector<int>>& sets, int m);

struct SyntheticInstance {
  RawSystem raw;
  NonnegSystem system;
  Witness witness;  // normalized coordinates, eps0 slack
  std::vector<ColId> support_ids;
};

// Dense random nonnegative columns; b is a k-column combination whose rows
// are then inflated by at most (1+eps0), with the witness rescaled so that
// ||A x*||_1 = ||b||_1 holds exactly while A x* <= (1+eps0) b row-wise.
SyntheticInstance gen_synthetic(int m, int n, int k, double eps0,
                                std::uint64_t seed);

// Checks, in normalized coordinates: support(x) <= k, psi(x) = 1 within
// kRelTol, and (A x)_j <= (1+eps0) b_j + kNonnegClamp on every row.
bool verify_witness(const NonnegSystem& system, const Witness& witness);

}  // namespace nnsparse
