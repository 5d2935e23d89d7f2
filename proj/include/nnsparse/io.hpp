#pragma once

#include <string>
#include <vector>

#include "nnsparse/gmm.hpp"
#include "nnsparse/solver.hpp"
#include "nnsparse/types.hpp"

namespace nnsparse {

// Text formats.  All floating point values are written with 17 significant
// digits so doubles round-trip exactly; all indices are 0-based.
//
//   instance:  "nnls m n", one "row col value" triplet per line (sorted by
//              column then row), a line "b", then the m target values.
//   witness:   "witness k eps0", then "col weight" lines.
//   mixture:   "gmm d k", then per component "w mean... var..." lines.
//   samples:   one sample per line, d values.
//   solution:  "col weight" lines sorted by col.
//   trace:     tab separated "iter col theta log_ratio psi log_phi" lines.

std::string format_g17(double v);

RawSystem read_instance(const std::string& path);
void write_instance(const RawSystem& sys, const std::string& path);
std::string instance_to_string(const RawSystem& sys);

Witness read_witness(const std::string& path);
void write_witness(const Witness& w, const std::string& path);
std::string witness_to_string(const Witness& w);

GaussianMixture read_mixture(const std::string& path);
void write_mixture(const GaussianMixture& m, const std::string& path);
std::string mixture_to_string(const GaussianMixture& m);

std::vector<std::vector<double>> read_samples(const std::string& path);
void write_samples(const std::vector<std::vector<double>>& samples,
                   const std::string& path);
std::string samples_to_string(const std::vector<std::vector<double>>& samples);

SparseSolution read_solution(const std::string& path);
void write_solution(const SparseSolution& s, const std::string& path);
std::string solution_to_string(const SparseSolution& s);

std::vector<TraceEntry> read_trace(const std::string& path);
void write_trace(const std::vector<TraceEntry>& trace,
                 const std::string& path);
std::string trace_to_string(const std::vector<TraceEntry>& trace);

// One set per line as whitespace separated element ids; '#' starts a
// comment line.  Used by the set cover encoder.
std::vector<std::vector<int>> read_sets(const std::string& path);

}  // namespace nnsparse
