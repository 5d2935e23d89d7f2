#include "nnsparse.h"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "nnsparse/gmm.hpp"
#include "nnsparse/instances.hpp"
#include "nnsparse/io.hpp"
#include "nnsparse/solver.hpp"
#include "nnsparse/types.hpp"

struct nns_system {
  nnsparse::RawSystem raw;
  nnsparse::NonnegSystem norm;
};
struct nns_witness {
  nnsparse::Witness w;
};
struct nns_report {
  nnsparse::SolveReport rep;
};
struct nns_mixture {
  nnsparse::GaussianMixture mix;
};

namespace {

thread_local std::string g_last_error;

nns_status status_of(nnsparse::Errc e) {
  using nnsparse::Errc;
  switch (e) {
    case Errc::invalid_argument:
      return NNS_EINVAL;
    case Errc::parse:
      return NNS_EPARSE;
    case Errc::infeasible:
    case Errc::no_candidates:
      return NNS_EINFEASIBLE;
    case Errc::insufficient_samples:
      return NNS_ESAMPLES;
    case Errc::io:
      return NNS_EIO;
    case Errc::internal:
      return NNS_EINTERNAL;
  }
  return NNS_EINTERNAL;
}

template <typename F>
nns_status guard(F&& fn) {
  try {
    fn();
    return NNS_OK;
  } catch (const nnsparse::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NNS_EINTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NNS_EINTERNAL;
  }
}

nns_status invalid(const char* msg) {
  g_last_error = msg;
  return NNS_EINVAL;
}

}  // namespace

extern "C" {

const char* nns_strerror(nns_status s) {
  switch (s) {
    case NNS_OK:
      return "ok";
    case NNS_EINVAL:
      return "invalid argument";
    case NNS_EPARSE:
      return "malformed input";
    case NNS_EINFEASIBLE:
      return "infeasible or degenerate input";
    case NNS_ESAMPLES:
      return "not enough samples";
    case NNS_EIO:
      return "io failure";
    case NNS_EINTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* nns_last_error(void) { return g_last_error.c_str(); }

const char* nns_version(void) { return "0.1.0"; }

/* ---- systems ---------------------------------------------------------- */

nns_status nns_system_read(const char* path, nns_system** out) {
  if (!path || !out) return invalid("null argument");
  return guard([&] {
    auto sys = std::make_unique<nns_system>();
    sys->raw = nnsparse::read_instance(path);
    sys->norm = nnsparse::normalize_system(sys->raw);
    *out = sys.release();
  });
}

nns_status nns_system_write(const nns_system* sys, const char* path) {
  if (!sys || !path) return invalid("null argument");
  return guard([&] { nnsparse::write_instance(sys->raw, path); });
}

void nns_system_free(nns_system* sys) { delete sys; }

int32_t nns_system_rows(const nns_system* sys) {
  return sys ? sys->raw.m : 0;
}

int32_t nns_system_cols(const nns_system* sys) {
  return sys ? sys->raw.n : 0;
}

int32_t nns_system_cols_stored(const nns_system* sys) {
  return sys ? static_cast<int32_t>(sys->norm.n_stored()) : 0;
}

/* ---- generators ------------------------------------------------------- */

nns_status nns_gen_planted(int32_t m, int32_t n, int32_t k, int yes_case,
                           uint64_t seed, nns_system** out_sys,
                           nns_witness** out_wit, int* regime_ok) {
  if (!out_sys) return invalid("null argument");
  return guard([&] {
    auto inst = nnsparse::gen_planted_setcover(
        m, n, k,
        yes_case ? nnsparse::PlantedCase::yes : nnsparse::PlantedCase::no,
        seed);
    auto sys = std::make_unique<nns_system>();
    sys->raw = std::move(inst.raw);
    sys->norm = std::move(inst.system);
    if (out_wit) {
      *out_wit = nullptr;
      if (inst.witness) *out_wit = new nns_witness{std::move(*inst.witness)};
    }
    if (regime_ok) *regime_ok = inst.regime_ok ? 1 : 0;
    *out_sys = sys.release();
  });
}

nns_status nns_gen_synthetic(int32_t m, int32_t n, int32_t k, double eps0,
                             uint64_t seed, nns_system** out_sys,
                             nns_witness** out_wit) {
  if (!out_sys) return invalid("null argument");
  return guard([&] {
    auto inst = nnsparse::gen_synthetic(m, n, k, eps0, seed);
    auto sys = std::make_unique<nns_system>();
    sys->raw = std::move(inst.raw);
    sys->norm = std::move(inst.system);
    if (out_wit) *out_wit = new nns_witness{std::move(inst.witness)};
    *out_sys = sys.release();
  });
}

nns_status nns_encode_setcover_file(const char* sets_path, int32_t m,
                                    nns_system** out_sys) {
  if (!sets_path || !out_sys) return invalid("null argument");
  return guard([&] {
    const auto sets = nnsparse::read_sets(sets_path);
    auto sys = std::make_unique<nns_system>();
    sys->raw.m = m;
    sys->raw.n = static_cast<int>(sets.size());
    sys->raw.b.assign(static_cast<std::size_t>(m), 1.0);
    for (const auto& set : sets) {
      nnsparse::SparseVec col;
      for (int u : set)
        col.entries.push_back({static_cast<nnsparse::RowIndex>(u), 1.0});
      sys->raw.columns.push_back(std::move(col));
    }
    sys->norm = nnsparse::encode_setcover(sets, m);
    *out_sys = sys.release();
  });
}

/* ---- witnesses -------------------------------------------------------- */

nns_status nns_witness_read(const char* path, nns_witness** out) {
  if (!path || !out) return invalid("null argument");
  return guard([&] { *out = new nns_witness{nnsparse::read_witness(path)}; });
}

nns_status nns_witness_write(const nns_witness* wit, const char* path) {
  if (!wit || !path) return invalid("null argument");
  return guard([&] { nnsparse::write_witness(wit->w, path); });
}

void nns_witness_free(nns_witness* wit) { delete wit; }

nns_status nns_verify_witness(const nns_system* sys, const nns_witness* wit,
                              int* ok) {
  if (!sys || !wit || !ok) return invalid("null argument");
  return guard(
      [&] { *ok = nnsparse::verify_witness(sys->norm, wit->w) ? 1 : 0; });
}

/* ---- solving ---------------------------------------------------------- */

nns_status nns_solve(const nns_system* sys, int32_t k, double epsilon,
                     long budget, int stop_rule, nns_report** out) {
  if (!sys || !out) return invalid("null argument");
  if (stop_rule != NNS_STOP_THEORY && stop_rule != NNS_STOP_RESIDUAL)
    return invalid("stop_rule must be NNS_STOP_THEORY or NNS_STOP_RESIDUAL");
  return guard([&] {
    const auto params = nnsparse::SolverParams::make(k, epsilon, budget);
    const auto rule = stop_rule == NNS_STOP_RESIDUAL
                          ? nnsparse::StopRule::residual
                          : nnsparse::StopRule::theory;
    *out = new nns_report{nnsparse::solve(sys->norm, params, rule)};
  });
}

void nns_report_free(nns_report* rep) { delete rep; }

double nns_report_residual(const nns_report* rep) {
  return rep ? rep->rep.residual : 0.0;
}

long nns_report_iterations(const nns_report* rep) {
  return rep ? rep->rep.iterations : 0;
}

size_t nns_report_support(const nns_report* rep) {
  return rep ? rep->rep.solution.entries.size() : 0;
}

int nns_report_stop_reason(const nns_report* rep) {
  if (!rep) return -1;
  switch (rep->rep.stop_reason) {
    case nnsparse::StopReason::psi_target:
      return NNS_REASON_PSI_TARGET;
    case nnsparse::StopReason::budget:
      return NNS_REASON_BUDGET;
    case nnsparse::StopReason::residual_target:
      return NNS_REASON_RESIDUAL;
  }
  return -1;
}

nns_status nns_report_write_solution(const nns_report* rep, const char* path) {
  if (!rep || !path) return invalid("null argument");
  return guard([&] { nnsparse::write_solution(rep->rep.solution, path); });
}

nns_status nns_report_write_trace(const nns_report* rep, const char* path) {
  if (!rep || !path) return invalid("null argument");
  return guard([&] { nnsparse::write_trace(rep->rep.trace, path); });
}

nns_status nns_eval_solution_file(const char* instance_path,
                                  const char* solution_path, double* out) {
  if (!instance_path || !solution_path || !out) return invalid("null argument");
  return guard([&] {
    const auto raw = nnsparse::read_instance(instance_path);
    const auto norm = nnsparse::normalize_system(raw);
    const auto sol = nnsparse::read_solution(solution_path);
    if (sol.entries.empty())
      nnsparse::fail(nnsparse::Errc::invalid_argument, "empty solution");
    std::vector<double> image(norm.b.size(), 0.0);
    double psi = 0;
    for (const auto& [id, w] : sol.entries) {
      const auto idx = norm.stored_index(id);
      if (!idx)
        nnsparse::fail(nnsparse::Errc::invalid_argument,
                       "solution references unknown or dropped column " +
                           std::to_string(id));
      psi += w;
      for (const auto& [r, a] : norm.columns[*idx].entries)
        image[static_cast<std::size_t>(r)] += w * a;
    }
    double r = 0;
    for (std::size_t j = 0; j < image.size(); ++j)
      r += std::abs(image[j] / psi - norm.b[j]);
    *out = r;
  });
}

/* ---- mixtures --------------------------------------------------------- */

nns_status nns_mixture_read(const char* path, nns_mixture** out) {
  if (!path || !out) return invalid("null argument");
  return guard([&] { *out = new nns_mixture{nnsparse::read_mixture(path)}; });
}

nns_status nns_mixture_write(const nns_mixture* mix, const char* path) {
  if (!mix || !path) return invalid("null argument");
  return guard([&] { nnsparse::write_mixture(mix->mix, path); });
}

void nns_mixture_free(nns_mixture* mix) { delete mix; }

int32_t nns_mixture_dim(const nns_mixture* mix) {
  return mix ? mix->mix.d : 0;
}

int32_t nns_mixture_components(const nns_mixture* mix) {
  return mix ? mix->mix.k() : 0;
}

nns_status nns_mixture_sample_file(const nns_mixture* mix, long n,
                                   uint64_t seed, const char* path) {
  if (!mix || !path) return invalid("null argument");
  return guard([&] {
    nnsparse::write_samples(nnsparse::sample_mixture(mix->mix, n, seed), path);
  });
}

nns_status nns_mixture_l1_file(const char* path_a, const char* path_b,
                               long resolution, double* out,
                               double* err_est) {
  if (!path_a || !path_b || !out) return invalid("null argument");
  return guard([&] {
    const auto a = nnsparse::read_mixture(path_a);
    const auto b = nnsparse::read_mixture(path_b);
    const auto est = nnsparse::mixture_l1_distance(a, b, resolution);
    *out = est.value;
    if (err_est) *err_est = est.error;
  });
}

nns_status nns_learn_file(const char* samples_path, int32_t k, double epsilon,
                          double eps1_override, int32_t n_prime, long budget,
                          int stop_rule, nns_mixture** out_mix,
                          nns_report** out_rep) {
  if (!samples_path || !out_mix) return invalid("null argument");
  if (stop_rule != NNS_STOP_THEORY && stop_rule != NNS_STOP_RESIDUAL)
    return invalid("stop_rule must be NNS_STOP_THEORY or NNS_STOP_RESIDUAL");
  return guard([&] {
    const auto samples = nnsparse::read_samples(samples_path);
    nnsparse::LearnOptions opts;
    opts.eps1_override = eps1_override;
    opts.n_prime = n_prime;
    opts.budget = budget;
    opts.stop = stop_rule == NNS_STOP_RESIDUAL ? nnsparse::StopRule::residual
                                               : nnsparse::StopRule::theory;
    auto result = nnsparse::learn(samples, k, epsilon, opts);
    auto mix = std::make_unique<nns_mixture>();
    mix->mix = std::move(result.mixture);
    if (out_rep) *out_rep = new nns_report{std::move(result.report)};
    *out_mix = mix.release();
  });
}

} /* extern "C" */
