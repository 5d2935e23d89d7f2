// Command line front end for the nnsparse shared library.  Every operation
// goes through the C API in nnsparse.h; nothing here touches the C++ core
// directly.  Exit codes: 0 success, 2 bad usage or malformed input,
// 3 infeasible or degenerate input, 4 not enough samples, 1 anything else.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "nnsparse.h"

namespace {

int exit_code_of(nns_status s) {
  switch (s) {
    case NNS_OK:
      return 0;
    case NNS_EINVAL:
    case NNS_EPARSE:
      return 2;
    case NNS_EINFEASIBLE:
      return 3;
    case NNS_ESAMPLES:
      return 4;
    default:
      return 1;
  }
}

int report_failure(nns_status s) {
  std::fprintf(stderr, "error: %s (%s)\n", nns_last_error(), nns_strerror(s));
  return exit_code_of(s);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using SystemPtr = std::unique_ptr<nns_system, decltype(&nns_system_free)>;
using WitnessPtr = std::unique_ptr<nns_witness, decltype(&nns_witness_free)>;
using ReportPtr = std::unique_ptr<nns_report, decltype(&nns_report_free)>;
using MixturePtr = std::unique_ptr<nns_mixture, decltype(&nns_mixture_free)>;

const char* reason_name(int reason) {
  switch (reason) {
    case NNS_REASON_PSI_TARGET:
      return "psi_target";
    case NNS_REASON_BUDGET:
      return "budget";
    case NNS_REASON_RESIDUAL:
      return "residual_target";
    default:
      return "unknown";
  }
}

struct SolveArgs {
  std::string in, out, trace, stop = "theory", format = "human";
  int k = 0;
  double epsilon = 0;
  long budget = 0;
};

int run_solve(const SolveArgs& a) {
  nns_system* sys_raw = nullptr;
  nns_status st = nns_system_read(a.in.c_str(), &sys_raw);
  if (st != NNS_OK) return report_failure(st);
  SystemPtr sys(sys_raw, &nns_system_free);

  nns_report* rep_raw = nullptr;
  st = nns_solve(sys.get(), a.k, a.epsilon, a.budget,
                 a.stop == "residual" ? NNS_STOP_RESIDUAL : NNS_STOP_THEORY,
                 &rep_raw);
  if (st != NNS_OK) return report_failure(st);
  ReportPtr rep(rep_raw, &nns_report_free);

  if (!a.out.empty()) {
    st = nns_report_write_solution(rep.get(), a.out.c_str());
    if (st != NNS_OK) return report_failure(st);
  }
  if (!a.trace.empty()) {
    st = nns_report_write_trace(rep.get(), a.trace.c_str());
    if (st != NNS_OK) return report_failure(st);
  }

  const double residual = nns_report_residual(rep.get());
  const size_t support = nns_report_support(rep.get());
  const char* reason = reason_name(nns_report_stop_reason(rep.get()));
  if (a.format == "tsv")
    std::printf("%s\t%zu\t%s\n", g17(residual).c_str(), support, reason);
  else
    std::printf("residual=%s support=%zu stop=%s\n", g17(residual).c_str(),
                support, reason);
  return 0;
}

struct LearnArgs {
  std::string in, out, trace, stop = "theory", format = "human";
  int k = 0;
  double epsilon = 0;
  double eps1 = 0;
  int nprime = 0;
  long budget = 0;
};

int run_learn(const LearnArgs& a) {
  nns_mixture* mix_raw = nullptr;
  nns_report* rep_raw = nullptr;
  nns_status st = nns_learn_file(
      a.in.c_str(), a.k, a.epsilon, a.eps1, a.nprime, a.budget,
      a.stop == "residual" ? NNS_STOP_RESIDUAL : NNS_STOP_THEORY, &mix_raw,
      &rep_raw);
  if (st != NNS_OK) return report_failure(st);
  MixturePtr mix(mix_raw, &nns_mixture_free);
  ReportPtr rep(rep_raw, &nns_report_free);

  if (!a.out.empty()) {
    st = nns_mixture_write(mix.get(), a.out.c_str());
    if (st != NNS_OK) return report_failure(st);
  }
  if (!a.trace.empty()) {
    st = nns_report_write_trace(rep.get(), a.trace.c_str());
    if (st != NNS_OK) return report_failure(st);
  }
  const double residual = nns_report_residual(rep.get());
  const int comps = nns_mixture_components(mix.get());
  if (a.format == "tsv")
    std::printf("%s\t%d\n", g17(residual).c_str(), comps);
  else
    std::printf("binned_residual=%s components=%d\n", g17(residual).c_str(),
                comps);
  return 0;
}

struct PlantedArgs {
  std::string out, witness, which = "no";
  int m = 0, n = 0, k = 0;
  std::uint64_t seed = 0;
};

int run_gen_planted(const PlantedArgs& a) {
  nns_system* sys_raw = nullptr;
  nns_witness* wit_raw = nullptr;
  int regime = 0;
  const int yes = a.which == "yes" ? 1 : 0;
  nns_status st =
      nns_gen_planted(a.m, a.n, a.k, yes, a.seed, &sys_raw, &wit_raw, &regime);
  if (st != NNS_OK) return report_failure(st);
  SystemPtr sys(sys_raw, &nns_system_free);
  WitnessPtr wit(wit_raw, &nns_witness_free);

  if (!a.witness.empty()) {
    if (!wit) {
      std::fprintf(stderr,
                   "error: no-case instances carry no witness to write\n");
      return 2;
    }
    st = nns_witness_write(wit.get(), a.witness.c_str());
    if (st != NNS_OK) return report_failure(st);
  }
  st = nns_system_write(sys.get(), a.out.c_str());
  if (st != NNS_OK) return report_failure(st);
  std::printf("regime_ok=%d\n", regime);
  return 0;
}

struct SyntheticArgs {
  std::string out, witness;
  int m = 0, n = 0, k = 0;
  double eps0 = 0;
  std::uint64_t seed = 0;
};

int run_gen_synthetic(const SyntheticArgs& a) {
  nns_system* sys_raw = nullptr;
  nns_witness* wit_raw = nullptr;
  nns_status st =
      nns_gen_synthetic(a.m, a.n, a.k, a.eps0, a.seed, &sys_raw, &wit_raw);
  if (st != NNS_OK) return report_failure(st);
  SystemPtr sys(sys_raw, &nns_system_free);
  WitnessPtr wit(wit_raw, &nns_witness_free);

  if (!a.witness.empty()) {
    st = nns_witness_write(wit.get(), a.witness.c_str());
    if (st != NNS_OK) return report_failure(st);
  }
  st = nns_system_write(sys.get(), a.out.c_str());
  if (st != NNS_OK) return report_failure(st);
  return 0;
}

struct SetcoverArgs {
  std::string sets, out;
  int m = 0;
};

int run_gen_setcover(const SetcoverArgs& a) {
  nns_system* sys_raw = nullptr;
  nns_status st = nns_encode_setcover_file(a.sets.c_str(), a.m, &sys_raw);
  if (st != NNS_OK) return report_failure(st);
  SystemPtr sys(sys_raw, &nns_system_free);
  st = nns_system_write(sys.get(), a.out.c_str());
  if (st != NNS_OK) return report_failure(st);
  return 0;
}

struct SampleArgs {
  std::string in, out;
  long n = 0;
  std::uint64_t seed = 0;
};

int run_sample(const SampleArgs& a) {
  nns_mixture* mix_raw = nullptr;
  nns_status st = nns_mixture_read(a.in.c_str(), &mix_raw);
  if (st != NNS_OK) return report_failure(st);
  MixturePtr mix(mix_raw, &nns_mixture_free);
  st = nns_mixture_sample_file(mix.get(), a.n, a.seed, a.out.c_str());
  if (st != NNS_OK) return report_failure(st);
  return 0;
}

struct EvalArgs {
  std::string instance, solution, a, b;
  long resolution = 0;
};

int run_eval(const EvalArgs& e) {
  const bool pair_mode = !e.a.empty() || !e.b.empty();
  const bool sol_mode = !e.instance.empty() || !e.solution.empty();
  if (pair_mode == sol_mode) {
    std::fprintf(stderr,
                 "error: eval needs either --instance with --solution or "
                 "--a with --b\n");
    return 2;
  }
  if (sol_mode) {
    if (e.instance.empty() || e.solution.empty()) {
      std::fprintf(stderr, "error: --instance and --solution go together\n");
      return 2;
    }
    double residual = 0;
    nns_status st = nns_eval_solution_file(e.instance.c_str(),
                                           e.solution.c_str(), &residual);
    if (st != NNS_OK) return report_failure(st);
    std::printf("residual=%s\n", g17(residual).c_str());
    return 0;
  }
  if (e.a.empty() || e.b.empty()) {
    std::fprintf(stderr, "error: --a and --b go together\n");
    return 2;
  }
  double dist = 0, err = 0;
  nns_status st =
      nns_mixture_l1_file(e.a.c_str(), e.b.c_str(), e.resolution, &dist, &err);
  if (st != NNS_OK) return report_failure(st);
  std::printf("l1=%s err_est=%s\n", g17(dist).c_str(), g17(err).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse nonnegative solver and Gaussian mixture learner"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand(
      "solve", "greedy sparse approximation of an instance file");
  solve->add_option("--in", solve_args.in, "instance file")->required();
  solve->add_option("--k", solve_args.k, "target sparsity")->required();
  solve->add_option("--epsilon", solve_args.epsilon, "target residual")
      ->required();
  solve->add_option("--budget", solve_args.budget,
                    "iteration cap (0 = default)");
  solve->add_option("--stop", solve_args.stop, "stop rule")
      ->check(CLI::IsMember({"theory", "residual"}));
  solve->add_option("--out", solve_args.out, "solution file to write");
  solve->add_option("--trace", solve_args.trace, "per-step trace file");
  solve->add_option("--format", solve_args.format, "summary format")
      ->check(CLI::IsMember({"human", "tsv"}));

  LearnArgs learn_args;
  auto* learn = app.add_subcommand(
      "learn", "learn an axis-aligned Gaussian mixture from samples");
  learn->add_option("--in", learn_args.in, "samples file")->required();
  learn->add_option("--k", learn_args.k, "component count")->required();
  learn->add_option("--epsilon", learn_args.epsilon, "accuracy")->required();
  learn->add_option("--eps1", learn_args.eps1,
                    "partition mass override (0 = default)");
  learn->add_option("--nprime", learn_args.nprime,
                    "candidate sample count (0 = default)");
  learn->add_option("--budget", learn_args.budget,
                    "iteration cap (0 = default)");
  learn->add_option("--stop", learn_args.stop, "stop rule")
      ->check(CLI::IsMember({"theory", "residual"}));
  learn->add_option("--out", learn_args.out, "mixture file to write");
  learn->add_option("--trace", learn_args.trace,
                    "per-iteration trace file for the mixing solve");
  learn->add_option("--format", learn_args.format, "summary format")
      ->check(CLI::IsMember({"human", "tsv"}));

  auto* gen = app.add_subcommand("gen", "instance generators");
  gen->require_subcommand(1);

  PlantedArgs planted_args;
  auto* planted =
      gen->add_subcommand("planted", "planted set cover indicator instance");
  planted->add_option("--m", planted_args.m, "elements")->required();
  planted->add_option("--n", planted_args.n, "sets")->required();
  planted->add_option("--k", planted_args.k, "cover size")->required();
  planted->add_option("--case", planted_args.which, "yes|no")
      ->check(CLI::IsMember({"yes", "no"}))
      ->required();
  planted->add_option("--seed", planted_args.seed, "rng seed");
  planted->add_option("--out", planted_args.out, "instance file to write")
      ->required();
  planted->add_option("--witness", planted_args.witness,
                      "witness file to write (yes case)");

  SyntheticArgs synthetic_args;
  auto* synthetic = gen->add_subcommand(
      "synthetic", "dense random instance with a planted sparse witness");
  synthetic->add_option("--m", synthetic_args.m, "rows")->required();
  synthetic->add_option("--n", synthetic_args.n, "columns")->required();
  synthetic->add_option("--k", synthetic_args.k, "witness support")
      ->required();
  synthetic->add_option("--eps0", synthetic_args.eps0, "row slack");
  synthetic->add_option("--seed", synthetic_args.seed, "rng seed");
  synthetic->add_option("--out", synthetic_args.out,
                        "instance file to write")
      ->required();
  synthetic->add_option("--witness", synthetic_args.witness,
                        "witness file to write");

  SetcoverArgs setcover_args;
  auto* setcover = gen->add_subcommand(
      "setcover", "indicator instance from an explicit sets file");
  setcover->add_option("--sets", setcover_args.sets, "sets file")->required();
  setcover->add_option("--m", setcover_args.m, "elements")->required();
  setcover->add_option("--out", setcover_args.out, "instance file to write")
      ->required();

  SampleArgs sample_args;
  auto* sample =
      app.add_subcommand("sample", "draw i.i.d. samples from a mixture file");
  sample->add_option("--in", sample_args.in, "mixture file")->required();
  sample->add_option("--n", sample_args.n, "sample count")->required();
  sample->add_option("--seed", sample_args.seed, "rng seed");
  sample->add_option("--out", sample_args.out, "samples file to write")
      ->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "residual of a solution file, or l1 distance of two mixtures");
  eval->add_option("--instance", eval_args.instance, "instance file");
  eval->add_option("--solution", eval_args.solution, "solution file");
  eval->add_option("--a", eval_args.a, "first mixture file");
  eval->add_option("--b", eval_args.b, "second mixture file");
  eval->add_option("--resolution", eval_args.resolution,
                   "quadrature points per axis (0 = default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help or version
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  if (solve->parsed()) return run_solve(solve_args);
  if (learn->parsed()) return run_learn(learn_args);
  if (gen->parsed()) {
    if (planted->parsed()) return run_gen_planted(planted_args);
    if (synthetic->parsed()) return run_gen_synthetic(synthetic_args);
    if (setcover->parsed()) return run_gen_setcover(setcover_args);
  }
  if (sample->parsed()) return run_sample(sample_args);
  if (eval->parsed()) return run_eval(eval_args);
  std::fprintf(stderr, "error: no subcommand\n");
  return 2;
}
