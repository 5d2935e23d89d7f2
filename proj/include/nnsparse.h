/* C interface to the nnsparse library: sparse nonnegative approximation of
 * nonnegative linear systems by greedy potential descent, plus generators
 * for planted set cover / synthetic witnessed instances and a Gaussian
 * mixture learner built on the same solver.
 *
 * All objects are opaque handles created and destroyed by these functions.
 * Every fallible call returns an nns_status; on failure the out parameters
 * are untouched and nns_last_error() describes the problem for the calling
 * thread.  Handles are not thread safe; distinct handles may be used from
 * distinct threads freely.
 */
#ifndef NNSPARSE_H
#define NNSPARSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int nns_status;
#define NNS_OK 0
#define NNS_EINVAL 1   /* invalid argument or handle */
#define NNS_EPARSE 2   /* malformed input file */
#define NNS_EINFEASIBLE 3 /* degenerate target or no usable columns */
#define NNS_ESAMPLES 4 /* not enough samples for the requested accuracy */
#define NNS_EIO 5      /* file system failure */
#define NNS_EINTERNAL 6

const char* nns_strerror(nns_status s);
/* Message for the most recent failure on this thread; empty string if none. */
const char* nns_last_error(void);
const char* nns_version(void);

typedef struct nns_system nns_system;
typedef struct nns_witness nns_witness;
typedef struct nns_report nns_report;
typedef struct nns_mixture nns_mixture;

/* ---- systems ---------------------------------------------------------- */

/* Reads an instance file and normalizes it (unit l1 columns, unit target). */
nns_status nns_system_read(const char* path, nns_system** out);
/* Writes the instance in its original (pre-normalization) values. */
nns_status nns_system_write(const nns_system* sys, const char* path);
void nns_system_free(nns_system* sys);
int32_t nns_system_rows(const nns_system* sys);
int32_t nns_system_cols(const nns_system* sys);        /* before drops */
int32_t nns_system_cols_stored(const nns_system* sys); /* after drops */

/* ---- generators ------------------------------------------------------- */

/* Planted set cover over m elements, n sets.  yes_case != 0 hides an exact
 * k-part cover and produces a witness; otherwise *out_wit (if non-NULL) is
 * set to NULL.  regime_ok, if non-NULL, receives whether the parameters
 * fall in the hardness window m^(3/4) < k < m/ln^2 m. */
nns_status nns_gen_planted(int32_t m, int32_t n, int32_t k, int yes_case,
                           uint64_t seed, nns_system** out_sys,
                           nns_witness** out_wit, int* regime_ok);
/* Dense random columns with a planted k-sparse witness of row slack eps0. */
nns_status nns_gen_synthetic(int32_t m, int32_t n, int32_t k, double eps0,
                             uint64_t seed, nns_system** out_sys,
                             nns_witness** out_wit);
/* Indicator-column encoding of the sets listed in a sets file (one set per
 * line, whitespace separated 0-based element ids) over m elements. */
nns_status nns_encode_setcover_file(const char* sets_path, int32_t m,
                                    nns_system** out_sys);

/* ---- witnesses -------------------------------------------------------- */

nns_status nns_witness_read(const char* path, nns_witness** out);
nns_status nns_witness_write(const nns_witness* wit, const char* path);
void nns_witness_free(nns_witness* wit);
/* *ok receives 1 if the witness verifies against the system: support <= k,
 * unit image mass, per-row slack at most (1+eps0). */
nns_status nns_verify_witness(const nns_system* sys, const nns_witness* wit,
                              int* ok);

/* ---- solving ---------------------------------------------------------- */

#define NNS_STOP_THEORY 0   /* stop on psi target / budget only */
#define NNS_STOP_RESIDUAL 1 /* additionally stop once residual <= epsilon */

#define NNS_REASON_PSI_TARGET 0
#define NNS_REASON_BUDGET 1
#define NNS_REASON_RESIDUAL 2

/* Runs the greedy solver.  budget 0 picks the desk-scale default
 * min(t_theory, ceil(50k/eps)). */
nns_status nns_solve(const nns_system* sys, int32_t k, double epsilon,
                     long budget, int stop_rule, nns_report** out);
void nns_report_free(nns_report* rep);
double nns_report_residual(const nns_report* rep);
long nns_report_iterations(const nns_report* rep);
size_t nns_report_support(const nns_report* rep);
int nns_report_stop_reason(const nns_report* rep);
/* Normalized solution weights (summing to 1) keyed by original column id. */
nns_status nns_report_write_solution(const nns_report* rep, const char* path);
nns_status nns_report_write_trace(const nns_report* rep, const char* path);

/* Residual of a solution file against an instance file, both normalized. */
nns_status nns_eval_solution_file(const char* instance_path,
                                  const char* solution_path, double* out);

/* ---- mixtures --------------------------------------------------------- */

nns_status nns_mixture_read(const char* path, nns_mixture** out);
nns_status nns_mixture_write(const nns_mixture* mix, const char* path);
void nns_mixture_free(nns_mixture* mix);
int32_t nns_mixture_dim(const nns_mixture* mix);
int32_t nns_mixture_components(const nns_mixture* mix);

/* Writes n deterministic draws from the mixture to a sample file. */
nns_status nns_mixture_sample_file(const nns_mixture* mix, long n,
                                   uint64_t seed, const char* path);

/* Quadrature l1 distance between two mixture files (d <= 3).  resolution 0
 * picks a per-dimension default; err_est may be NULL. */
nns_status nns_mixture_l1_file(const char* path_a, const char* path_b,
                               long resolution, double* out,
                               double* err_est);

/* Learns a mixture from a sample file (first half: partitions and
 * candidate pairs; second half: binned target).  eps1_override 0 keeps the
 * default eps^3/(k*d); n_prime 0 keeps the default candidate sample count.
 * On success returns the mixture and the solver report against the binned
 * target. */
nns_status nns_learn_file(const char* samples_path, int32_t k, double epsilon,
                          double eps1_override, int32_t n_prime, long budget,
                          int stop_rule, nns_mixture** out_mix,
                          nns_report** out_rep);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NNSPARSE_H */
