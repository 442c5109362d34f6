/* C interface to the two-way-automata workbench.
 *
 * Conventions:
 *  - Every function that can fail returns twa_status; on failure,
 *    twa_last_error() (thread-local) describes the problem.
 *  - Strings returned through char** are heap-allocated; release them with
 *    twa_string_free. Handles are released with their *_free function.
 *  - States and squares are 1-based in all JSON documents; machine inputs are
 *    strings over '0'/'1'. Floating-point values in JSON are rounded to 12
 *    significant digits.
 */
#ifndef TWA_H
#define TWA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum twa_status {
    TWA_OK = 0,
    TWA_ERR_INVALID_ARGUMENT = 1, /* bad parameters or malformed machine */
    TWA_ERR_PARSE = 2,            /* malformed JSON */
    TWA_ERR_IO = 3,               /* file could not be read or written */
    TWA_ERR_UNSUPPORTED = 4,      /* operation undefined for this machine kind */
    TWA_ERR_RESOURCE_LIMIT = 5,   /* instance exceeds a documented size limit */
    TWA_ERR_INTERNAL = 6
} twa_status;

typedef struct twa_machine twa_machine;
typedef struct twa_oracle twa_oracle;

/* Message for the most recent failure on this thread; never NULL. */
const char* twa_last_error(void);

void twa_string_free(char* s);

/* Name of the pseudo-random generator used for all seeded sampling. */
const char* twa_rng_name(void);

/* ---- machines ------------------------------------------------------- */

twa_status twa_machine_from_json(const char* json, twa_machine** out);
twa_status twa_machine_from_file(const char* path, twa_machine** out);
twa_status twa_machine_to_json(const twa_machine* m, int pretty, char** json_out);
twa_status twa_machine_save_file(const twa_machine* m, const char* path);
void twa_machine_free(twa_machine* m);

/* {"uniform":bool,"kind":...,"n":...,"num_states":...,"initial":...,
 *  "accept":...,"reject":...,"has_shuffle":bool}; uniform machines omit "n"
 * and "has_shuffle". */
twa_status twa_machine_info(const twa_machine* m, char** json_out);

/* JSON array of violation messages; empty array means the machine is valid. */
twa_status twa_machine_validate(const twa_machine* m, char** json_out);

/* ---- constructions --------------------------------------------------- */
/* Each builder returns the machine and, when report_json is non-NULL, a
 * construction report with the actual state count, the declared bound, and
 * per-phase state accounting. */

twa_status twa_build_saf(int t, int n, twa_machine** out, char** report_json);
twa_status twa_build_usaf(int t, twa_machine** out, char** report_json);
twa_status twa_build_eq(int n, twa_machine** out, char** report_json);

/* ---- function oracles ------------------------------------------------ */
/* Specs: "saf:t=<t>", "usaf:t=<t>", "eq", "table:<path>"; n is the arity. */

twa_status twa_oracle_open(const char* spec, int n, twa_oracle** out);
int twa_oracle_arity(const twa_oracle* o);
twa_status twa_oracle_eval(const twa_oracle* o, const char* bits, int* value_out);
void twa_oracle_free(twa_oracle* o);

/* ---- running ---------------------------------------------------------- */

/* Deterministic, nondeterministic, and uniform machines:
 * {"verdict":"accept"|"reject"|"diverge","steps":...} plus, for deterministic
 * runs with with_trace, "trace":[{"state":...,"square":...}]. Probabilistic
 * machines are rejected with TWA_ERR_UNSUPPORTED. */
twa_status twa_run(const twa_machine* m, const char* input, int with_trace,
                   char** json_out);

/* Probabilistic machines: {"accept":...,"reject":...,"nonhalting":...,
 * "expected_time":number|null,"solver_warning":bool}. */
twa_status twa_acceptance(const twa_machine* m, const char* input, char** json_out);

/* {"decision":"accept"|"reject"|"undecided"} with margin eps. */
twa_status twa_decide(const twa_machine* m, const char* input, double eps,
                      char** json_out);

/* ---- verification ----------------------------------------------------- */

/* Sweeps the machine against the oracle. samples == 0 means exhaustive
 * (arity <= 26, TWA_ERR_RESOURCE_LIMIT beyond); jobs < 1 uses all hardware
 * threads. n == 0 takes the arity from the machine (required for uniform
 * machines, whose arity is free). Oracles of the mark-annotated family
 * restrict sampling and counterexample minimization to well-formed inputs.
 * Report: {"mode","total","mismatches","diverges","max_steps","seed","pass",
 * "counterexamples":[{"input","expected","got"}],"rng"} (wall-clock time is
 * reported separately by the CLI, not in this document). */
twa_status twa_verify(const twa_machine* m, const char* oracle_spec, int n,
                      uint64_t samples, uint64_t seed, int jobs, char** json_out);

/* ---- complexity measures ---------------------------------------------- */

/* Request: {"oracle":spec,"n":...,"order":"id"|"perm:<csv>"|
 * "search:exhaustive"|"search:heuristic","split":"all"|i,
 * "sampled":{"prefixes":...,"probes":...}?,"seed":...?}
 * Response: {"oracle","n","order":[...],"splits":[{"split","count"}...],
 * "max","search_value"?}. Exact counts need n <= 22 and a split side <= 16;
 * "sampled" switches to the seeded lower bound (full coverage of a side
 * upgrades it to enumeration). perm entries are 1-based variable numbers. */
twa_status twa_measure(const char* request_json, char** json_out);

/* ---- size bounds ------------------------------------------------------- */
/* model: "det" | "nondet" | "prob". Results are decimal strings. */

twa_status twa_size_bound(const char* model, int d, uint64_t T, double eps,
                          char** decimal_out);
twa_status twa_size_bound_simplified(int d, uint64_t T, char** decimal_out);

/* Smallest d >= 1 whose bound reaches the decimal subfunction count N. */
twa_status twa_min_size_lower_bound(const char* model, const char* n_decimal,
                                    uint64_t T, double eps, int* d_out);

/* JSON array of {"family","d","guard_satisfied","guard","small_class",
 * "large_class"} rows for d in [d_lo, d_hi]; T must be a power of two. */
twa_status twa_hierarchy_report(int d_lo, int d_hi, const char* n_decimal,
                                uint64_t T, char** json_out);

/* ---- absorbing chains and crossing analysis ---------------------------- */

/* matrix_json: JSON array of m rows of m numbers; state 1 is the start,
 * state m-1 rejects, state m accepts. Response: {"m","valid",
 * "violations":[...],"absorption":...?,"expected_time":number|null?}. */
twa_status twa_chain_analyze(const char* matrix_json, char** json_out);

/* Crossing analysis of input w at boundary u (1 <= u <= n-1):
 * {"split","simulator_accept","crossing_accept","power_accumulated","t_used",
 * "tol","agreed","converged"} plus, with with_matrix, "matrix" (2d+3 square),
 * "start" and "accept_vector". */
twa_status twa_crossing_report(const twa_machine* m, const char* input, int split,
                               double tol, int with_matrix, char** json_out);

/* Robustness check of two chains under closeness derived from eps:
 * {"precondition_ok","a_p","a_pprime","t_used","lambda","beta","gate_holds",
 * "intermediate","conclusion_holds","margin"}. */
twa_status twa_betaclose_lemma(const char* p_json, const char* pprime_json,
                               double eps, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TWA_H */
