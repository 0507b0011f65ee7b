/* Stable C interface to the clearing workbench. All structured data crosses
 * the boundary as JSON strings; every returned char* must be released with
 * fclear_string_free. Functions return FCLEAR_OK (0) on success or an error
 * code; fclear_last_error() describes the most recent failure on the calling
 * thread. */
#ifndef FCLEAR_H
#define FCLEAR_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fclear_system fclear_system;

enum {
  FCLEAR_OK = 0,
  FCLEAR_E_INVALID_SYSTEM = 1,
  FCLEAR_E_PARSE = 2,
  FCLEAR_E_HASH_MISMATCH = 3,
  FCLEAR_E_DIVERGED = 4,
  FCLEAR_E_ENUM_CAP = 5,
  FCLEAR_E_TOO_MANY_BANKS = 6,
  FCLEAR_E_MISSING_DESIGNATION = 7,
  FCLEAR_E_BAD_K = 8,
  FCLEAR_E_UNSPLITTABLE = 9,
  FCLEAR_E_BAD_ARGUMENT = 10,
  FCLEAR_E_INTERNAL = 99
};

const char* fclear_version(void);
const char* fclear_last_error(void);
void fclear_string_free(char* s);
void fclear_system_free(fclear_system* sys);

/* Systems ----------------------------------------------------------------- */
int fclear_system_from_json(const char* json, fclear_system** out);
int fclear_system_to_json(const fclear_system* sys, char** out_json);

/* Solving / verification --------------------------------------------------- */
/* Result: {"status": "...", "iterations": n, "rates": {...}, "equities": {...}} */
int fclear_solve(const fclear_system* sys, double damping, int max_iterations, double eps,
                 char** out_json);
/* rates_json: {"systemHash"?: "...", "rates": {id: rate}} .
 * Result: {"valid": bool, "violations": [{"bank":..,"kind":..,"detail":..}]} */
int fclear_check(const fclear_system* sys, const char* rates_json, double tol, char** out_json);
int fclear_equities(const fclear_system* sys, const char* rates_json, char** out_json);
/* verdict: "Equal" | "StrictlyBetter" | "StrictlyWorse" | "Incomparable" */
int fclear_pareto_compare(const fclear_system* sys, const char* r1_json, const char* r2_json,
                          double tol, char** out_verdict);

/* Enumeration --------------------------------------------------------------- */
/* manifest_json may be NULL: falls back to default-set enumeration.
 * Result: {"solutions": [{"assignment":.., "rates": {...}}], "diverged": [..],
 *          "summary": {"essentialClasses": n, "paretoFront": [i,..]}} */
int fclear_enumerate(const fclear_system* sys, const char* manifest_json, double tol,
                     char** out_json);

/* Compilation --------------------------------------------------------------- */
/* request: {"op": "objective"|"decision"|"representative"|"pareto"|"showcase",
 *           "graph": "N M\na b\n..."?, "objective": name?, "k":?, "m":?,
 *           "mGenerating":?, "mControls":?, "alpha":?, "beta":?,
 *           "bounded": bool?, "modified": bool?, "kind": showcase-kind?,
 *           "param": int?}
 * out_manifest_json additionally carries designated solutions when the
 * construction defines them. */
int fclear_compile(const char* request_json, char** out_system_json, char** out_manifest_json);
/* Replay a compiled system with bounded weights. */
int fclear_bounded_transform(const char* system_json, const char* manifest_json,
                             char** out_system_json, char** out_manifest_json);

/* Graph oracles ---------------------------------------------------------------- */
/* graph_text: edge-list or DIMACS text. Result:
 * {"maxis": {"size": k, "witness": [v,..]}, "minids": {"size": k, "witness": [..]}}
 * (witnesses 1-indexed, lexicographically smallest). */
int fclear_oracle(const char* graph_text, char** out_json);

/* Objectives ----------------------------------------------------------------- */
/* designation_json: {"v": id?, "v1": id?, "v2": id?, "group2": [id,..]?} or NULL */
int fclear_evaluate_objective(const fclear_system* sys, const char* rates_json,
                              const char* objective_name, const char* designation_json,
                              double* out_value);

/* Dependency graph ------------------------------------------------------------ */
int fclear_depgraph(const fclear_system* sys, int aggregate, char** out_text, char** out_class);

#ifdef __cplusplus
}
#endif

#endif /* FCLEAR_H */
