/* C interface to the toric endomotive workbench.
 *
 * All functions return a tve_status; every output is either a plain value
 * written through an out-pointer or a heap JSON/CSV string the caller
 * releases with tve_string_free. On failure the out-pointers are left
 * untouched and tve_last_error() carries a message (thread local).
 */
#ifndef TORIC_C_H
#define TORIC_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tve_status {
  TVE_OK = 0,
  TVE_E_PARSE = 1,   /* malformed input (bad JSON, wrong vector length, bad ids) */
  TVE_E_INVALID = 2, /* fan failed semantic validation */
  TVE_E_DOMAIN = 3,  /* precondition violated (singular map, divergence, ...) */
  TVE_E_LIMIT = 4,   /* a configured enumeration/basis cap was exceeded */
  TVE_E_CHECK = 5,   /* a verified relation reported a counterexample */
  TVE_E_INTERNAL = 6
} tve_status;

typedef struct tve_fan tve_fan;
typedef struct tve_symmetry tve_symmetry;
typedef struct tve_law tve_law;

const char* tve_version(void);
const char* tve_status_name(tve_status s);
const char* tve_last_error(void);
void tve_string_free(char* s);

/* ---- fans ---- */
tve_status tve_fan_parse(const char* json, tve_fan** out);
void tve_fan_free(tve_fan* fan);
/* TVE_OK when valid, TVE_E_INVALID otherwise; *report_json is set in both cases. */
tve_status tve_fan_validate(const tve_fan* fan, char** report_json);
tve_status tve_fan_orbits(const tve_fan* fan, char** json);
/* *image_out = cone id, or 0 when no cone contains the image. */
tve_status tve_fan_relint_image(const tve_fan* fan, const char* phi_json, int cone_id, int* image_out);

/* ---- fan symmetries ---- */
tve_status tve_symmetry_compute(const tve_fan* fan, tve_symmetry** out);
void tve_symmetry_free(tve_symmetry* sym);
tve_status tve_symmetry_json(const tve_symmetry* sym, char** json);

/* ---- energy laws ---- */
tve_status tve_law_parse(const tve_fan* fan, const tve_symmetry* sym_or_null, const char* json,
                         tve_law** out);
void tve_law_free(tve_law* law);
tve_status tve_law_covariance_check(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym,
                                    int samples, uint64_t seed, char** json);
/* Carries each anchor cone's energy data along its symmetry orbit;
 * TVE_E_CHECK when some target cone holds conflicting data. */
tve_status tve_law_transport_check(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym,
                                   char** json);

/* Per-cone quotient ranks, primitive orbit representatives within the
 * radius, convergence abscissae (and energies when a law is given). */
tve_status tve_spectrum(const tve_fan* fan, const tve_symmetry* sym, const tve_law* law_or_null,
                        int64_t radius, char** json);

/* ---- partition functions and Gibbs states ---- */
/* mode: "additive" | "multiplicative" | "factored" */
tve_status tve_partition(const tve_fan* fan, const tve_law* law, const tve_symmetry* sym_or_null,
                         double beta, int64_t radius, const char* mode, int threads, char** json);
tve_status tve_partition_sweep_csv(const tve_fan* fan, const tve_law* law,
                                   const tve_symmetry* sym_or_null, double beta_start, double beta_stop,
                                   double beta_step, int64_t radius, const char* mode, int threads,
                                   char** csv);
/* r_json: a fraction string ("1/5", broadcast) or one array of fractions per cone. */
tve_status tve_gibbs(const tve_fan* fan, const tve_law* law, const char* r_json, double beta,
                     int64_t radius, const char* mode, int threads, char** json);
tve_status tve_riemann_zeta(double beta, double* out);

/* ---- crossed-product relation checks ---- */
/* Runs conjugation and transfer for phi and r on the truncated
 * representation, plus covariance when a law is given. TVE_E_CHECK when a
 * deviation exceeds 1e-12. mode: "additive" | "multiplicative". */
tve_status tve_relations(const tve_fan* fan, const char* phi_json, const char* r_json,
                         const tve_law* law_or_null, double time_t_param, int64_t radius,
                         const char* mode, char** json);

/* ---- integral models ---- */
tve_status tve_frobenius_suite(int64_t n_max, int rho_max, const char* primes_json, int random_trials,
                               uint64_t seed, char** json);
tve_status tve_levels(const tve_fan* fan, int64_t n, char** json);
tve_status tve_transition_check(const tve_fan* fan, const tve_symmetry* sym_or_null, int64_t n,
                                int64_t t, char** json);

/* ---- heights ---- */
/* coords_json: array of integer/fraction strings; affine != 0 embeds as (1 : x). */
tve_status tve_height_point(const char* coords_json, int affine, char** json);
tve_status tve_height_enumerate(int d, int64_t max_height, char** json);
/* spec_json: {"kind":"family","alpha":"3/2","coords":["1","2"],"radius":2}
 *          | {"kind":"geometric","base":"2","kmax":10000}
 *          | {"kind":"bounded","d":1,"max_height":10} */
tve_status tve_height_zeta(const char* spec_json, double beta, char** json);
tve_status tve_height_scaling_suite(int d, int trials, uint64_t seed, char** json);
/* CSV rows (k, k', H, h) of a monomial family; huge H values are elided. */
tve_status tve_height_family_csv(const char* spec_json, char** csv);

/* ---- torified spaces ---- */
/* spec_json: {"c":1.0,"components":[{"dim":1,"gram":[[1]]},{"dim":0}]} ,
 * monoid: "Z" | "N". */
tve_status tve_torified(const char* spec_json, double beta, int64_t radius, const char* mode,
                        const char* monoid, int threads, char** json);

#ifdef __cplusplus
}
#endif

#endif /* TORIC_C_H */
