#ifndef RKHS_INVERT_H
#define RKHS_INVERT_H

#include <stddef.h>
#include <stdint.h>

typedef enum RkhsStatus {
  RKHS_STATUS_OK = 0,
  RKHS_STATUS_NULL_POINTER = 1,
  RKHS_STATUS_INVALID_PARAMETER = 2,
  RKHS_STATUS_OUTSIDE_DOMAIN = 3,
  RKHS_STATUS_GRID_MISMATCH = 4,
  RKHS_STATUS_NUMERICAL = 5,
  RKHS_STATUS_CHECK_FAILED = 6,
  RKHS_STATUS_INVALID_UTF8 = 7,
  RKHS_STATUS_PANIC = 8,
} RkhsStatus;

typedef enum RkhsWeight {
  // `ρ ≡ 1`.
  RKHS_WEIGHT_CONST = 0,
  // `ρ(t) = 1 + t`.
  RKHS_WEIGHT_AFFINE = 1,
} RkhsWeight;

// Opaque Paley–Wiener feature map.
typedef struct RkhsPwMap RkhsPwMap;

// Opaque Sobolev space `H_{c,ρ}(I)` on a fixed grid.
typedef struct RkhsSobolevSpace RkhsSobolevSpace;

// Opaque span basis of Sobolev sections.
typedef struct RkhsSpanBasis RkhsSpanBasis;

typedef struct RkhsComplex {
  double re;
  double im;
} RkhsComplex;

typedef struct RkhsSincReport {
  double lhs;
  double rhs;
  double abs_err;
} RkhsSincReport;

typedef struct RkhsInversion {
  struct RkhsComplex value;
  double residual;
  double bound;
} RkhsInversion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the next call.
const char *rkhs_last_error(void);

// Library version as a static NUL-terminated string.
const char *rkhs_version(void);

// Median of three extended reals; `±INFINITY` are the infinite endpoints. NaN input gives NaN.
double rkhs_med3(double x, double y, double z);

// Closed-form kernel of `H_{c,ρ}((lo, hi))`.
//
// # Safety
// `out` must be valid for a write.
enum RkhsStatus rkhs_sobolev_kernel(double lo,
                                    double hi,
                                    double c,
                                    enum RkhsWeight rho,
                                    double x,
                                    double y,
                                    double *out);

// Paley–Wiener kernel `K_a(x, y)` at complex points.
//
// # Safety
// `out` must be valid for a write.
enum RkhsStatus rkhs_pw_kernel(double a,
                               struct RkhsComplex x,
                               struct RkhsComplex y,
                               struct RkhsComplex *out);

// Truncated line integral of a product of two sinc sections against its closed form.
//
// # Safety
// `out` must be valid for a write.
enum RkhsStatus rkhs_sinc_identity_check(double a,
                                         double x,
                                         double y,
                                         double radius,
                                         struct RkhsSincReport *out);

// # Safety
// `out` must be valid for a write; the handle is released with [`rkhs_sobolev_space_free`].
enum RkhsStatus rkhs_sobolev_space_new(double lo,
                                       double hi,
                                       double c,
                                       enum RkhsWeight rho,
                                       size_t panels,
                                       size_t nodes_per_panel,
                                       const double *breaks,
                                       size_t n_breaks,
                                       struct RkhsSobolevSpace **out);

// # Safety
// `h` must be null or a handle from [`rkhs_sobolev_space_new`] not yet freed.
void rkhs_sobolev_space_free(struct RkhsSobolevSpace *h);

// Quadrature Gram entry `⟨φ(y), φ(x)⟩` on the handle's grid.
//
// # Safety
// `h` must be a live handle and `out` valid for a write.
enum RkhsStatus rkhs_sobolev_space_gram(const struct RkhsSobolevSpace *h,
                                        double x,
                                        double y,
                                        double *out);

// # Safety
// `out` must be valid for a write; the handle is released with [`rkhs_pw_map_free`].
enum RkhsStatus rkhs_pw_map_new(double a,
                                double max_abs_x,
                                size_t nodes_per_panel,
                                struct RkhsPwMap **out);

// # Safety
// `map` must be null or a handle from [`rkhs_pw_map_new`] not yet freed.
void rkhs_pw_map_free(struct RkhsPwMap *map);

// Quadrature Gram entry of the Paley–Wiener features at real points.
//
// # Safety
// `map` must be a live handle and `out` valid for a write.
enum RkhsStatus rkhs_pw_map_gram(const struct RkhsPwMap *map,
                                 double x,
                                 double y,
                                 struct RkhsComplex *out);

// Span basis of the sections `k_x`, `x ∈ points`.
//
// # Safety
// `h` must be a live handle, `points` readable for `n` values, `out` valid for a write.
enum RkhsStatus rkhs_span_basis_new(const struct RkhsSobolevSpace *h,
                                    const double *points,
                                    size_t n,
                                    struct RkhsSpanBasis **out);

// # Safety
// `basis` must be null or a handle from [`rkhs_span_basis_new`] not yet freed.
void rkhs_span_basis_free(struct RkhsSpanBasis *basis);

// Numerical rank of the basis Gram matrix; 0 for a null handle.
//
// # Safety
// `basis` must be null or a live handle.
size_t rkhs_span_basis_rank(const struct RkhsSpanBasis *basis);

// Transforms `f = Σ coeffs[i] k_{x_i}` and recovers `f(t)` from the transform alone.
//
// # Safety
// Handles must be live, `coeffs` readable for the basis length, `out` valid for a write.
enum RkhsStatus rkhs_invert_span_member(const struct RkhsSobolevSpace *h,
                                        const struct RkhsSpanBasis *basis,
                                        const struct RkhsComplex *coeffs,
                                        size_t n,
                                        double t,
                                        struct RkhsInversion *out);

// Runs a verification suite and returns its JSON report through `out_json`.
//
// Returns [`RkhsStatus::CheckFailed`] when the report does not pass; the JSON is
// still written. Release it with [`rkhs_string_free`].
//
// # Safety
// `suite` must be a NUL-terminated string and `out_json` valid for a write.
enum RkhsStatus rkhs_verify_suite(const char *suite, uint64_t seed, char **out_json);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void rkhs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RKHS_INVERT_H */
