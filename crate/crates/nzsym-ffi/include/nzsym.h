/* C ABI for the nzsym library. Generated by cbindgen; do not edit. */

#ifndef NZSYM_H
#define NZSYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call in this ABI.
typedef enum NzStatus {
  // The call succeeded and all out parameters are valid.
  NZ_STATUS_OK = 0,
  // A required pointer argument was NULL.
  NZ_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  NZ_STATUS_INVALID_UTF8 = 2,
  // The input could not be parsed or names no known fixture.
  NZ_STATUS_INVALID_INPUT = 3,
  // The operation does not apply to this input (wrong degree, open
  // complex, non-surface link, ...).
  NZ_STATUS_UNSUPPORTED = 4,
  // The requested verification ran and at least one check failed.
  NZ_STATUS_CHECK_FAILED = 5,
  // The solver ran but found no unique geometric solution.
  NZ_STATUS_NO_SOLUTION = 6,
  // An internal invariant was violated; the library caught a panic.
  NZ_STATUS_INTERNAL = 7,
} NzStatus;

// Opaque handle to a validated triangulation; create with
// `nz_tri_fixture` or `nz_tri_parse`, release with `nz_tri_free`.
typedef struct NzTriangulation NzTriangulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns a static, NUL-terminated name for a status code.
const char *nz_status_name(enum NzStatus status);

// Creates a triangulation from a built-in fixture name
// (`single`, `fig8`, `pglue`, `annulus`).
//
// On success writes a handle to `*out`; release it with `nz_tri_free`.
//
// # Safety
// `name` must be NULL or a valid NUL-terminated string; `out` must be NULL
// or a valid pointer to a pointer.
enum NzStatus nz_tri_fixture(const char *name, struct NzTriangulation **out);

// Parses a triangulation from its JSON interchange format.
//
// On success writes a handle to `*out`; release it with `nz_tri_free`.
//
// # Safety
// `json` must be NULL or a valid NUL-terminated string; `out` must be NULL
// or a valid pointer to a pointer.
enum NzStatus nz_tri_parse(const char *json, struct NzTriangulation **out);

// Releases a triangulation handle.  NULL is a no-op.
//
// # Safety
// `tri` must be NULL or a pointer previously returned by `nz_tri_fixture`
// or `nz_tri_parse` that has not been freed.
void nz_tri_free(struct NzTriangulation *tri);

// Number of tetrahedra, or -1 if `tri` is NULL.
//
// # Safety
// `tri` must be NULL or a live handle.
int64_t nz_tri_tetrahedra(const struct NzTriangulation *tri);

// 1 if every face is glued, 0 if the complex has free faces, -1 if `tri`
// is NULL.
//
// # Safety
// `tri` must be NULL or a live handle.
int32_t nz_tri_is_closed(const struct NzTriangulation *tri);

// Total number of degree-`n` lattice points over all tetrahedra, or -1 on
// a NULL handle or a degree outside 2..=16.
//
// # Safety
// `tri` must be NULL or a live handle.
int64_t nz_point_count(const struct NzTriangulation *tri, int64_t n);

// Free rank of the symplectic quotient homology `H(J)` at degree `n`, or
// -1 on a NULL handle or a degree outside 2..=16.
//
// # Safety
// `tri` must be NULL or a live handle.
int64_t nz_dim_hj(const struct NzTriangulation *tri, int64_t n);

// Runs the exact verification suite at degree `n`: the complex identities,
// the dimension formula, and — when the complex has torus or annulus
// links — the chain pairing, holonomy congruence, and ×4 checks.
//
// Returns `NZ_STATUS_OK` when every applicable check passes and
// `NZ_STATUS_CHECK_FAILED` otherwise.
//
// # Safety
// `tri` must be NULL or a live handle.
enum NzStatus nz_verify(const struct NzTriangulation *tri, int64_t n);

// Exports the multiplicative face/edge equation system at degree `n` as a
// JSON string (`pretty` != 0 indents it).
//
// On success `*out` receives a heap-allocated C string; release it with
// `nz_string_free`.
//
// # Safety
// `tri` must be NULL or a live handle; `out` must be NULL or a valid
// pointer to a pointer.
enum NzStatus nz_equations_json(const struct NzTriangulation *tri,
                                int64_t n,
                                int32_t pretty,
                                char **out);

// Runs the degree-2 gluing solver with the default tolerances and the
// given seed, and exports the full solution report as a JSON string
// (`pretty` != 0 indents it).
//
// Returns `NZ_STATUS_OK` with the report even when no solution is
// geometric; returns `NZ_STATUS_UNSUPPORTED` when the complex is open or a
// link is not a torus.  Release `*out` with `nz_string_free`.
//
// # Safety
// `tri` must be NULL or a live handle; `out` must be NULL or a valid
// pointer to a pointer.
enum NzStatus nz_solve2_json(const struct NzTriangulation *tri,
                             uint64_t seed,
                             int32_t pretty,
                             char **out);

// Solves the degree-2 system and writes the shapes of the unique complete
// positively oriented solution into `shapes` as `len` doubles — the
// interleaved real and imaginary parts, tetrahedron by tetrahedron, so
// `len` must be `2 * nz_tri_tetrahedra(tri)`.
//
// Returns `NZ_STATUS_NO_SOLUTION` when the search finds no unique
// geometric solution and `NZ_STATUS_UNSUPPORTED` when the complex is open
// or a link is not a torus.
//
// # Safety
// `tri` must be NULL or a live handle; `shapes` must be NULL or a valid
// buffer of `len` doubles.
enum NzStatus nz_geometric_shapes(const struct NzTriangulation *tri,
                                  uint64_t seed,
                                  double *shapes,
                                  size_t len);

// Releases a string returned by this library.  NULL is a no-op.
//
// # Safety
// `s` must be NULL or a pointer previously returned through an `out`
// parameter of this library that has not been freed.
void nz_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NZSYM_H */
