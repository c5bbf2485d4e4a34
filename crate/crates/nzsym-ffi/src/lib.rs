//! C ABI for the core library.
//!
//! The surface follows the usual conventions for C consumers:
//!
//! * **Opaque handles.** A triangulation lives behind an opaque
//!   [`NzTriangulation`] pointer created by `nz_tri_fixture` / `nz_tri_parse`
//!   and released by `nz_tri_free`.
//! * **Error codes.** Every fallible call returns an [`NzStatus`]; out
//!   parameters are written only on `NZ_STATUS_OK`.  `nz_status_name` maps a
//!   code to a static descriptive string.
//! * **Strings.** JSON exports are NUL-terminated, UTF-8, heap-allocated C
//!   strings owned by the caller and released with `nz_string_free`.
//!
//! All computation panics are caught at the boundary and reported as
//! `NZ_STATUS_INTERNAL`; no unwinding crosses the ABI.
//!
//! The matching header `include/nzsym.h` is generated by `cbindgen` at build
//! time.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nzsym::config::Tolerances;
use nzsym::flags::solve_gluing_n2;
use nzsym::gluing::GluedComplex;
use nzsym::peripheral::{HConvention, Peripheral};
use nzsym::report::Status;
use nzsym::triangulation::Triangulation;

/// Result code of every fallible call in this ABI.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NzStatus {
    /// The call succeeded and all out parameters are valid.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input could not be parsed or names no known fixture.
    InvalidInput = 3,
    /// The operation does not apply to this input (wrong degree, open
    /// complex, non-surface link, ...).
    Unsupported = 4,
    /// The requested verification ran and at least one check failed.
    CheckFailed = 5,
    /// The solver ran but found no unique geometric solution.
    NoSolution = 6,
    /// An internal invariant was violated; the library caught a panic.
    Internal = 7,
}

/// Opaque handle to a validated triangulation; create with
/// `nz_tri_fixture` or `nz_tri_parse`, release with `nz_tri_free`.
pub struct NzTriangulation {
    tri: Triangulation,
}

fn degree_ok(n: i64) -> bool {
    (2..=16).contains(&n)
}

/// Runs `f` with panics converted to `NZ_STATUS_INTERNAL`.
fn guarded<F: FnOnce() -> NzStatus>(f: F) -> NzStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(NzStatus::Internal)
}

/// Reads a required UTF-8 C string argument.
///
/// # Safety
/// `s` must be NULL or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, NzStatus> {
    if s.is_null() {
        return Err(NzStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| NzStatus::InvalidUtf8)
}

fn export_string(text: String, out: *mut *mut c_char) -> NzStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            NzStatus::Ok
        }
        Err(_) => NzStatus::Internal,
    }
}

/// Returns a static, NUL-terminated name for a status code.
#[no_mangle]
pub extern "C" fn nz_status_name(status: NzStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        NzStatus::Ok => b"ok\0",
        NzStatus::NullArgument => b"null argument\0",
        NzStatus::InvalidUtf8 => b"invalid utf-8\0",
        NzStatus::InvalidInput => b"invalid input\0",
        NzStatus::Unsupported => b"unsupported input\0",
        NzStatus::CheckFailed => b"check failed\0",
        NzStatus::NoSolution => b"no geometric solution\0",
        NzStatus::Internal => b"internal error\0",
    };
    name.as_ptr() as *const c_char
}

/// Creates a triangulation from a built-in fixture name
/// (`single`, `fig8`, `pglue`, `annulus`).
///
/// On success writes a handle to `*out`; release it with `nz_tri_free`.
///
/// # Safety
/// `name` must be NULL or a valid NUL-terminated string; `out` must be NULL
/// or a valid pointer to a pointer.
#[no_mangle]
pub unsafe extern "C" fn nz_tri_fixture(
    name: *const c_char,
    out: *mut *mut NzTriangulation,
) -> NzStatus {
    if out.is_null() {
        return NzStatus::NullArgument;
    }
    let name = match read_str(name) {
        Ok(s) => s,
        Err(e) => return e,
    };
    guarded(|| match Triangulation::fixture(name) {
        Some(tri) => {
            *out = Box::into_raw(Box::new(NzTriangulation { tri }));
            NzStatus::Ok
        }
        None => NzStatus::InvalidInput,
    })
}

/// Parses a triangulation from its JSON interchange format.
///
/// On success writes a handle to `*out`; release it with `nz_tri_free`.
///
/// # Safety
/// `json` must be NULL or a valid NUL-terminated string; `out` must be NULL
/// or a valid pointer to a pointer.
#[no_mangle]
pub unsafe extern "C" fn nz_tri_parse(
    json: *const c_char,
    out: *mut *mut NzTriangulation,
) -> NzStatus {
    if out.is_null() {
        return NzStatus::NullArgument;
    }
    let json = match read_str(json) {
        Ok(s) => s,
        Err(e) => return e,
    };
    guarded(|| match Triangulation::parse(json) {
        Ok(tri) => {
            *out = Box::into_raw(Box::new(NzTriangulation { tri }));
            NzStatus::Ok
        }
        Err(_) => NzStatus::InvalidInput,
    })
}

/// Releases a triangulation handle.  NULL is a no-op.
///
/// # Safety
/// `tri` must be NULL or a pointer previously returned by `nz_tri_fixture`
/// or `nz_tri_parse` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nz_tri_free(tri: *mut NzTriangulation) {
    if !tri.is_null() {
        drop(Box::from_raw(tri));
    }
}

/// Number of tetrahedra, or -1 if `tri` is NULL.
///
/// # Safety
/// `tri` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nz_tri_tetrahedra(tri: *const NzTriangulation) -> i64 {
    match tri.as_ref() {
        Some(t) => t.tri.tet_count() as i64,
        None => -1,
    }
}

/// 1 if every face is glued, 0 if the complex has free faces, -1 if `tri`
/// is NULL.
///
/// # Safety
/// `tri` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nz_tri_is_closed(tri: *const NzTriangulation) -> i32 {
    match tri.as_ref() {
        Some(t) => t.tri.is_closed() as i32,
        None => -1,
    }
}

/// Total number of degree-`n` lattice points over all tetrahedra, or -1 on
/// a NULL handle or a degree outside 2..=16.
///
/// # Safety
/// `tri` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nz_point_count(tri: *const NzTriangulation, n: i64) -> i64 {
    let Some(t) = tri.as_ref() else { return -1 };
    if !degree_ok(n) {
        return -1;
    }
    (t.tri.tet_count() as i64) * 2 * (n * n - 1)
}

/// Free rank of the symplectic quotient homology `H(J)` at degree `n`, or
/// -1 on a NULL handle or a degree outside 2..=16.
///
/// # Safety
/// `tri` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nz_dim_hj(tri: *const NzTriangulation, n: i64) -> i64 {
    let Some(t) = tri.as_ref() else { return -1 };
    if !degree_ok(n) {
        return -1;
    }
    let mut dim = -1;
    let status = guarded(|| {
        dim = GluedComplex::new(&t.tri, n).homology_j().free_rank as i64;
        NzStatus::Ok
    });
    if status == NzStatus::Ok {
        dim
    } else {
        -1
    }
}

/// Runs the exact verification suite at degree `n`: the complex identities,
/// the dimension formula, and — when the complex has torus or annulus
/// links — the chain pairing, holonomy congruence, and ×4 checks.
///
/// Returns `NZ_STATUS_OK` when every applicable check passes and
/// `NZ_STATUS_CHECK_FAILED` otherwise.
///
/// # Safety
/// `tri` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nz_verify(tri: *const NzTriangulation, n: i64) -> NzStatus {
    let Some(t) = tri.as_ref() else { return NzStatus::NullArgument };
    if !degree_ok(n) {
        return NzStatus::Unsupported;
    }
    guarded(|| {
        let per = match Peripheral::new(&t.tri, n, HConvention::SignedSymmetric) {
            Ok(p) => p,
            Err(_) => return NzStatus::Unsupported,
        };
        let mut ok = per.complex.verify_complex().pass();
        ok &= per.dim_formula_check().pass();
        if !per.carriers.is_empty() {
            ok &= per.check_pairing().pass();
            ok &= per.check_hol_lemma().pass();
            ok &= per.check_times4().status() != Status::Fail;
        }
        if ok {
            NzStatus::Ok
        } else {
            NzStatus::CheckFailed
        }
    })
}

/// Exports the multiplicative face/edge equation system at degree `n` as a
/// JSON string (`pretty` != 0 indents it).
///
/// On success `*out` receives a heap-allocated C string; release it with
/// `nz_string_free`.
///
/// # Safety
/// `tri` must be NULL or a live handle; `out` must be NULL or a valid
/// pointer to a pointer.
#[no_mangle]
pub unsafe extern "C" fn nz_equations_json(
    tri: *const NzTriangulation,
    n: i64,
    pretty: i32,
    out: *mut *mut c_char,
) -> NzStatus {
    if out.is_null() {
        return NzStatus::NullArgument;
    }
    let Some(t) = tri.as_ref() else { return NzStatus::NullArgument };
    if !degree_ok(n) {
        return NzStatus::Unsupported;
    }
    guarded(|| {
        let text = GluedComplex::new(&t.tri, n).equations().to_json(pretty != 0);
        export_string(text, out)
    })
}

/// Runs the degree-2 gluing solver with the default tolerances and the
/// given seed, and exports the full solution report as a JSON string
/// (`pretty` != 0 indents it).
///
/// Returns `NZ_STATUS_OK` with the report even when no solution is
/// geometric; returns `NZ_STATUS_UNSUPPORTED` when the complex is open or a
/// link is not a torus.  Release `*out` with `nz_string_free`.
///
/// # Safety
/// `tri` must be NULL or a live handle; `out` must be NULL or a valid
/// pointer to a pointer.
#[no_mangle]
pub unsafe extern "C" fn nz_solve2_json(
    tri: *const NzTriangulation,
    seed: u64,
    pretty: i32,
    out: *mut *mut c_char,
) -> NzStatus {
    if out.is_null() {
        return NzStatus::NullArgument;
    }
    let Some(t) = tri.as_ref() else { return NzStatus::NullArgument };
    guarded(|| match solve_gluing_n2(&t.tri, seed, &Tolerances::default()) {
        Ok(report) => export_string(report.to_json(pretty != 0), out),
        Err(_) => NzStatus::Unsupported,
    })
}

/// Solves the degree-2 system and writes the shapes of the unique complete
/// positively oriented solution into `shapes` as `len` doubles — the
/// interleaved real and imaginary parts, tetrahedron by tetrahedron, so
/// `len` must be `2 * nz_tri_tetrahedra(tri)`.
///
/// Returns `NZ_STATUS_NO_SOLUTION` when the search finds no unique
/// geometric solution and `NZ_STATUS_UNSUPPORTED` when the complex is open
/// or a link is not a torus.
///
/// # Safety
/// `tri` must be NULL or a live handle; `shapes` must be NULL or a valid
/// buffer of `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nz_geometric_shapes(
    tri: *const NzTriangulation,
    seed: u64,
    shapes: *mut f64,
    len: usize,
) -> NzStatus {
    if shapes.is_null() {
        return NzStatus::NullArgument;
    }
    let Some(t) = tri.as_ref() else { return NzStatus::NullArgument };
    if len != 2 * t.tri.tet_count() {
        return NzStatus::InvalidInput;
    }
    guarded(|| match solve_gluing_n2(&t.tri, seed, &Tolerances::default()) {
        Ok(report) => match report.geometric() {
            Some(sol) => {
                for (i, z) in sol.shapes.iter().enumerate() {
                    *shapes.add(2 * i) = z[0];
                    *shapes.add(2 * i + 1) = z[1];
                }
                NzStatus::Ok
            }
            None => NzStatus::NoSolution,
        },
        Err(_) => NzStatus::Unsupported,
    })
}

/// Releases a string returned by this library.  NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned through an `out`
/// parameter of this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
