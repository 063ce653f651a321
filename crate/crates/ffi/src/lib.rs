//! C interface to qmarginal.
//!
//! Every function returns a [`QmStatus`] and writes results through out
//! pointers. Density matrices cross the boundary as opaque
//! [`QmDensityMatrix`] handles owned by the caller and released with
//! [`qm_density_free`]. On failure a message is kept per thread and can be
//! read with [`qm_last_error`].

// Entry points take raw pointers from C callers; validity is their contract.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmarginal::classical::classical_triple_joinable;
use qmarginal::feasibility::{alternating_projection, FeasibilityProblem, Verdict};
use qmarginal::joinability::{
    construct_joining_state_iso, construct_joining_state_werner, hybrid_pair_joinable, iso_1n_joinable,
    iso_pair_joinable, iso_triple_joinable, werner_pair_joinable, werner_triple_joinable, IsoTriple, WernerTriple,
};
use qmarginal::sharability::{max_h_eigenvalue_young, sharable_1n_iso, sharable_1n_werner, sharing_state_1n};
use qmarginal::states::{isotropic_state, werner_state, IsotropicParam, WernerParam};
use qmarginal::tensor::DensityMatrix;
use qmarginal::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    NotJoinable = 4,
    InconsistentMarginals = 5,
    ParseError = 6,
    NumericalFailure = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmVerdict {
    Feasible = 0,
    Infeasible = 1,
    Undecided = 2,
}

/// Opaque density matrix handle.
pub struct QmDensityMatrix {
    inner: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> QmStatus {
    match e {
        Error::CapExceeded { .. } => QmStatus::CapExceeded,
        Error::NotJoinable | Error::ConstraintViolation(_) => QmStatus::NotJoinable,
        Error::InconsistentMarginals(_) => QmStatus::InconsistentMarginals,
        Error::InvalidProblem(_) => QmStatus::ParseError,
        Error::NotConverged { .. } => QmStatus::NumericalFailure,
        _ => QmStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> QmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Run `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QmStatus>) -> QmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            set_error(format!("internal panic: {}", msg.unwrap_or_default()));
            QmStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T) -> Result<&'a mut T, QmStatus> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error("null output pointer");
        QmStatus::NullPointer
    })
}

fn handle<'a>(h: *const QmDensityMatrix) -> Result<&'a DensityMatrix, QmStatus> {
    // SAFETY: non-null handles come from this library and are still live.
    unsafe { h.as_ref() }.map(|h| &h.inner).ok_or_else(|| {
        set_error("null density matrix handle");
        QmStatus::NullPointer
    })
}

fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], QmStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        set_error("null array with non-zero length");
        return Err(QmStatus::NullPointer);
    }
    // SAFETY: the caller guarantees `len` readable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn give(w: DensityMatrix, dst: *mut *mut QmDensityMatrix) -> Result<(), QmStatus> {
    *out(dst)? = Box::into_raw(Box::new(QmDensityMatrix { inner: w }));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qm_werner_triple_joinable(
    d: usize,
    psi_ab: f64,
    psi_ac: f64,
    psi_bc: f64,
    result: *mut bool,
) -> QmStatus {
    guard(|| {
        let t = WernerTriple::new(d, psi_ab, psi_ac, psi_bc).map_err(fail)?;
        *out(result)? = werner_triple_joinable(&t);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_iso_triple_joinable(
    d: usize,
    phi_ab: f64,
    phi_ac: f64,
    psi_bc: f64,
    result: *mut bool,
) -> QmStatus {
    guard(|| {
        let t = IsoTriple::new(d, phi_ab, phi_ac, psi_bc).map_err(fail)?;
        *out(result)? = iso_triple_joinable(&t);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_werner_pair_joinable(d: usize, psi_ab: f64, psi_ac: f64, result: *mut bool) -> QmStatus {
    guard(|| {
        *out(result)? = werner_pair_joinable(d, psi_ab, psi_ac);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_iso_pair_joinable(d: usize, phi_ab: f64, phi_ac: f64, result: *mut bool) -> QmStatus {
    guard(|| {
        *out(result)? = iso_pair_joinable(d, phi_ab, phi_ac);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_hybrid_pair_joinable(d: usize, phi_ab: f64, psi_bc: f64, result: *mut bool) -> QmStatus {
    guard(|| {
        *out(result)? = hybrid_pair_joinable(d, phi_ab, psi_bc);
        Ok(())
    })
}

/// One party sharing isotropic states with `n` others, parameters in `phis`.
#[no_mangle]
pub extern "C" fn qm_iso_1n_joinable(d: usize, phis: *const f64, n: usize, result: *mut bool) -> QmStatus {
    guard(|| {
        let phis = slice(phis, n)?;
        *out(result)? = iso_1n_joinable(d, phis);
        Ok(())
    })
}

/// Agreement probabilities of three d-outcome variables.
#[no_mangle]
pub extern "C" fn qm_classical_triple_joinable(
    d: usize,
    alpha_ab: f64,
    alpha_ac: f64,
    alpha_bc: f64,
    result: *mut bool,
) -> QmStatus {
    guard(|| {
        *out(result)? = classical_triple_joinable(d, alpha_ab, alpha_ac, alpha_bc);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_sharable_1n_werner(d: usize, n: usize, psi_minus: f64, result: *mut bool) -> QmStatus {
    guard(|| {
        let p = WernerParam::new(d, psi_minus).map_err(fail)?;
        *out(result)? = sharable_1n_werner(p, n);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_sharable_1n_iso(d: usize, n: usize, phi_plus: f64, result: *mut bool) -> QmStatus {
    guard(|| {
        let p = IsotropicParam::new(d, phi_plus).map_err(fail)?;
        *out(result)? = sharable_1n_iso(p, n);
        Ok(())
    })
}

/// Exact m-n sharing threshold on -Psi as a reduced fraction.
#[no_mangle]
pub extern "C" fn qm_sharing_threshold(
    d: usize,
    m: usize,
    n: usize,
    numerator: *mut i64,
    denominator: *mut i64,
) -> QmStatus {
    guard(|| {
        if d < 2 || m == 0 || n == 0 {
            set_error("need d >= 2 and m, n >= 1");
            return Err(QmStatus::InvalidArgument);
        }
        let t = max_h_eigenvalue_young(d, m, n).map_err(fail)?;
        let (num, den) = (out(numerator)?, out(denominator)?);
        *num = *t.numer();
        *den = *t.denom();
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qm_werner_state(d: usize, psi_minus: f64, state: *mut *mut QmDensityMatrix) -> QmStatus {
    guard(|| {
        let w = werner_state(WernerParam::new(d, psi_minus).map_err(fail)?).map_err(fail)?;
        give(w, state)
    })
}

#[no_mangle]
pub extern "C" fn qm_isotropic_state(d: usize, phi_plus: f64, state: *mut *mut QmDensityMatrix) -> QmStatus {
    guard(|| {
        let w = isotropic_state(IsotropicParam::new(d, phi_plus).map_err(fail)?).map_err(fail)?;
        give(w, state)
    })
}

/// Joining state of three Werner pairs; QM_STATUS_NOT_JOINABLE outside the region.
#[no_mangle]
pub extern "C" fn qm_join_werner(
    d: usize,
    psi_ab: f64,
    psi_ac: f64,
    psi_bc: f64,
    state: *mut *mut QmDensityMatrix,
) -> QmStatus {
    guard(|| {
        let t = WernerTriple::new(d, psi_ab, psi_ac, psi_bc).map_err(fail)?;
        give(construct_joining_state_werner(&t).map_err(fail)?, state)
    })
}

/// Joining state of isotropic A-B, A-C and Werner B-C pairs.
#[no_mangle]
pub extern "C" fn qm_join_iso(
    d: usize,
    phi_ab: f64,
    phi_ac: f64,
    psi_bc: f64,
    state: *mut *mut QmDensityMatrix,
) -> QmStatus {
    guard(|| {
        let t = IsoTriple::new(d, phi_ab, phi_ac, psi_bc).map_err(fail)?;
        give(construct_joining_state_iso(&t).map_err(fail)?, state)
    })
}

/// State on 1 + n parties whose pairs (0, j) are the most entangled 1-n
/// sharable Werner state.
#[no_mangle]
pub extern "C" fn qm_sharing_state_1n(d: usize, n: usize, state: *mut *mut QmDensityMatrix) -> QmStatus {
    guard(|| give(sharing_state_1n(d, n).map_err(fail)?, state))
}

/// Release a handle. NULL is ignored.
#[no_mangle]
pub extern "C" fn qm_density_free(state: *mut QmDensityMatrix) {
    if !state.is_null() {
        // SAFETY: the handle was created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Total Hilbert space dimension.
#[no_mangle]
pub extern "C" fn qm_density_dim(state: *const QmDensityMatrix, dim: *mut usize) -> QmStatus {
    guard(|| {
        *out(dim)? = handle(state)?.dim();
        Ok(())
    })
}

/// Number of parties; with `dims` non-NULL also copies the party
/// dimensions into it (capacity `len`).
#[no_mangle]
pub extern "C" fn qm_density_parties(
    state: *const QmDensityMatrix,
    dims: *mut usize,
    len: usize,
    count: *mut usize,
) -> QmStatus {
    guard(|| {
        let d = handle(state)?.space().dims();
        *out(count)? = d.len();
        if dims.is_null() {
            return Ok(());
        }
        if len < d.len() {
            set_error(format!("need room for {} dimensions", d.len()));
            return Err(QmStatus::BufferTooSmall);
        }
        // SAFETY: `dims` has room for `len` >= d.len() elements.
        unsafe { ptr::copy_nonoverlapping(d.as_ptr(), dims, d.len()) };
        Ok(())
    })
}

/// Copy the matrix entries row-major into `re` and `im`, each holding at
/// least dim * dim doubles. `im` may be NULL.
#[no_mangle]
pub extern "C" fn qm_density_entries(
    state: *const QmDensityMatrix,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QmStatus {
    guard(|| {
        let w = handle(state)?;
        let data = w.matrix().data();
        if re.is_null() {
            set_error("null real part buffer");
            return Err(QmStatus::NullPointer);
        }
        if len < data.len() {
            set_error(format!("need room for {} entries", data.len()));
            return Err(QmStatus::BufferTooSmall);
        }
        for (k, z) in data.iter().enumerate() {
            // SAFETY: both buffers hold at least `len` >= data.len() doubles.
            unsafe {
                *re.add(k) = z.re;
                if !im.is_null() {
                    *im.add(k) = z.im;
                }
            }
        }
        Ok(())
    })
}

/// Reduced state on the parties listed in `keep` (increasing order).
#[no_mangle]
pub extern "C" fn qm_density_reduce(
    state: *const QmDensityMatrix,
    keep: *const usize,
    len: usize,
    reduced: *mut *mut QmDensityMatrix,
) -> QmStatus {
    guard(|| {
        let w = handle(state)?;
        let keep = slice(keep, len)?;
        give(w.reduce(keep).map_err(fail)?, reduced)
    })
}

/// Run the feasibility solver on a problem in the JSON problem format.
/// `witness` may be NULL; otherwise it receives a handle for feasible
/// problems and NULL for the others.
#[no_mangle]
pub extern "C" fn qm_feasibility_json(
    problem_json: *const c_char,
    tol: f64,
    max_iter: usize,
    verdict: *mut QmVerdict,
    residual: *mut f64,
    iterations: *mut usize,
    witness: *mut *mut QmDensityMatrix,
) -> QmStatus {
    guard(|| {
        if problem_json.is_null() {
            set_error("null problem text");
            return Err(QmStatus::NullPointer);
        }
        // SAFETY: the caller passes a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(problem_json) }.to_str().map_err(|e| {
            set_error(e.to_string());
            QmStatus::ParseError
        })?;
        if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
            set_error("tol must be positive and max_iter non-zero");
            return Err(QmStatus::InvalidArgument);
        }
        let problem = FeasibilityProblem::from_json(text).map_err(fail)?;
        let report = alternating_projection(&problem, tol, max_iter).map_err(fail)?;
        let (v, r, it) = (out(verdict)?, out(residual)?, out(iterations)?);
        *r = report.residual;
        *it = report.iterations;
        if !witness.is_null() {
            // SAFETY: checked non-null above.
            unsafe { *witness = ptr::null_mut() };
        }
        *v = match report.verdict {
            Verdict::Feasible(w) => {
                if !witness.is_null() {
                    give(w, witness)?;
                }
                QmVerdict::Feasible
            }
            Verdict::Infeasible { .. } => QmVerdict::Infeasible,
            Verdict::Undecided { .. } => QmVerdict::Undecided,
        };
        Ok(())
    })
}
