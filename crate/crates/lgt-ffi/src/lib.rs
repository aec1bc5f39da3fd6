//! C ABI over the core toolkit: opaque handles, status codes, out-parameters.
//!
//! Every function returns an `LgtStatus`; results are written through out
//! pointers. Handles must be released with the matching `_free` function.

use std::ffi::{c_char, CString};
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use lgt::lattice::Lattice;

/// Status codes returned by every FFI entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LgtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
}

/// Opaque lattice handle.
pub struct LgtLattice {
    inner: Arc<Lattice>,
}

fn status_of(e: &lgt::Error) -> LgtStatus {
    match e {
        lgt::Error::NotPositiveDefinite { .. } => LgtStatus::NumericalFailure,
        _ => LgtStatus::InvalidArgument,
    }
}

/// Builds the box `{0,…,n-1}^d` with its edge and plaquette enumerations.
///
/// # Safety
/// `out` must be a valid pointer; the handle must be released with
/// `lgt_lattice_free`.
#[no_mangle]
pub unsafe extern "C" fn lgt_lattice_new(
    dimension: usize,
    side: usize,
    out: *mut *mut LgtLattice,
) -> LgtStatus {
    if out.is_null() {
        return LgtStatus::NullArgument;
    }
    match Lattice::new(dimension, side) {
        Ok(lat) => {
            let boxed = Box::new(LgtLattice {
                inner: Arc::new(lat),
            });
            unsafe { *out = Box::into_raw(boxed) };
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a lattice handle. Passing null is a no-op.
///
/// # Safety
/// `lat` must come from `lgt_lattice_new` and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn lgt_lattice_free(lat: *mut LgtLattice) {
    if !lat.is_null() {
        drop(unsafe { Box::from_raw(lat) });
    }
}

/// Closed-form edge counts `|E_n|`, `|E_n^0|`, `|E_n^1|`.
///
/// # Safety
/// All pointers must be valid or null (null outputs are skipped).
#[no_mangle]
pub unsafe extern "C" fn lgt_edge_counts(
    dimension: usize,
    side: usize,
    total: *mut u64,
    axial: *mut u64,
    free: *mut u64,
) -> LgtStatus {
    match lgt::lattice::edge_counts(dimension, side) {
        Ok(c) => {
            unsafe {
                if !total.is_null() {
                    *total = c.total;
                }
                if !axial.is_null() {
                    *axial = c.axial;
                }
                if !free.is_null() {
                    *free = c.free;
                }
            }
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// `K_{n,d} = -log det M_n^0 / (2 n^d)` for the handle's box.
///
/// # Safety
/// `lat` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lgt_knd(lat: *const LgtLattice, out: *mut f64) -> LgtStatus {
    if lat.is_null() || out.is_null() {
        return LgtStatus::NullArgument;
    }
    let lat = unsafe { &*lat };
    match lgt::maxwell::knd(&lat.inner) {
        Ok(k) => {
            unsafe { *out = k };
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Maxwell free energy per site `F_M(B_n)`.
///
/// # Safety
/// `lat` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lgt_maxwell_free_energy(
    lat: *const LgtLattice,
    out: *mut f64,
) -> LgtStatus {
    if lat.is_null() || out.is_null() {
        return LgtStatus::NullArgument;
    }
    let lat = unsafe { &*lat };
    match lgt::maxwell::maxwell_free_energy(&lat.inner) {
        Ok(v) => {
            unsafe { *out = v };
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Small-ball limit constant of U(N) near the identity.
///
/// # Safety
/// `out` must be a valid pointer; `lie_constant` may be null.
#[no_mangle]
pub unsafe extern "C" fn lgt_small_ball_constant(
    order: usize,
    out: *mut f64,
    lie_constant: *mut f64,
) -> LgtStatus {
    if out.is_null() {
        return LgtStatus::NullArgument;
    }
    match lgt::unitary::small_ball_constant(order) {
        Ok(c) => {
            unsafe {
                *out = c.value;
                if !lie_constant.is_null() {
                    *lie_constant = c.lie_constant;
                }
            }
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Monte Carlo estimate of `σ(‖I-U‖ ≤ δ)` on U(N) with its standard error.
///
/// # Safety
/// `p_hat` and `stderr` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lgt_small_ball_estimate(
    order: usize,
    delta: f64,
    samples: u64,
    seed: u64,
    p_hat: *mut f64,
    stderr: *mut f64,
) -> LgtStatus {
    if p_hat.is_null() || stderr.is_null() {
        return LgtStatus::NullArgument;
    }
    let mut rng = <ChaCha8Rng as rand_chacha::rand_core::SeedableRng>::seed_from_u64(seed);
    match lgt::unitary::small_ball_estimate(order, delta, samples, &mut rng) {
        Ok((p, se)) => {
            unsafe {
                *p_hat = p;
                *stderr = se;
            }
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Exact two-dimensional U(1) free energy per site,
/// `(n-1)²/n² · log(e^{-β} I₀(β))`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lgt_exact_2d_free_energy(
    side: usize,
    beta: f64,
    out: *mut f64,
) -> LgtStatus {
    if out.is_null() {
        return LgtStatus::NullArgument;
    }
    match lgt::montecarlo::exact_2d_free_energy(side, beta, 1) {
        Ok(v) => {
            unsafe { *out = v };
            LgtStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Leading-term constant `(d-1) log(∏ j!/(2π)^{N/2}) + N² K_d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lgt_theorem1_prediction(
    dimension: usize,
    order: usize,
    kd: f64,
    out: *mut f64,
) -> LgtStatus {
    if out.is_null() {
        return LgtStatus::NullArgument;
    }
    unsafe { *out = lgt::montecarlo::theorem1_prediction(dimension, order, kd) };
    LgtStatus::Ok
}

/// Library version as a NUL-terminated string; free with
/// `lgt_string_free`.
#[no_mangle]
pub extern "C" fn lgt_version() -> *mut c_char {
    CString::new(env!("CARGO_PKG_VERSION"))
        .expect("version has no NUL")
        .into_raw()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn lgt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_handle_round_trip() {
        let mut handle: *mut LgtLattice = std::ptr::null_mut();
        unsafe {
            assert!(lgt_lattice_new(2, 4, &mut handle) == LgtStatus::Ok);
            let mut k = f64::NAN;
            assert!(lgt_knd(handle, &mut k) == LgtStatus::Ok);
            assert!(k.abs() < 1e-10);
            let mut fm = f64::NAN;
            assert!(lgt_maxwell_free_energy(handle, &mut fm) == LgtStatus::Ok);
            assert!(fm.is_finite());
            lgt_lattice_free(handle);
        }
    }

    #[test]
    fn errors_map_to_status_codes() {
        let mut handle: *mut LgtLattice = std::ptr::null_mut();
        unsafe {
            assert!(lgt_lattice_new(1, 4, &mut handle) == LgtStatus::InvalidArgument);
            assert!(lgt_lattice_new(2, 4, std::ptr::null_mut()) == LgtStatus::NullArgument);
        }
        let mut c = [0u64; 3];
        unsafe {
            assert!(
                lgt_edge_counts(2, 7, &mut c[0], &mut c[1], &mut c[2]) == LgtStatus::Ok
            );
        }
        assert_eq!(c, [84, 48, 36]);
    }

    #[test]
    fn version_string_round_trip() {
        let v = lgt_version();
        assert!(!v.is_null());
        unsafe { lgt_string_free(v) };
    }
}
