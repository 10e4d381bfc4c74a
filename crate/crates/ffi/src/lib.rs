//! C ABI over the `blaschke` crate.
//!
//! Objects cross the boundary as opaque handles created by `bl_*_new` or returned
//! through out-parameters, and released with the matching `bl_*_free`. Every
//! fallible call returns a [`BlStatus`]; on failure the message is available from
//! [`bl_last_error_message`] on the same thread until the next failing call.
//! Panics are caught and reported as [`BlStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blaschke::roots;
use blaschke::{BoundarySignal, Error, UnwindConfig, UnwindingDecomposition};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSignal = 3,
    /// A numerical precondition failed (vanishing modulus, zero signal, …).
    Numerical = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A uniformly sampled complex signal.
pub struct BlSignal(BoundarySignal);

/// Result of an unwinding run.
pub struct BlDecomposition(UnwindingDecomposition);

/// Parameters of [`bl_unwind`]. Start from [`bl_unwind_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BlUnwindOptions {
    pub depth: usize,
    pub detrend_order: usize,
    pub stabilizer: f64,
    pub reflect: bool,
    /// Hz; `0` disables the carrier.
    pub carrier_hz: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> BlStatus {
    match err {
        Error::InvalidSignal(_) | Error::NonRealInput { .. } | Error::GridMismatch(_) | Error::Parse { .. } => {
            BlStatus::InvalidSignal
        }
        Error::Io(_) => BlStatus::Io,
        Error::InvalidParameter(_)
        | Error::RadiusOutOfRange(_)
        | Error::OrderTooHigh(_)
        | Error::UnknownFunction(_)
        | Error::InvalidImt(_)
        | Error::WindowTooWide { .. }
        | Error::AliasError { .. } => BlStatus::InvalidArgument,
        _ => BlStatus::Numerical,
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), (BlStatus, String)>) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            BlStatus::Panic
        }
    }
}

fn lib(err: Error) -> (BlStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (BlStatus, String) {
    (BlStatus::NullPointer, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (BlStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (BlStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Crate version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null if there was none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn bl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a signal from `len` samples over `duration` seconds. `im` may be null
/// for a real signal.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` readable doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    duration: f64,
    out: *mut *mut BlSignal,
) -> BlStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let samples: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        let sig = BoundarySignal::new(samples, duration).map_err(lib)?;
        write_out(out, boxed(BlSignal(sig)), "out")
    })
}

/// Reads a `t,re,im` CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_read_csv(path: *const c_char, out: *mut *mut BlSignal) -> BlStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path =
            CStr::from_ptr(path).to_str().map_err(|_| (BlStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let sig = BoundarySignal::read_csv(path).map_err(lib)?;
        write_out(out, boxed(BlSignal(sig)), "out")
    })
}

/// Writes a `t,re,im` CSV file.
///
/// # Safety
/// `sig` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_write_csv(sig: *const BlSignal, path: *const c_char) -> BlStatus {
    guard(|| {
        let sig = deref(sig, "sig")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path =
            CStr::from_ptr(path).to_str().map_err(|_| (BlStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        sig.0.write_csv(path).map_err(lib)
    })
}

/// Sample count, or 0 for a null handle.
///
/// # Safety
/// `sig` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_len(sig: *const BlSignal) -> usize {
    sig.as_ref().map_or(0, |s| s.0.len())
}

/// Duration in seconds, or NaN for a null handle.
///
/// # Safety
/// `sig` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_duration(sig: *const BlSignal) -> f64 {
    sig.as_ref().map_or(f64::NAN, |s| s.0.duration())
}

/// Copies the samples into `re` and `im` (either may be null), each of capacity `cap`.
///
/// # Safety
/// `sig` must be a live handle; non-null buffers must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_copy(sig: *const BlSignal, re: *mut f64, im: *mut f64, cap: usize) -> BlStatus {
    guard(|| {
        let sig = deref(sig, "sig")?;
        let n = sig.0.len();
        if cap < n {
            return Err((BlStatus::BufferTooSmall, format!("need {n} samples, buffer holds {cap}")));
        }
        for (j, z) in sig.0.samples().iter().enumerate() {
            if !re.is_null() {
                *re.add(j) = z.re;
            }
            if !im.is_null() {
                *im.add(j) = z.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `sig` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_signal_free(sig: *mut BlSignal) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

#[no_mangle]
pub extern "C" fn bl_unwind_options_default() -> BlUnwindOptions {
    let d = UnwindConfig::default();
    BlUnwindOptions {
        depth: d.depth,
        detrend_order: d.detrend_order,
        stabilizer: d.stabilizer,
        reflect: d.reflect,
        carrier_hz: d.carrier_hz,
    }
}

/// Blaschke unwinding of `sig`. A null `options` uses the defaults.
///
/// # Safety
/// `sig` must be a live handle, `options` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_unwind(
    sig: *const BlSignal,
    options: *const BlUnwindOptions,
    out: *mut *mut BlDecomposition,
) -> BlStatus {
    guard(|| {
        let sig = deref(sig, "sig")?;
        let o = options.as_ref().copied().unwrap_or_else(|| bl_unwind_options_default());
        let cfg = UnwindConfig::new(o.depth)
            .detrend_order(o.detrend_order)
            .stabilizer(o.stabilizer)
            .reflect(o.reflect)
            .carrier(o.carrier_hz);
        let dec = blaschke::unwind(&sig.0, cfg).map_err(lib)?;
        write_out(out, boxed(BlDecomposition(dec)), "out")
    })
}

/// Levels achieved, or 0 for a null handle.
///
/// # Safety
/// `dec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bl_decomposition_depth(dec: *const BlDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.0.depth())
}

/// Component `index` (zero-based), demodulated, as a new signal handle.
///
/// # Safety
/// `dec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_decomposition_component(
    dec: *const BlDecomposition,
    index: usize,
    out: *mut *mut BlSignal,
) -> BlStatus {
    guard(|| {
        let dec = deref(dec, "dec")?;
        let depth = dec.0.depth();
        if index >= depth {
            return Err((BlStatus::InvalidArgument, format!("component {index} out of range (depth {depth})")));
        }
        let c = dec.0.components().swap_remove(index);
        write_out(out, boxed(BlSignal(c)), "out")
    })
}

/// The first trend `L₁` as a new signal handle.
///
/// # Safety
/// `dec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_decomposition_trend(dec: *const BlDecomposition, out: *mut *mut BlSignal) -> BlStatus {
    guard(|| {
        let dec = deref(dec, "dec")?;
        write_out(out, boxed(BlSignal(dec.0.demodulate(&dec.0.trends[0]))), "out")
    })
}

/// Copies the Dirichlet norms `‖G₀‖ … ‖G_depth‖` into `buf`; `written` receives
/// the count (also on `BufferTooSmall`).
///
/// # Safety
/// `dec` must be a live handle, `buf` must hold `cap` doubles, `written` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_decomposition_dirichlet_norms(
    dec: *const BlDecomposition,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> BlStatus {
    guard(|| {
        let dec = deref(dec, "dec")?;
        let norms = &dec.0.dirichlet_norms;
        write_out(written, norms.len(), "written")?;
        if cap < norms.len() {
            return Err((BlStatus::BufferTooSmall, format!("need {} values, buffer holds {cap}", norms.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(norms.as_ptr(), buf, norms.len());
        Ok(())
    })
}

/// # Safety
/// `dec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_decomposition_free(dec: *mut BlDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// `F = B·G`; either out-parameter may be null if that factor is not wanted.
///
/// # Safety
/// `sig` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_weiss_factorize(
    sig: *const BlSignal,
    eps: f64,
    blaschke_out: *mut *mut BlSignal,
    outer_out: *mut *mut BlSignal,
) -> BlStatus {
    guard(|| {
        let sig = deref(sig, "sig")?;
        let fac = blaschke::weiss_factorize(&sig.0, eps).map_err(lib)?;
        if !blaschke_out.is_null() {
            *blaschke_out = boxed(BlSignal(fac.blaschke));
        }
        if !outer_out.is_null() {
            *outer_out = boxed(BlSignal(fac.outer));
        }
        Ok(())
    })
}

/// Winding number of a closed boundary curve (unrounded).
///
/// # Safety
/// `sig` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_winding_number(sig: *const BlSignal, out: *mut f64) -> BlStatus {
    guard(|| {
        let sig = deref(sig, "sig")?;
        let w = blaschke::winding_number(&sig.0).map_err(lib)?;
        write_out(out, w, "out")
    })
}

/// Winding of the Blaschke factor at each of `count` increasing radii in (0, 1).
/// Radii skipped as too close to a root get `INT64_MIN`.
///
/// # Safety
/// `sig` must be a live handle; `radii` must hold `count` doubles and `windings`
/// `count` writable integers.
#[no_mangle]
pub unsafe extern "C" fn bl_root_scan(
    sig: *const BlSignal,
    radii: *const f64,
    count: usize,
    eps: f64,
    windings: *mut i64,
) -> BlStatus {
    guard(|| {
        let sig = deref(sig, "sig")?;
        if radii.is_null() {
            return Err(null("radii"));
        }
        if windings.is_null() {
            return Err(null("windings"));
        }
        let radii = std::slice::from_raw_parts(radii, count);
        let res = roots::scan(&sig.0, radii, eps).map_err(lib)?;
        let out = std::slice::from_raw_parts_mut(windings, count);
        for (slot, r) in out.iter_mut().zip(radii) {
            *slot = res.winding_at(*r).unwrap_or(i64::MIN);
        }
        Ok(())
    })
}
