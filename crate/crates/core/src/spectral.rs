//! Fourier-side primitives: Littlewood-Paley projections, the analytic signal,
//! carrier modulation and Poisson convolution.
//!
//! Frequency `0` belongs to the nonnegative projection. The Nyquist bin of an
//! even-length grid (`k = −n/2`) belongs to the negative projection.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::BoundarySignal;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `P₊ f`: keeps Fourier coefficients with `k ≥ 0`.
pub fn project_nonnegative(f: &BoundarySignal) -> BoundarySignal {
    let mut s = f.spectrum();
    s.apply(|k| if k >= 0 { ONE } else { ZERO });
    s.to_signal(f.duration())
}

/// `P₋ f`: keeps Fourier coefficients with `k < 0`.
pub fn project_negative(f: &BoundarySignal) -> BoundarySignal {
    let mut s = f.spectrum();
    s.apply(|k| if k < 0 { ONE } else { ZERO });
    s.to_signal(f.duration())
}

/// `‖P₋ f‖² ` as `∫_0^{2π} |P₋ f|² dθ`, read directly off the spectrum.
pub fn negative_energy(f: &BoundarySignal) -> f64 {
    TAU * f.spectrum().indexed().filter(|(k, _)| *k < 0).map(|(_, a)| a.norm_sqr()).sum::<f64>()
}

/// Gabor's complex extension `g + i 𝓗 g` of a real signal.
///
/// The Nyquist coefficient of an even-length grid is kept with unit weight so the
/// real part reproduces `g` exactly.
pub fn analytic_extension(g: &BoundarySignal) -> Result<BoundarySignal> {
    let scale = g.sup_norm().max(f64::MIN_POSITIVE);
    let max_imag = g.samples().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let tolerance = 1e-12;
    if max_imag > tolerance * scale {
        return Err(Error::NonRealInput { max_imag, tolerance });
    }
    let real = g.map(|z| Complex64::new(z.re, 0.0));
    Ok(analytic_of_real(&real))
}

/// Analytic extension without the realness check; the imaginary part of the input is ignored.
pub(crate) fn analytic_of_real(g: &BoundarySignal) -> BoundarySignal {
    let n = g.len();
    let mut s = g.map(|z| Complex64::new(z.re, 0.0)).spectrum();
    let nyquist = if n.is_multiple_of(2) { Some(-(n as i64) / 2) } else { None };
    s.apply(|k| {
        if k == 0 || Some(k) == nyquist {
            ONE
        } else if k > 0 {
            Complex64::new(2.0, 0.0)
        } else {
            ZERO
        }
    });
    s.to_signal(g.duration())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Multiplies by `e^{± i N θ}`, shifting the spectrum by `±N` bins.
pub fn modulate_carrier(f: &BoundarySignal, cycles: i64, sign: Sign) -> Result<BoundarySignal> {
    let n = f.len();
    if 2 * cycles.unsigned_abs() >= n as u64 {
        return Err(Error::AliasError { shift: cycles, samples: n });
    }
    let shift = sign.value() * cycles;
    if shift == 0 {
        return Ok(f.clone());
    }
    let step = TAU / n as f64;
    let n_i = n as i64;
    Ok(f.with_samples(
        f.samples()
            .iter()
            .enumerate()
            // reduce the phase index mod n before scaling to keep the angle small
            .map(|(j, &z)| z * Complex64::cis((shift * j as i64).rem_euclid(n_i) as f64 * step))
            .collect(),
    ))
}

/// Number of carrier cycles over the signal duration for a carrier of `hz` Hz.
/// The carrier must complete a whole number of periods.
pub fn carrier_cycles(f: &BoundarySignal, hz: f64) -> Result<i64> {
    let cycles = hz * f.duration();
    let rounded = cycles.round();
    if (cycles - rounded).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "carrier of {hz} Hz does not fit a whole number of periods into {} s",
            f.duration()
        )));
    }
    Ok(rounded as i64)
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::RadiusOutOfRange(r));
    }
    Ok(())
}

/// Harmonic extension to radius `r`: coefficient `a_k ↦ a_k r^{|k|}`.
pub fn poisson_convolve(f: &BoundarySignal, r: f64) -> Result<BoundarySignal> {
    check_radius(r)?;
    let mut s = f.spectrum();
    s.apply(|k| Complex64::new(r.powi(k.unsigned_abs() as i32), 0.0));
    Ok(s.to_signal(f.duration()))
}

/// Poisson kernel `P_r(θ) = (1/2π)(1 − r²)/(1 − 2r cos θ + r²)`.
pub fn poisson_kernel(r: f64, theta: f64) -> f64 {
    (1.0 - r * r) / (TAU * (1.0 - 2.0 * r * theta.cos() + r * r))
}

/// `∫ P_r(θ)² dθ = 1/(2π) + (1/π) r²/(1 − r²)`: the variance of the Poisson
/// extension of unit white noise at a point of modulus `r`.
pub fn poisson_kernel_l2_variance(r: f64) -> Result<f64> {
    if !(0.0..=1.0 - 1e-6).contains(&r) {
        return Err(Error::RadiusOutOfRange(r));
    }
    Ok(1.0 / TAU + centered_poisson_variance(r))
}

/// `∫ (P_r(θ) − 1/(2π))² dθ = (1/π) r²/(1 − r²)`.
pub(crate) fn centered_poisson_variance(r: f64) -> f64 {
    r * r / (PI * (1.0 - r * r))
}

/// Whole-sample even reflection `f(2 − s)`: `f_0 … f_{n−1}, f_{n−2} … f_1`, so the
/// endpoint samples are shared rather than repeated. Doubles the duration (less
/// one sample period on each side).
pub fn reflect(f: &BoundarySignal) -> BoundarySignal {
    mirror(f, |z| z)
}

/// As [`reflect`], but the mirrored half is conjugated so that counter-clockwise
/// winding (positive frequency) continues through the fold.
pub fn reflect_conjugate(f: &BoundarySignal) -> BoundarySignal {
    mirror(f, |z| z.conj())
}

fn mirror(f: &BoundarySignal, g: impl Fn(Complex64) -> Complex64) -> BoundarySignal {
    let n = f.len();
    let s = f.samples();
    let mut out = Vec::with_capacity(2 * n - 2);
    out.extend_from_slice(s);
    out.extend(s[1..n - 1].iter().rev().map(|&z| g(z)));
    let duration = f.time_step() * out.len() as f64;
    BoundarySignal::from_parts_unchecked(out, duration)
}

/// Inverse of [`reflect`] on the first half.
pub fn restrict(f: &BoundarySignal, original_len: usize) -> BoundarySignal {
    let duration = f.time_step() * original_len as f64;
    BoundarySignal::from_parts_unchecked(f.samples()[..original_len].to_vec(), duration)
}
