//! Phase bookkeeping shared by the winding-number, IF and theorem checks.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Maps an angle into `(−π, π]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Distance between two phases on the torus, in `[0, π]`.
pub fn torus_distance(a: f64, b: f64) -> f64 {
    wrap_to_pi(a - b).abs()
}

/// Principal-value phase increments `arg(z_{j+1} / z_j)`, including the closing
/// increment from the last sample back to the first.
pub fn cyclic_increments(samples: &[Complex64]) -> Vec<f64> {
    let n = samples.len();
    (0..n).map(|j| (samples[(j + 1) % n] * samples[j].conj()).arg()).collect()
}

/// Unwrapped phase: `arg z_0` plus the cumulative sum of principal increments.
pub fn unwrap_phase(samples: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let Some(first) = samples.first() else {
        return out;
    };
    let mut acc = first.arg();
    out.push(acc);
    for w in samples.windows(2) {
        acc += (w[1] * w[0].conj()).arg();
        out.push(acc);
    }
    out
}

/// Unwraps a sequence of angles given modulo 2π.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let Some(&first) = angles.first() else {
        return out;
    };
    let mut acc = first;
    out.push(acc);
    for w in angles.windows(2) {
        acc += wrap_to_pi(w[1] - w[0]);
        out.push(acc);
    }
    out
}
