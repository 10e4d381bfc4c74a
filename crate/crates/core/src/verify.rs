//! Both sides of the holomorphy and phase-error bounds on concrete signals, the
//! white-noise stability Monte Carlo, and the carrier phase-recovery procedure.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imt::ImtSpec;
use crate::phase::{torus_distance, unwrap_phase};
use crate::signal::{fmt_float, BoundarySignal};
use crate::spectral::{centered_poisson_variance, modulate_carrier, negative_energy, project_nonnegative, Sign};
use crate::synth::circle_white_noise;

/// `|P₊f|` below this fraction of `sup |P₊f|` counts as vanishing.
const VANISHING_FRACTION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// `rhs − lhs`.
    pub margin: f64,
    /// Samples left out of the phase comparison because `P₊f` vanished there.
    pub excluded: usize,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64, excluded: usize) -> Self {
        Self { lhs, rhs, satisfied: lhs <= rhs, margin: rhs - lhs, excluded }
    }
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `(‖A′‖²_∞ + ε²‖A‖²_∞) / inf φ′`, the factor shared by both bounds.
fn leakage_factor(spec: &ImtSpec) -> f64 {
    let d = spec.derivatives();
    let a_sup = sup(spec.amplitude());
    let da_sup = sup(&d.amplitude_rate);
    let eps = spec.accuracy();
    (da_sup * da_sup + eps * eps * a_sup * a_sup) / spec.inf_phase_rate()
}

/// `∫_0^{2π} g² dθ` by the rectangle rule.
fn l2_sq(values: &[f64]) -> f64 {
    TAU * values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64
}

/// `‖P₋f‖²` against `8π² (‖A′‖²_∞ + ε²‖A‖²_∞) / (‖A‖² inf φ′) · ‖f‖²`.
pub fn theorem1_check(spec: &ImtSpec) -> BoundReport {
    let f = spec.signal();
    let lhs = negative_energy(&f);
    let a_sq = l2_sq(spec.amplitude());
    let rhs = 8.0 * PI * PI / a_sq * leakage_factor(spec) * f.circle_norm_sq();
    BoundReport::new(lhs, rhs, 0)
}

/// `‖φ − φ*‖²` (torus distance per sample) against
/// `8π⁴ (‖A′‖²_∞ + ε²‖A‖²_∞) / (‖A‖² inf A² inf φ′) · ‖f‖²`.
///
/// Samples where `P₊f` vanishes have no phase; they are left out and counted.
/// If every sample vanishes the check fails with `ProjectionVanishes`.
pub fn theorem2_check(spec: &ImtSpec) -> Result<BoundReport> {
    let f = spec.signal();
    let p = project_nonnegative(&f);
    let floor = VANISHING_FRACTION * p.sup_norm();
    let n = spec.len();
    let mut sum = 0.0;
    let mut excluded = 0;
    for (z, &phi) in p.samples().iter().zip(spec.phase()) {
        if !(z.norm() > floor) {
            excluded += 1;
            continue;
        }
        sum += torus_distance(phi, z.arg()).powi(2);
    }
    if excluded == n {
        return Err(Error::ProjectionVanishes { count: excluded });
    }
    let lhs = TAU * sum / n as f64;
    let a_sq = l2_sq(spec.amplitude());
    let inf_a = spec.amplitude().iter().copied().fold(f64::INFINITY, f64::min);
    let rhs = 8.0 * PI.powi(4) / (a_sq * inf_a * inf_a) * leakage_factor(spec) * f.circle_norm_sq();
    Ok(BoundReport::new(lhs, rhs, excluded))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub carrier: u32,
    pub theorem1: BoundReport,
    pub theorem2: BoundReport,
}

/// Both bounds for `A e^{i(φ + Nθ)}` at each carrier `N`.
pub fn carrier_sweep(spec: &ImtSpec, carriers: &[u32]) -> Result<Vec<SweepPoint>> {
    carriers
        .iter()
        .map(|&n| {
            let s = spec.with_carrier(n);
            Ok(SweepPoint { carrier: n, theorem1: theorem1_check(&s), theorem2: theorem2_check(&s)? })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVarianceReport {
    pub r: f64,
    pub raw_variance: f64,
    pub raw_expected: f64,
    pub centered_variance: f64,
    pub centered_expected: f64,
}

impl NoiseVarianceReport {
    pub fn raw_deviation(&self) -> f64 {
        (self.raw_variance - self.raw_expected).abs() / self.raw_expected
    }

    /// Relative deviation; absolute when the expected value is zero (`r = 0`).
    pub fn centered_deviation(&self) -> f64 {
        let d = (self.centered_variance - self.centered_expected).abs();
        if self.centered_expected > 0.0 {
            d / self.centered_expected
        } else {
            d
        }
    }
}

/// Seed of trial `i` in a batch seeded with `seed`.
fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (i as u64).wrapping_add(1).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

/// Empirical variances of `(𝓟Φ)(r)` and `(𝓟Φ)(r) − (𝓟Φ)(0)` (evaluated at angle 0)
/// over `trials` white-noise realizations of `n` samples.
pub fn theorem3_check(r_values: &[f64], trials: usize, n: usize, seed: u64) -> Result<Vec<NoiseVarianceReport>> {
    if let Some(&r) = r_values.iter().find(|&&r| !(0.0..=0.9).contains(&r)) {
        return Err(Error::RadiusOutOfRange(r));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    if n < 2 {
        return Err(Error::InvalidSignal("need at least two samples".into()));
    }
    // per trial: (𝓟Φ)(r) for every r, and (𝓟Φ)(0)
    let values: Vec<(Vec<f64>, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let noise = circle_white_noise(n, trial_seed(seed, i)).expect("n checked above");
            let spec = noise.spectrum();
            let at_zero = spec.coefficient(0).re;
            let ext = r_values
                .iter()
                .map(|&r| spec.indexed().map(|(k, a)| a * r.powi(k.unsigned_abs() as i32)).sum::<Complex64>().re)
                .collect();
            (ext, at_zero)
        })
        .collect();
    let variance = |xs: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = xs.collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    Ok(r_values
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let centered = centered_poisson_variance(r);
            NoiseVarianceReport {
                r,
                raw_variance: variance(&mut values.iter().map(|(e, _)| e[j])),
                raw_expected: 1.0 / TAU + centered,
                centered_variance: variance(&mut values.iter().map(|(e, z)| e[j] - z)),
                centered_expected: centered,
            }
        })
        .collect())
}

/// Carrier phase recovery: modulate by `e^{iNθ}`, project onto `k ≥ 0`, unwrap the
/// phase of the projection and subtract `Nθ`.
pub fn carrier_pipeline(f: &BoundarySignal, cycles: i64) -> Result<Vec<f64>> {
    let shifted = modulate_carrier(f, cycles, Sign::Plus)?;
    let p = project_nonnegative(&shifted);
    let floor = VANISHING_FRACTION * p.sup_norm().max(f64::MIN_POSITIVE);
    let count = p.samples().iter().filter(|z| !(z.norm() > floor)).count();
    if count > 0 {
        return Err(Error::ProjectionVanishes { count });
    }
    let step = TAU / f.len() as f64;
    Ok(unwrap_phase(p.samples()).into_iter().enumerate().map(|(j, ph)| ph - cycles as f64 * j as f64 * step).collect())
}

/// `‖φ − φ̂‖²` on the circle after removing the best constant multiple of `2π`.
pub fn phase_error_sq(truth: &[f64], estimate: &[f64]) -> f64 {
    let offset: f64 = truth.iter().zip(estimate).map(|(a, b)| a - b).sum::<f64>() / truth.len() as f64;
    let shift = TAU * (offset / TAU).round();
    let diff: Vec<f64> = truth.iter().zip(estimate).map(|(a, b)| a - b - shift).collect();
    l2_sq(&diff)
}

/// `case,lhs,rhs,margin` rows.
pub fn reports_csv(rows: &[(String, BoundReport)]) -> String {
    let mut s = String::from("case,lhs,rhs,margin\n");
    for (case, r) in rows {
        let _ = writeln!(s, "{case},{},{},{}", fmt_float(r.lhs), fmt_float(r.rhs), fmt_float(r.margin));
    }
    s
}
