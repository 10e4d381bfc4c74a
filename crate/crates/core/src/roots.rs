//! Root detection by sweeping Poisson radii: the Blaschke factor of `u_r` winds
//! once around the origin for every root of `F` inside the circle of radius `r`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::blaschke::{weiss_factorize, winding_number};
use crate::error::{Error, Result};
use crate::phase::cyclic_increments;
use crate::signal::BoundarySignal;
use crate::spectral::{poisson_convolve, project_nonnegative};

/// Radii whose `min |u_r| / sup |u_r|` falls below this multiple of `ε` are skipped.
pub const SKIP_FACTOR: f64 = 10.0;

/// `0.01, 0.02, …, 0.99`.
pub fn default_radii() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

/// A jump of the winding number between two consecutive scanned radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: i64,
}

impl Transition {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.r_lo + self.r_hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootScanResult {
    /// Radii that were factorized, increasing.
    pub radii: Vec<f64>,
    pub windings: Vec<i64>,
    /// Unrounded windings, for diagnostics.
    pub raw_windings: Vec<f64>,
    /// Radii too close to a root to factorize reliably.
    pub skipped: Vec<f64>,
    pub transitions: Vec<Transition>,
}

impl RootScanResult {
    /// Winding at the smallest scanned radius (roots at the origin).
    pub fn base_winding(&self) -> i64 {
        self.windings.first().copied().unwrap_or(0)
    }

    pub fn winding_at(&self, r: f64) -> Option<i64> {
        self.radii.iter().position(|&x| (x - r).abs() < 1e-12).map(|i| self.windings[i])
    }

    /// `r,winding` rows.
    pub fn windings_csv(&self) -> String {
        let mut s = String::from("r,winding\n");
        for (r, w) in self.radii.iter().zip(&self.windings) {
            s.push_str(&format!("{r},{w}\n"));
        }
        s
    }

    /// `r_lo,r_hi,count` rows.
    pub fn transitions_csv(&self) -> String {
        let mut s = String::from("r_lo,r_hi,count\n");
        for t in &self.transitions {
            s.push_str(&format!("{},{},{}\n", t.r_lo, t.r_hi, t.count));
        }
        s
    }
}

enum Probe {
    Winding(f64),
    Skipped,
}

fn probe(g: &BoundarySignal, r: f64, eps: f64) -> Result<Probe> {
    let u = poisson_convolve(g, r)?;
    // windings are scale-free; normalizing keeps ε meaningful for tiny inputs
    let sup = u.sup_norm();
    if !(sup > 0.0) {
        return Ok(Probe::Skipped);
    }
    let u = u.scale(Complex64::new(1.0 / sup, 0.0));
    let min = u.samples().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min < SKIP_FACTOR * eps {
        return Ok(Probe::Skipped);
    }
    let fac = weiss_factorize(&u, eps)?;
    match winding_number(&fac.blaschke) {
        Ok(w) => Ok(Probe::Winding(w)),
        Err(Error::VanishingModulus { .. }) => Ok(Probe::Skipped),
        Err(e) => Err(e),
    }
}

/// Winding number of the Blaschke factor of `u_r = P_r ⋆ P₊f` at every radius.
pub fn scan(f: &BoundarySignal, radii: &[f64], eps: f64) -> Result<RootScanResult> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("no radii to scan".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::RadiusOutOfRange(r));
    }
    let g = project_nonnegative(f);
    let probes: Vec<Probe> = radii.par_iter().map(|&r| probe(&g, r, eps)).collect::<Result<_>>()?;

    let mut out = RootScanResult {
        radii: Vec::new(),
        windings: Vec::new(),
        raw_windings: Vec::new(),
        skipped: Vec::new(),
        transitions: Vec::new(),
    };
    for (&r, p) in radii.iter().zip(probes) {
        match p {
            Probe::Winding(w) => {
                let rounded = w.round() as i64;
                if let (Some(&r_lo), Some(&prev)) = (out.radii.last(), out.windings.last()) {
                    if rounded != prev {
                        out.transitions.push(Transition { r_lo, r_hi: r, count: rounded - prev });
                    }
                }
                out.radii.push(r);
                out.windings.push(rounded);
                out.raw_windings.push(w);
            }
            Probe::Skipped => out.skipped.push(r),
        }
    }
    Ok(out)
}

/// `dθ`-derivative of the unwrapped phase of `B`, by centred differences on the
/// circle. Sums to `2π · winding / dθ`.
pub fn blaschke_if(b: &BoundarySignal) -> Result<Vec<f64>> {
    let min = b.samples().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(min > 1e-6) {
        return Err(Error::VanishingModulus { min });
    }
    let n = b.len();
    let inc = cyclic_increments(b.samples());
    let dtheta = TAU / n as f64;
    Ok((0..n).map(|j| (inc[(j + n - 1) % n] + inc[j]) / (2.0 * dtheta)).collect())
}
