//! Blaschke factorization `F = B·G` by the Weiss algorithm, Dirichlet-space
//! energies and winding numbers.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::cyclic_increments;
use crate::signal::BoundarySignal;
use crate::spectral::{analytic_of_real, negative_energy};

/// `|B|` below this is left unnormalized.
const UNIMODULAR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeFactorization {
    pub blaschke: BoundarySignal,
    pub outer: BoundarySignal,
    pub stabilizer: f64,
}

impl BlaschkeFactorization {
    pub fn product(&self) -> BoundarySignal {
        self.blaschke.mul(&self.outer).expect("factors share a grid")
    }
}

/// Splits `F` into a unimodular Blaschke factor and a root-free outer factor.
///
/// The outer factor is `exp(u + i𝓗u)` with `u = ln √(|F|² + ε²)`, so that
/// `|G| = √(|F|² + ε²)` on the boundary and `G(0) > 0`. The Blaschke factor is
/// `F / G`, renormalized to unit modulus wherever its modulus exceeds `1e−9`.
pub fn weiss_factorize(f: &BoundarySignal, eps: f64) -> Result<BlaschkeFactorization> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("stabilizer must be positive, got {eps}")));
    }
    let sup = f.sup_norm();
    let floor = eps * 1e-3;
    if sup < floor {
        return Err(Error::ZeroSignal { sup, floor });
    }
    let eps_sq = eps * eps;
    let log_modulus = f.map(|z| Complex64::new(0.5 * (z.norm_sqr() + eps_sq).ln(), 0.0));
    let outer = analytic_of_real(&log_modulus).map(|z| z.exp());
    let blaschke = f.with_samples(
        f.samples()
            .iter()
            .zip(outer.samples())
            .map(|(&num, &den)| {
                let b = num / den;
                let m = b.norm();
                if m > UNIMODULAR_FLOOR {
                    b / m
                } else {
                    b
                }
            })
            .collect(),
    );
    Ok(BlaschkeFactorization { blaschke, outer, stabilizer: eps })
}

/// Total phase increase of a closed boundary curve divided by `2π`.
pub fn winding_number(b: &BoundarySignal) -> Result<f64> {
    let min = b.samples().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(min > 1e-6) {
        return Err(Error::VanishingModulus { min });
    }
    Ok(cyclic_increments(b.samples()).iter().sum::<f64>() / TAU)
}

/// `π Σ_{k≥1} k |a_k|²` with no holomorphy check.
pub(crate) fn dirichlet_energy(f: &BoundarySignal) -> f64 {
    PI * f.spectrum().indexed().filter(|(k, _)| *k >= 1).map(|(k, a)| k as f64 * a.norm_sqr()).sum::<f64>()
}

/// Dirichlet energy `∫_𝔻 |F′(z)|² dA` of the holomorphic extension of `F`.
pub fn dirichlet_norm_sq(f: &BoundarySignal) -> Result<f64> {
    let total = f.circle_norm_sq();
    let ratio = if total > 0.0 { (negative_energy(f) / total).sqrt() } else { 0.0 };
    if ratio > 1e-6 {
        return Err(Error::NotHolomorphic { ratio });
    }
    Ok(dirichlet_energy(f))
}

/// Both sides of the Carleson identity for `F = B·G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonDecrement {
    /// `∫_𝔻 |F′|²`.
    pub lhs: f64,
    /// `∫_𝔻 |G′|²` for the Weiss outer factor.
    pub outer_energy: f64,
    /// The root-weighted boundary integral, obtained as `lhs − outer_energy`.
    pub boundary_term: f64,
}

pub fn carleson_decrement(f: &BoundarySignal, eps: f64) -> Result<CarlesonDecrement> {
    let lhs = dirichlet_norm_sq(f)?;
    let factors = weiss_factorize(f, eps)?;
    let outer_energy = dirichlet_energy(&factors.outer);
    Ok(CarlesonDecrement { lhs, outer_energy, boundary_term: lhs - outer_energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use proptest::prelude::*;

    fn circle(n: usize, f: impl Fn(Complex64) -> Complex64) -> BoundarySignal {
        BoundarySignal::from_angle_fn(n, |t| f(Complex64::cis(t))).unwrap()
    }

    fn close(a: &BoundarySignal, b: &BoundarySignal, tol: f64) {
        let err = a.relative_error(b).unwrap();
        assert!(err < tol, "relative error {err:e} >= {tol:e}");
    }

    #[test]
    fn monomial_factorizes_to_itself() {
        let z = circle(256, |z| z);
        let fac = weiss_factorize(&z, 1e-4).unwrap();
        close(&fac.blaschke, &z, 1e-9);
        close(&fac.outer, &z.ones_like(), 1e-8);
    }

    #[test]
    fn two_z_plus_z5() {
        let f = circle(512, |z| 2.0 * z + z.powu(5));
        let fac = weiss_factorize(&f, 1e-4).unwrap();
        close(&fac.blaschke, &circle(512, |z| z), 1e-8);
        // |G| = √(|F|² + ε²) biases the outer factor by about ε²/2
        close(&fac.outer, &circle(512, |z| 2.0 + z.powu(4)), 1e-8);
    }

    #[test]
    fn mobius_times_outer() {
        let a = 0.5;
        let mobius = |z: Complex64| (z - a) / (1.0 - a * z);
        let f = circle(1024, |z| mobius(z) * (3.0 + z));
        let fac = weiss_factorize(&f, 1e-4).unwrap();
        let expected = circle(1024, mobius);
        // compare phases against the closed-form Möbius phase
        let worst = fac
            .blaschke
            .samples()
            .iter()
            .zip(expected.samples())
            .map(|(b, m)| (b * m.conj()).arg().abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "phase error {worst:e}");
        close(&fac.outer, &circle(1024, |z| 3.0 + z), 1e-9);
    }

    #[test]
    fn rejects_zero_signal() {
        let f = circle(64, |_| Complex64::new(0.0, 0.0));
        assert!(matches!(weiss_factorize(&f, 1e-4), Err(Error::ZeroSignal { .. })));
    }

    #[test]
    fn winding_examples() {
        assert!((winding_number(&circle(512, |z| z.powu(7))).unwrap() - 7.0).abs() < 1e-12);
        let zero = circle(64, |z| z - 1.0);
        assert!(matches!(winding_number(&zero), Err(Error::VanishingModulus { .. })));
    }

    #[test]
    fn winding_of_root_product_blaschke() {
        let f = synth::root_product(1024).unwrap();
        for (r, expected) in [(0.9, 13.0), (0.55, 11.0)] {
            let u = crate::spectral::poisson_convolve(&f, r).unwrap();
            let b = weiss_factorize(&u, 1e-4).unwrap().blaschke;
            let w = winding_number(&b).unwrap();
            assert!((w - expected).abs() < 0.05, "r = {r}: {w}");
            // phase rise reported for the root-product example: ~81.7 and ~69.1
            assert!((w * TAU - expected * TAU).abs() < 0.3);
        }
    }

    #[test]
    fn dirichlet_examples() {
        let n = 1024;
        assert!((dirichlet_norm_sq(&circle(n, |z| z)).unwrap() - PI).abs() < 1e-12);
        let f = circle(n, |z| 2.0 * z + z.powu(10));
        assert!((dirichlet_norm_sq(&f).unwrap() - 14.0 * PI).abs() < 1e-10);
        assert!(dirichlet_norm_sq(&circle(n, |_| Complex64::new(4.0, 1.0))).unwrap().abs() < 1e-12);
        let anti = circle(n, |z| z + 0.1 / z);
        assert!(matches!(dirichlet_norm_sq(&anti), Err(Error::NotHolomorphic { .. })));
    }

    /// Area formula: for univalent F the Dirichlet energy equals the area of F(𝔻).
    #[test]
    fn dirichlet_equals_enclosed_area() {
        let n = 2048;
        let f = circle(n, |z| z + 0.2 * z * z);
        let s = f.samples();
        // shoelace formula on the boundary polygon
        let area = 0.5
            * (0..n)
                .map(|j| {
                    let (a, b) = (s[j], s[(j + 1) % n]);
                    a.re * b.im - b.re * a.im
                })
                .sum::<f64>();
        let d = dirichlet_norm_sq(&f).unwrap();
        assert!((d - area).abs() / d < 1e-4, "{d} vs {area}");
    }

    #[test]
    fn carleson_examples() {
        let n = 1024;
        let c = carleson_decrement(&circle(n, |z| 2.0 * z + z.powu(10)), 1e-4).unwrap();
        assert!((c.lhs - 14.0 * PI).abs() < 1e-9);
        assert!((c.outer_energy - 9.0 * PI).abs() < 1e-6);
        assert!((c.boundary_term - 5.0 * PI).abs() < 1e-6);

        let c = carleson_decrement(&circle(n, |z| z), 1e-4).unwrap();
        assert!((c.lhs - PI).abs() < 1e-12);
        assert!(c.outer_energy.abs() < 1e-12);
        assert!((c.boundary_term - PI).abs() < 1e-9);

        let c = carleson_decrement(&circle(n, |z| 3.0 + z * (1.0 - 0.5 * z)), 1e-4).unwrap();
        assert!(c.boundary_term.abs() < 1e-8 * c.lhs);
    }

    fn random_poly() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn factorization_reconstructs_and_is_unimodular(coeffs in random_poly()) {
            let n = 512;
            let f = circle(n, |z| {
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &(a, b)| acc * z + Complex64::new(a, b))
            });
            let eps = 1e-4;
            let min = f.samples().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            prop_assume!(min >= 0.1);
            let fac = weiss_factorize(&f, eps).unwrap();
            prop_assert!(fac.product().relative_error(&f).unwrap() <= 1e-6);
            let dev = fac.blaschke.samples().iter().map(|b| (b.norm() - 1.0).abs()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-10);
        }
    }
}
