//! Deterministic generators for the synthetic experiments.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::imt::ImtSpec;
use crate::signal::{forward_plan, inverse_plan, BoundarySignal};

const MAX_PHASE_ATTEMPTS: usize = 10;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random phase `φ(t) = ξ₀t + c₀∫₀ᵗ Φ/‖Φ‖_∞` driven by a Gaussian-smoothed Wiener path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseProcessSpec {
    /// `ξ₀`, in Hz.
    pub base_rate: f64,
    /// `c₀`, in Hz.
    pub deviation: f64,
    /// Gaussian smoothing scale in samples.
    pub smoothing: f64,
    pub duration: f64,
    pub sample_rate: f64,
    pub seed: u64,
}

impl PhaseProcessSpec {
    pub fn samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.base_rate > 0.0 && self.base_rate.is_finite()) {
            return bad("base rate must be positive");
        }
        if !(self.deviation >= 0.0 && self.deviation.is_finite()) {
            return bad("deviation must be nonnegative");
        }
        if !(self.smoothing > 0.0) {
            return bad("smoothing must be positive");
        }
        if !(self.duration > 0.0 && self.sample_rate > 0.0) || self.samples() < 2 {
            return bad("need at least two samples");
        }
        Ok(())
    }
}

/// Phase samples (cycles) and the matching instantaneous frequency (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePath {
    pub phase: Vec<f64>,
    pub rate: Vec<f64>,
    pub sample_rate: f64,
}

pub fn smoothed_wiener_phase(spec: &PhaseProcessSpec) -> Result<PhasePath> {
    spec.validate()?;
    let n = spec.samples();
    let dt = 1.0 / spec.sample_rate;
    let mut rng = rng(spec.seed);
    for _ in 0..MAX_PHASE_ATTEMPTS {
        let shape =
            if spec.deviation > 0.0 { smoothed_wiener_path(&mut rng, n, dt, spec.smoothing) } else { vec![0.0; n] };
        let rate: Vec<f64> = shape.iter().map(|s| spec.base_rate + spec.deviation * s).collect();
        if rate.iter().all(|&r| r > 0.0) {
            let mut acc = 0.0;
            let phase = (0..n)
                .map(|j| {
                    let p = spec.base_rate * j as f64 * dt + spec.deviation * acc;
                    acc += shape[j] * dt;
                    p
                })
                .collect();
            return Ok(PhasePath { phase, rate, sample_rate: spec.sample_rate });
        }
    }
    Err(Error::NonMonotonePhase { attempts: MAX_PHASE_ATTEMPTS })
}

/// `W ⋆ g_σ` normalized to unit sup norm; the path is evenly reflected before the
/// circular convolution so the ends do not wrap into each other.
fn smoothed_wiener_path(rng: &mut ChaCha8Rng, n: usize, dt: f64, sigma: f64) -> Vec<f64> {
    let scale = dt.sqrt();
    let mut w = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        acc += scale * rng.sample::<f64, _>(StandardNormal);
        w.push(acc);
    }
    let m = 2 * n;
    let mut buf: Vec<Complex64> = w.iter().chain(w.iter().rev()).map(|&x| Complex64::new(x, 0.0)).collect();
    let mut kernel = vec![Complex64::new(0.0, 0.0); m];
    let reach = ((8.0 * sigma).ceil() as usize).min(n);
    for d in 0..=reach {
        let g = (-0.5 * (d as f64 / sigma).powi(2)).exp();
        kernel[d].re += g;
        if d != 0 {
            kernel[m - d].re += g;
        }
    }
    let total: f64 = kernel.iter().map(|k| k.re).sum();
    forward_plan(m).process(&mut buf);
    forward_plan(m).process(&mut kernel);
    for (b, k) in buf.iter_mut().zip(&kernel) {
        *b *= k / (total * m as f64);
    }
    inverse_plan(m).process(&mut buf);
    let smoothed: Vec<f64> = buf[..n].iter().map(|z| z.re).collect();
    let sup = smoothed.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if sup > 0.0 {
        smoothed.iter().map(|x| x / sup).collect()
    } else {
        smoothed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoComponentSpec {
    pub seeds: [u64; 2],
    pub sample_rate: f64,
    pub duration: f64,
    pub smoothing: f64,
    pub base_rates: [f64; 2],
    pub deviations: [f64; 2],
}

impl Default for TwoComponentSpec {
    fn default() -> Self {
        Self {
            seeds: [1, 2],
            sample_rate: 512.0,
            duration: 10.0,
            smoothing: 200.0,
            base_rates: [FRAC_PI_2, 3.0],
            deviations: [1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoComponent {
    pub f1: BoundarySignal,
    pub f2: BoundarySignal,
    pub f: BoundarySignal,
    pub if1: Vec<f64>,
    pub if2: Vec<f64>,
}

impl TwoComponentSpec {
    pub fn generate(&self) -> Result<TwoComponent> {
        let path = |i: usize| {
            smoothed_wiener_phase(&PhaseProcessSpec {
                base_rate: self.base_rates[i],
                deviation: self.deviations[i],
                smoothing: self.smoothing,
                duration: self.duration,
                sample_rate: self.sample_rate,
                seed: self.seeds[i],
            })
        };
        let (p1, p2) = (path(0)?, path(1)?);
        let duration = p1.phase.len() as f64 / self.sample_rate;
        let tone =
            |p: &PhasePath| BoundarySignal::new(p.phase.iter().map(|&x| Complex64::cis(TAU * x)).collect(), duration);
        let (f1, f2) = (tone(&p1)?, tone(&p2)?);
        let f = f1.add(&f2)?;
        Ok(TwoComponent { f1, f2, f, if1: p1.rate, if2: p2.rate })
    }
}

/// Two unit-modulus components with random phases at the default rates and smoothing.
pub fn make_two_component(seed1: u64, seed2: u64, rate: f64, duration: f64) -> Result<TwoComponent> {
    TwoComponentSpec { seeds: [seed1, seed2], sample_rate: rate, duration, ..Default::default() }.generate()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// `f + σξ` with `σ` solved from `SNR = 20 log₁₀(std f / σ)`.
    Additive { snr_db: f64 },
    /// `f e^{ξ/2}`.
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

pub fn noise_sigma(f: &BoundarySignal, snr_db: f64) -> f64 {
    let mean = f.mean();
    let std = (f.samples().iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / f.len() as f64).sqrt();
    std / 10f64.powf(snr_db / 20.0)
}

pub fn apply_noise(f: &BoundarySignal, spec: &NoiseSpec) -> BoundarySignal {
    let mut rng = rng(spec.seed);
    let mut normal = move || rng.sample::<f64, _>(StandardNormal);
    match spec.kind {
        NoiseKind::Additive { snr_db } => {
            let sigma = noise_sigma(f, snr_db);
            if sigma == 0.0 {
                return f.clone();
            }
            let real = f.samples().iter().all(|z| z.im == 0.0);
            f.map(|z| {
                if real {
                    z + sigma * normal()
                } else {
                    let s = sigma / 2f64.sqrt();
                    z + Complex64::new(s * normal(), s * normal())
                }
            })
        }
        NoiseKind::Multiplicative => f.map(|z| z * (0.5 * normal()).exp()),
    }
}

/// Gaussian white noise on `n` equispaced angles with per-sample variance `1/Δ`,
/// `Δ = 2π/n`, so that `∫_I Φ` over an arc of length `|I|` has variance `|I|`.
pub fn circle_white_noise(n: usize, seed: u64) -> Result<BoundarySignal> {
    if n < 2 {
        return Err(Error::InvalidSignal("need at least two samples".into()));
    }
    let std = (n as f64 / TAU).sqrt();
    let mut rng = rng(seed);
    let samples = (0..n).map(|_| Complex64::new(std * rng.sample::<f64, _>(StandardNormal), 0.0)).collect();
    Ok(BoundarySignal::from_parts_unchecked(samples, TAU))
}

#[derive(Debug, Clone, PartialEq)]
pub enum NamedFunction {
    /// `2z + zⁿ`.
    TwoZPlusZn {
        n: u32,
    },
    /// `(z¹⁰ − 0.4¹⁰)(z − 0.7i)(z + 0.7)(z + 0.1 + 0.2i)`.
    RootProduct,
    /// `Σ a_j z^{n_j}`.
    Lacunary {
        terms: Vec<(u32, Complex64)>,
    },
    Monomial {
        k: u32,
    },
}

impl NamedFunction {
    pub const NAMES: [&'static str; 4] = ["two_z_plus_zn", "root_product", "lacunary", "monomial"];

    /// `n` parametrizes `two_z_plus_zn` and `monomial`; `lacunary` takes the default
    /// coefficients `1, ½, ⅛` at exponents `0, 2, 5`.
    pub fn parse(name: &str, n: Option<u32>) -> Result<Self> {
        match name {
            "two_z_plus_zn" => Ok(Self::TwoZPlusZn { n: n.unwrap_or(10) }),
            "root_product" => Ok(Self::RootProduct),
            "lacunary" => Ok(Self::Lacunary { terms: vec![(0, 1.0.into()), (2, 0.5.into()), (5, 0.125.into())] }),
            "monomial" => Ok(Self::Monomial { k: n.unwrap_or(1) }),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Self::TwoZPlusZn { n } => 2.0 * z + z.powu(*n),
            Self::RootProduct => {
                (z.powu(10) - 0.4f64.powi(10))
                    * (z - Complex64::new(0.0, 0.7))
                    * (z + 0.7)
                    * (z + Complex64::new(0.1, 0.2))
            }
            Self::Lacunary { terms } => terms.iter().map(|&(k, a)| a * z.powu(k)).sum(),
            Self::Monomial { k } => z.powu(*k),
        }
    }

    pub fn sample(&self, samples: usize) -> Result<BoundarySignal> {
        BoundarySignal::from_angle_fn(samples, |t| self.eval(Complex64::cis(t)))
    }

    /// Roots inside the unit disk, with multiplicity.
    pub fn roots(&self) -> Vec<Complex64> {
        match self {
            Self::RootProduct => {
                let mut r: Vec<Complex64> =
                    (0..10).map(|k| Complex64::from_polar(0.4, TAU * k as f64 / 10.0)).collect();
                r.extend([Complex64::new(0.0, 0.7), Complex64::new(-0.7, 0.0), Complex64::new(-0.1, -0.2)]);
                r
            }
            Self::Monomial { k } => vec![Complex64::new(0.0, 0.0); *k as usize],
            // z(2 + z^{n−1}): the other roots have modulus 2^{1/(n−1)} > 1
            Self::TwoZPlusZn { .. } => vec![Complex64::new(0.0, 0.0)],
            Self::Lacunary { .. } => Vec::new(),
        }
    }
}

pub fn named_function(name: &str, n: Option<u32>, samples: usize) -> Result<BoundarySignal> {
    NamedFunction::parse(name, n)?.sample(samples)
}

pub fn root_product(samples: usize) -> Result<BoundarySignal> {
    NamedFunction::RootProduct.sample(samples)
}

pub fn two_z_plus_zn(n: u32, samples: usize) -> Result<BoundarySignal> {
    NamedFunction::TwoZPlusZn { n }.sample(samples)
}

pub fn lacunary(terms: &[(u32, Complex64)], samples: usize) -> Result<BoundarySignal> {
    NamedFunction::Lacunary { terms: terms.to_vec() }.sample(samples)
}

/// A random IMT signal on `n` angles: `A = 1 + Σ small cosines`, `φ = mθ + Σ small sines`
/// with `m ≥ 4`. The accuracy is the smallest the samples satisfy.
pub fn random_imt(n: usize, seed: u64) -> Result<ImtSpec> {
    let mut rng = rng(seed);
    let m = rng.random_range(4..=40) as f64;
    let amp_terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|k| {
            let freq = (k + 1) as f64;
            (rng.random_range(0.0..0.15) / freq, freq, rng.random_range(0.0..TAU))
        })
        .collect();
    let phase_terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|k| {
            let freq = (k + 1) as f64;
            (rng.random_range(0.0..0.25) * m / (freq * freq * 4.0), freq, rng.random_range(0.0..TAU))
        })
        .collect();
    ImtSpec::from_fns(
        n,
        |t| 1.0 + amp_terms.iter().map(|&(a, f, p)| a * (f * t + p).cos()).sum::<f64>(),
        |t| m * t + phase_terms.iter().map(|&(a, f, p)| a * (f * t + p).sin()).sum::<f64>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(base: f64, dev: f64, seed: u64) -> PhaseProcessSpec {
        PhaseProcessSpec { base_rate: base, deviation: dev, smoothing: 200.0, duration: 10.0, sample_rate: 512.0, seed }
    }

    #[test]
    fn zero_deviation_is_linear() {
        let p = smoothed_wiener_phase(&spec(3.0, 0.0, 1)).unwrap();
        for (j, x) in p.phase.iter().enumerate() {
            assert!((x - 3.0 * j as f64 / 512.0).abs() < 1e-12);
        }
        assert!(p.rate.iter().all(|&r| r == 3.0));
    }

    #[test]
    fn wiener_phase_is_increasing_with_unit_deviation() {
        let p = smoothed_wiener_phase(&spec(FRAC_PI_2, 1.0, 11)).unwrap();
        assert_eq!(p.phase.len(), 5120);
        assert!(p.phase.windows(2).all(|w| w[1] > w[0]));
        let sup = p.rate.iter().map(|r| (r - FRAC_PI_2).abs()).fold(0.0, f64::max);
        assert!((sup - 1.0).abs() < 1e-12, "deviation normalized to c0: {sup}");
        let mean_slope = p.phase[5119] / (5119.0 / 512.0);
        assert!((mean_slope - FRAC_PI_2).abs() < 1.0);
    }

    #[test]
    fn phase_is_reproducible() {
        let a = smoothed_wiener_phase(&spec(3.0, 1.0, 5)).unwrap();
        let b = smoothed_wiener_phase(&spec(3.0, 1.0, 5)).unwrap();
        let c = smoothed_wiener_phase(&spec(3.0, 1.0, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn non_monotone_after_resampling() {
        // a lightly smoothed path almost surely changes sign, so φ′ dips below zero
        let r = smoothed_wiener_phase(&PhaseProcessSpec { smoothing: 2.0, ..spec(1e-6, 1.0, 3) });
        assert!(matches!(r, Err(Error::NonMonotonePhase { attempts: 10 })));
    }

    #[test]
    fn two_component_defaults() {
        let tc = make_two_component(1, 2, 512.0, 10.0).unwrap();
        for s in [&tc.f1, &tc.f2] {
            assert!(s.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        }
        let mean2 = tc.if2.iter().sum::<f64>() / tc.if2.len() as f64;
        assert!((mean2 - 3.0).abs() <= 1.0);
        assert!(tc.if2.iter().all(|r| (r - 3.0).abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn two_component_pure_tones() {
        let tc = TwoComponentSpec { deviations: [0.0, 0.0], ..Default::default() }.generate().unwrap();
        let t = 1.25;
        let j = (t * 512.0) as usize;
        assert!((tc.f1.samples()[j] - Complex64::cis(TAU * FRAC_PI_2 * t)).norm() < 1e-12);
        assert!((tc.f2.samples()[j] - Complex64::cis(TAU * 3.0 * t)).norm() < 1e-12);
    }

    #[test]
    fn additive_noise_level() {
        let f =
            BoundarySignal::from_real(&(0..4096).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>(), 1.0)
                .unwrap();
        assert!((noise_sigma(&f, 10.0) - 10f64.powf(-0.5)).abs() < 1e-12);
        let unchanged = apply_noise(&f, &NoiseSpec { kind: NoiseKind::Additive { snr_db: f64::INFINITY }, seed: 1 });
        assert_eq!(unchanged, f);
        let noisy = apply_noise(&f, &NoiseSpec { kind: NoiseKind::Additive { snr_db: 10.0 }, seed: 1 });
        assert!(noisy.samples().iter().all(|z| z.im == 0.0));
        let err = noisy.sub(&f).unwrap();
        let std = err.mean_power().sqrt();
        assert!((std - 0.3162).abs() < 0.02, "{std}");
    }

    #[test]
    fn complex_noise_splits_power() {
        let f = BoundarySignal::from_time_fn(8192, 1.0, |t| Complex64::cis(TAU * 5.0 * t)).unwrap();
        let noisy = apply_noise(&f, &NoiseSpec { kind: NoiseKind::Additive { snr_db: 0.0 }, seed: 9 });
        let d = noisy.sub(&f).unwrap();
        let re = d.samples().iter().map(|z| z.re * z.re).sum::<f64>() / 8192.0;
        let im = d.samples().iter().map(|z| z.im * z.im).sum::<f64>() / 8192.0;
        assert!((re - 0.5).abs() < 0.05 && (im - 0.5).abs() < 0.05, "{re} {im}");
    }

    #[test]
    fn multiplicative_noise_inflates_amplitude() {
        let f = BoundarySignal::from_time_fn(20000, 1.0, |t| Complex64::cis(TAU * 5.0 * t)).unwrap();
        let z = apply_noise(&f, &NoiseSpec { kind: NoiseKind::Multiplicative, seed: 4 });
        let mean = z.samples().iter().map(|z| z.norm()).sum::<f64>() / 20000.0;
        assert!(mean > 1.0);
        assert!((mean - (0.125f64).exp()).abs() < 0.02, "{mean}");
    }

    #[test]
    fn white_noise_interval_integrals() {
        let n = 256;
        let trials = 10_000;
        let dt = TAU / n as f64;
        let (mut full, mut a_sq, mut b_sq, mut ab) = (Vec::with_capacity(trials), 0.0, 0.0, 0.0);
        for seed in 0..trials as u64 {
            let w = circle_white_noise(n, seed).unwrap();
            let s = w.samples();
            let a: f64 = s[..n / 2].iter().map(|z| z.re).sum::<f64>() * dt;
            let b: f64 = s[n / 2..].iter().map(|z| z.re).sum::<f64>() * dt;
            full.push(a + b);
            a_sq += a * a;
            b_sq += b * b;
            ab += a * b;
        }
        let var = full.iter().map(|x| x * x).sum::<f64>() / trials as f64;
        assert!((var - TAU).abs() / TAU < 0.05, "{var}");
        let corr = ab / (a_sq * b_sq).sqrt();
        assert!(corr.abs() < 0.05, "{corr}");
    }

    #[test]
    fn named_functions() {
        let f = named_function("two_z_plus_zn", Some(10), 1024).unwrap();
        assert!((f.samples()[0] - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(matches!(named_function("nope", None, 16), Err(Error::UnknownFunction(_))));
        let roots = NamedFunction::RootProduct.roots();
        for z in &roots {
            assert!(NamedFunction::RootProduct.eval(*z).norm() < 1e-12);
        }
        let mut moduli: Vec<f64> = roots.iter().map(|z| (z.norm() * 1e4).round() / 1e4).collect();
        moduli.sort_by(f64::total_cmp);
        moduli.dedup();
        assert_eq!(moduli, vec![0.2236, 0.4, 0.7]);
        let count = |m: f64| roots.iter().filter(|z| (z.norm() - m).abs() < 1e-3).count();
        assert_eq!((count(0.2236), count(0.4), count(0.7)), (1, 10, 2));
        if let NamedFunction::Lacunary { terms } = NamedFunction::parse("lacunary", None).unwrap() {
            for i in 0..terms.len() {
                let tail: f64 = terms[i + 1..].iter().map(|t| t.1.norm()).sum();
                assert!(terms[i].1.norm() > tail);
            }
        } else {
            unreachable!();
        }
    }

    #[test]
    fn random_imt_validates() {
        for seed in 0..20 {
            let spec = random_imt(1024, seed).unwrap();
            assert!(spec.accuracy() < 1.0, "seed {seed}: {}", spec.accuracy());
        }
    }
}
