//! Uniformly sampled complex signals on the circle and their Fourier coefficients.
//!
//! A [`BoundarySignal`] with `n` samples over a duration `T` stands for a function
//! on the unit circle: sample `j` sits at time `j T / n`, i.e. at angle `2 pi j / n`.
//! Fourier coefficient `k` of a signal multiplies `e^{ikθ}`, which is `k / T` Hz.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Signed frequency of DFT bin `bin` for a transform of length `n`.
///
/// Bins `0..ceil(n/2)` are the nonnegative frequencies; the rest, including the
/// Nyquist bin of an even-length transform, are negative.
#[inline]
pub fn bin_frequency(bin: usize, n: usize) -> i64 {
    if bin < n.div_ceil(2) {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySignal {
    samples: Vec<Complex64>,
    duration: f64,
}

impl BoundarySignal {
    pub fn new(samples: Vec<Complex64>, duration: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSignal(format!("need at least 2 samples, got {}", samples.len())));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidSignal(format!("duration must be positive, got {duration}")));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidSignal("non-finite sample".into()));
        }
        Ok(Self { samples, duration })
    }

    /// Real-valued samples.
    pub fn from_real(values: &[f64], duration: f64) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), duration)
    }

    /// Samples `f(θ_j)` of a function of the angle `θ ∈ [0, 2π)`, with duration `2π`.
    pub fn from_angle_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let step = std::f64::consts::TAU / n as f64;
        Self::new((0..n).map(|j| f(j as f64 * step)).collect(), std::f64::consts::TAU)
    }

    /// Samples `f(t_j)` of a function of time on `[0, duration)`.
    pub fn from_time_fn(n: usize, duration: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let dt = duration / n as f64;
        Self::new((0..n).map(|j| f(j as f64 * dt)).collect(), duration)
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<Complex64>, duration: f64) -> Self {
        debug_assert!(samples.len() >= 2 && duration > 0.0);
        Self { samples, duration }
    }

    /// Same grid, new samples.
    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self { samples, duration: self.duration }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn time_step(&self) -> f64 {
        self.duration / self.samples.len() as f64
    }

    pub fn sample_rate(&self) -> f64 {
        self.samples.len() as f64 / self.duration
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.time_step();
        (0..self.len()).map(move |j| j as f64 * dt)
    }

    /// Angles `2πj/n` of the samples on the circle.
    pub fn angles(&self) -> impl Iterator<Item = f64> {
        let n = self.len();
        let step = std::f64::consts::TAU / n as f64;
        (0..n).map(move |j| j as f64 * step)
    }

    /// `∫_0^{2π} |f|² dθ` by the rectangle rule on the circle.
    pub fn circle_norm_sq(&self) -> f64 {
        std::f64::consts::TAU * self.mean_power()
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    /// Euclidean norm of the sample vector.
    pub fn l2(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.len() as f64
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(self)
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        self.with_samples(self.samples.iter().map(|&z| f(z)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.with_samples(self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn zeros_like(&self) -> Self {
        self.with_samples(vec![Complex64::new(0.0, 0.0); self.len()])
    }

    pub fn ones_like(&self) -> Self {
        self.with_samples(vec![Complex64::new(1.0, 0.0); self.len()])
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!("{} samples vs {} samples", self.len(), other.len())));
        }
        if (self.duration - other.duration).abs() > 1e-9 * self.duration {
            return Err(Error::GridMismatch(format!("duration {} vs {}", self.duration, other.duration)));
        }
        Ok(())
    }

    /// Relative L² distance `‖self − other‖ / ‖other‖`.
    pub fn relative_error(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?;
        let denom = other.l2();
        if denom == 0.0 {
            return Err(Error::ZeroTruth);
        }
        Ok(diff.l2() / denom)
    }

    /// Keeps the first `len` samples, rescaling the duration accordingly.
    pub fn truncate(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return Err(Error::InvalidParameter(format!("cannot truncate {} samples to {len}", self.len())));
        }
        Self::new(self.samples[..len].to_vec(), self.time_step() * len as f64)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse_csv(&text).map_err(|message| Error::Parse { path: path.to_owned(), message })
    }

    /// Parses the `t,re,im` format. Rows must lie on a uniform time grid.
    pub fn parse_csv(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty file")?;
        let cols: Vec<_> = header.split(',').map(str::trim).collect();
        if cols != ["t", "re", "im"] {
            return Err(format!("expected header 't,re,im', found '{header}'"));
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<_> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(format!("row {}: expected 3 fields, found {}", i + 1, fields.len()));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: '{s}': {e}", i + 1));
            times.push(parse(fields[0])?);
            samples.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        if samples.len() < 2 {
            return Err("need at least 2 samples".into());
        }
        let n = samples.len();
        let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
        if !(dt > 0.0) {
            return Err("time column must be increasing".into());
        }
        let duration = dt * n as f64;
        let tol = 1e-9 * duration;
        for (j, &t) in times.iter().enumerate() {
            if (t - (times[0] + j as f64 * dt)).abs() > tol {
                return Err(format!("non-uniform time grid at row {}", j + 1));
            }
        }
        Self::new(samples, duration).map_err(|e| e.to_string())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str("t,re,im\n");
        for (t, z) in self.times().zip(&self.samples) {
            let _ = writeln!(out, "{},{},{}", fmt_float(t), fmt_float(z.re), fmt_float(z.im));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_csv().as_bytes())
    }
}

/// Fixed 12-significant-digit float formatting used by every text export.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // normalizes -0
        return "0.00000000000e0".to_string();
    }
    format!("{x:.11e}")
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Fourier coefficients `a_k` of a [`BoundarySignal`], so that
/// `f(θ_j) = Σ_k a_k e^{ikθ_j}` with `k ∈ [−⌊n/2⌋, ⌈n/2⌉ − 1]`.
///
/// Stored in the canonical DFT layout (nonnegative frequencies first).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(signal: &BoundarySignal) -> Self {
        let n = signal.len();
        let mut buf = signal.samples().to_vec();
        forward_plan(n).process(&mut buf);
        let inv_n = 1.0 / n as f64;
        for z in &mut buf {
            *z *= inv_n;
        }
        Self { coefficients: buf }
    }

    /// Builds a spectrum from coefficients in canonical DFT layout.
    pub fn from_layout(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn min_frequency(&self) -> i64 {
        -((self.len() / 2) as i64)
    }

    pub fn max_frequency(&self) -> i64 {
        self.len().div_ceil(2) as i64 - 1
    }

    fn slot(&self, k: i64) -> Option<usize> {
        if k < self.min_frequency() || k > self.max_frequency() {
            return None;
        }
        let n = self.len() as i64;
        Some(k.rem_euclid(n) as usize)
    }

    /// Coefficient at integer frequency `k`, zero outside the representable band.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.slot(k).map(|s| self.coefficients[s]).unwrap_or_default()
    }

    pub fn set(&mut self, k: i64, value: Complex64) {
        let slot = self.slot(k).expect("frequency outside the representable band");
        self.coefficients[slot] = value;
    }

    pub fn layout(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn layout_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// `(k, a_k)` pairs in canonical layout order.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.len();
        self.coefficients.iter().enumerate().map(move |(b, &c)| (bin_frequency(b, n), c))
    }

    /// Multiplies every coefficient `a_k` by `weight(k)`.
    pub fn apply(&mut self, weight: impl Fn(i64) -> Complex64) {
        let n = self.len();
        for (b, c) in self.coefficients.iter_mut().enumerate() {
            *c *= weight(bin_frequency(b, n));
        }
    }

    pub fn to_signal(&self, duration: f64) -> BoundarySignal {
        let mut buf = self.coefficients.clone();
        inverse_plan(buf.len()).process(&mut buf);
        BoundarySignal::from_parts_unchecked(buf, duration)
    }
}
