use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::TfrGrid;
use crate::error::{Error, Result};
use crate::signal::{bin_frequency, forward_plan, BoundarySignal};
use crate::spectral::reflect_conjugate;

/// Hard threshold `Θ` on `|V|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    /// Fraction of the root-mean-square amplitude of the analysed signal.
    RelativeRms(f64),
}

impl Threshold {
    pub fn resolve(&self, f: &BoundarySignal) -> f64 {
        match *self {
            Threshold::Absolute(x) => x,
            Threshold::RelativeRms(x) => x * f.mean_power().sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SstConfig {
    /// Gaussian window scale, seconds.
    pub window_sigma: f64,
    /// Output frequency bin width, Hz.
    pub freq_step: f64,
    /// Upper end of the output axis; defaults to half the sample rate.
    pub freq_max: Option<f64>,
    /// Samples between time columns.
    pub hop: usize,
    pub threshold: Threshold,
    /// Spacing of the STFT frequencies `η` that get reassigned; defaults to `freq_step`.
    /// Reassignment makes the output resolution independent of this spacing.
    pub analysis_step: Option<f64>,
    /// Analyse the conjugate-even reflection and keep the original span.
    pub reflect: bool,
}

impl Default for SstConfig {
    fn default() -> Self {
        Self {
            window_sigma: 0.25,
            freq_step: 0.0128,
            freq_max: None,
            hop: 16,
            threshold: Threshold::RelativeRms(1e-6),
            analysis_step: None,
            reflect: false,
        }
    }
}

impl SstConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.window_sigma > 0.0 && self.window_sigma.is_finite()) {
            return bad("window sigma must be positive");
        }
        if !(self.freq_step > 0.0 && self.freq_step.is_finite()) {
            return bad("frequency step must be positive");
        }
        if self.hop == 0 {
            return bad("hop must be at least one sample");
        }
        if matches!(self.analysis_step, Some(a) if !(a > 0.0 && a.is_finite())) {
            return bad("analysis step must be positive");
        }
        if matches!(self.freq_max, Some(m) if !(m >= 0.0)) {
            return bad("frequency maximum must be nonnegative");
        }
        match self.threshold {
            Threshold::Absolute(x) | Threshold::RelativeRms(x) if !(x >= 0.0) => bad("threshold must be nonnegative"),
            _ => Ok(()),
        }
    }

    fn freq_max_for(&self, f: &BoundarySignal) -> f64 {
        self.freq_max.unwrap_or(0.5 * f.sample_rate())
    }
}

/// STFT `V(t, η) = ∫ f(t+u) h(u) e^{−i2πηu} du` of the periodically extended
/// signal, with the phase referenced to the window centre. The pair
/// `(V^h, V^{h′})` feeds the reassignment rule. With `bins = None` every FFT bin
/// is kept, negative frequencies included, so that reassignment sees the whole
/// spectrum.
struct Analysis {
    v: TfrGrid<Complex64>,
    dv: TfrGrid<Complex64>,
    /// `η` per bin; negative for the upper half when all bins are kept.
    etas: Vec<f64>,
}

fn analyse(f: &BoundarySignal, sigma: f64, step: f64, bins: Option<usize>, hop: usize) -> Result<Analysis> {
    let duration = f.duration();
    if 8.0 * sigma > duration {
        return Err(Error::WindowTooWide { span: 8.0 * sigma, duration });
    }
    let fs = f.sample_rate();
    let m = ((fs / step).round() as usize).max(1);
    let eff_step = fs / m as f64;
    let n_bins = bins.unwrap_or(m).clamp(1, m);
    let etas = (0..n_bins)
        .map(|k| if bins.is_none() { bin_frequency(k, m) as f64 * eff_step } else { k as f64 * eff_step })
        .collect();
    let half = (4.0 * sigma * fs).floor() as isize;
    let taps: Vec<(isize, f64, f64)> = (-half..=half)
        .map(|k| {
            let u = k as f64 / fs;
            let h = (-0.5 * (u / sigma).powi(2)).exp();
            (k, h, -u / (sigma * sigma) * h)
        })
        .collect();
    let n = f.len();
    let samples = f.samples();
    let n_cols = n.div_ceil(hop);
    let columns: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..n_cols)
        .into_par_iter()
        .map(|c| {
            let centre = (c * hop) as isize;
            let mut a = vec![Complex64::new(0.0, 0.0); m];
            let mut b = vec![Complex64::new(0.0, 0.0); m];
            for &(k, h, dh) in &taps {
                let z = samples[(centre + k).rem_euclid(n as isize) as usize];
                let pos = k.rem_euclid(m as isize) as usize;
                a[pos] += z * h;
                b[pos] += z * dh;
            }
            let plan = forward_plan(m);
            plan.process(&mut a);
            plan.process(&mut b);
            a.truncate(n_bins);
            b.truncate(n_bins);
            let scale = 1.0 / fs;
            a.iter_mut().chain(b.iter_mut()).for_each(|z| *z *= scale);
            (a, b)
        })
        .collect();
    let time_step = hop as f64 / fs;
    let (va, vb): (Vec<_>, Vec<_>) = columns.into_iter().unzip();
    Ok(Analysis {
        v: TfrGrid::from_columns(va, n_bins, time_step, eff_step, 0.0, hop),
        dv: TfrGrid::from_columns(vb, n_bins, time_step, eff_step, 0.0, hop),
        etas,
    })
}

fn output_bins(freq_max: f64, step: f64) -> usize {
    (freq_max / step + 1e-9).floor() as usize + 1
}

/// STFT on the frequency axis `0, Δ, …, freq_max`, where `Δ = fs / round(fs / freq_step)`.
pub fn stft(f: &BoundarySignal, cfg: &SstConfig) -> Result<TfrGrid<Complex64>> {
    cfg.validate()?;
    let bins = output_bins(cfg.freq_max_for(f), cfg.freq_step);
    Ok(analyse(f, cfg.window_sigma, cfg.freq_step, Some(bins), cfg.hop)?.v)
}

/// `Ω(t, η) = η − Im(V^{h′} / V^h) / 2π` where `|V^h| > Θ`, `−∞` elsewhere.
pub fn reassignment_frequency(f: &BoundarySignal, cfg: &SstConfig) -> Result<TfrGrid<f64>> {
    cfg.validate()?;
    let bins = output_bins(cfg.freq_max_for(f), cfg.freq_step);
    let a = analyse(f, cfg.window_sigma, cfg.freq_step, Some(bins), cfg.hop)?;
    let theta = cfg.threshold.resolve(f);
    Ok(reassign(&a, theta))
}

fn reassign(a: &Analysis, theta: f64) -> TfrGrid<f64> {
    let mut out = TfrGrid::filled(&a.v, f64::NEG_INFINITY);
    for t in 0..a.v.n_times() {
        for k in 0..a.v.n_freqs() {
            let v = a.v.get(t, k);
            if v.norm() > theta {
                let ratio = a.dv.get(t, k) / v;
                out.set(t, k, a.etas[k] - ratio.im / TAU);
            }
        }
    }
    out
}

/// Complex synchrosqueezed transform plus, per column, the above-threshold STFT
/// mass `Δη Σ V` whose reassigned frequency landed on the output axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SstOutput {
    pub grid: TfrGrid<Complex64>,
    pub captured: Vec<Complex64>,
    pub threshold: f64,
}

pub fn sst_complex(f: &BoundarySignal, cfg: &SstConfig) -> Result<SstOutput> {
    cfg.validate()?;
    sst_with_threshold(f, cfg, cfg.threshold.resolve(f))
}

fn sst_with_threshold(f: &BoundarySignal, cfg: &SstConfig, theta: f64) -> Result<SstOutput> {
    let freq_max = cfg.freq_max_for(f);
    if cfg.reflect && f.len() > 2 {
        let n_cols = f.len().div_ceil(cfg.hop);
        let inner = SstConfig { reflect: false, freq_max: Some(freq_max), ..*cfg };
        let mut out = sst_with_threshold(&reflect_conjugate(f), &inner, theta)?;
        out.grid.truncate_times(n_cols);
        out.captured.truncate(n_cols);
        return Ok(out);
    }
    let step = cfg.analysis_step.unwrap_or(cfg.freq_step);
    let a = analyse(f, cfg.window_sigma, step, None, cfg.hop)?;
    let omega = reassign(&a, theta);
    let n_out = output_bins(freq_max, cfg.freq_step);
    let d_eta = a.v.freq_step;
    let mut columns = Vec::with_capacity(a.v.n_times());
    let mut captured = Vec::with_capacity(a.v.n_times());
    for t in 0..a.v.n_times() {
        let mut col = vec![Complex64::new(0.0, 0.0); n_out];
        let mut mass = Complex64::new(0.0, 0.0);
        for (k, &w) in omega.column(t).iter().enumerate() {
            if !w.is_finite() {
                continue;
            }
            let bin = (w / cfg.freq_step).round();
            if bin >= 0.0 && (bin as usize) < n_out {
                let v = a.v.get(t, k) * d_eta;
                col[bin as usize] += v;
                mass += v;
            }
        }
        columns.push(col);
        captured.push(mass);
    }
    let grid = TfrGrid::from_columns(columns, n_out, a.v.time_step, cfg.freq_step, 0.0, cfg.hop);
    Ok(SstOutput { grid, captured, threshold: theta })
}

/// `|S_f|` on the output axis.
pub fn sst(f: &BoundarySignal, cfg: &SstConfig) -> Result<TfrGrid<f64>> {
    Ok(sst_complex(f, cfg)?.grid.magnitude())
}

/// `B_f = √(Σ_k |S_{f_k}|²)`, with `Θ` resolved once on `Σ_k f_k`.
pub fn blaschke_tfr(components: &[BoundarySignal], cfg: &SstConfig) -> Result<TfrGrid<f64>> {
    cfg.validate()?;
    let first = components.first().ok_or_else(|| Error::InvalidParameter("need at least one component".into()))?;
    let mut sum = first.clone();
    for c in &components[1..] {
        if c.len() != first.len() {
            return Err(Error::GridMismatch(format!("component lengths {} and {} differ", first.len(), c.len())));
        }
        sum = sum.add(c)?;
    }
    let theta = cfg.threshold.resolve(&sum);
    let mut acc: Option<TfrGrid<f64>> = None;
    for c in components {
        let s = sst_with_threshold(c, cfg, theta)?.grid.map(|z| z.norm_sqr());
        acc = Some(match acc {
            None => s,
            Some(mut a) => {
                for t in 0..a.n_times() {
                    for (x, y) in a.column_mut(t).iter_mut().zip(s.column(t)) {
                        *x += y;
                    }
                }
                a
            }
        });
    }
    Ok(acc.expect("at least one component").map(f64::sqrt))
}
