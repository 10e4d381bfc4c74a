//! The iterated Blaschke unwinding decomposition.
//!
//! Starting from `G₀ = P₊f`, each level splits `G_i = L_{i+1} + H_{i+1}` with a
//! polynomial trend `L_{i+1}` and factorizes `H_{i+1} = B_{i+1} G_{i+1}`. The
//! `l`-th oscillatory component is `L_{l+1} ∏_{k≤l} B_k`.
//!
//! With a carrier `ξ₀`, the (possibly reflected) input is multiplied by
//! `e^{i2πξ₀t}` before projection and every exported signal is demodulated.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::blaschke::{dirichlet_energy, weiss_factorize};
use crate::error::{Error, Result};
use crate::signal::{fmt_float, write_atomic, BoundarySignal};
use crate::spectral::{carrier_cycles, modulate_carrier, project_nonnegative, reflect, restrict, Sign};

pub const MAX_DETREND_ORDER: usize = 12;

/// Levels stop once `‖H‖₂` falls below this fraction of `‖G₀‖₂`.
const EXHAUSTION_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnwindConfig {
    /// Number of factorization levels `K`.
    pub depth: usize,
    /// Trend filter order `D`: the trend is a polynomial of degree `D − 1`.
    pub detrend_order: usize,
    pub stabilizer: f64,
    pub reflect: bool,
    /// Carrier frequency `ξ₀` in Hz; `0` disables the carrier.
    pub carrier_hz: f64,
}

impl UnwindConfig {
    pub fn new(depth: usize) -> Self {
        Self { depth, ..Self::default() }
    }

    pub fn detrend_order(mut self, order: usize) -> Self {
        self.detrend_order = order;
        self
    }

    pub fn stabilizer(mut self, eps: f64) -> Self {
        self.stabilizer = eps;
        self
    }

    pub fn reflect(mut self, on: bool) -> Self {
        self.reflect = on;
        self
    }

    pub fn carrier(mut self, hz: f64) -> Self {
        self.carrier_hz = hz;
        self
    }
}

impl Default for UnwindConfig {
    fn default() -> Self {
        Self { depth: 1, detrend_order: 1, stabilizer: 1e-4, reflect: false, carrier_hz: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnwindingDecomposition {
    /// `L₁ … L_{depth+1}`.
    pub trends: Vec<BoundarySignal>,
    /// `B₁ … B_depth`.
    pub factors: Vec<BoundarySignal>,
    /// `H_{depth+1} ∏ B_k`.
    pub residual: BoundarySignal,
    /// `‖G₀‖_𝔻 … ‖G_depth‖_𝔻`, measured on the analysed (possibly reflected) grid.
    pub dirichlet_norms: Vec<f64>,
    /// The holomorphic projection that was decomposed, on the output grid.
    pub analysed: BoundarySignal,
    pub config: UnwindConfig,
    /// Whole carrier periods over the analysed span (`0` without a carrier).
    pub carrier_cycles: i64,
    /// `e^{−i2πξ₀t}` on the output grid, empty without a carrier.
    demodulator: Vec<Complex64>,
}

impl UnwindingDecomposition {
    /// Levels actually achieved; below `config.depth` when the input was exhausted early.
    pub fn depth(&self) -> usize {
        self.factors.len()
    }

    /// Oscillatory components, demodulated when a carrier was used.
    pub fn components(&self) -> Vec<BoundarySignal> {
        reconstruct_components(self).iter().map(|c| self.demodulate(c)).collect()
    }

    /// Removes the carrier from a signal on the output grid (identity without one).
    pub fn demodulate(&self, s: &BoundarySignal) -> BoundarySignal {
        if self.demodulator.is_empty() {
            return s.clone();
        }
        s.with_samples(s.samples().iter().zip(&self.demodulator).map(|(a, b)| a * b).collect())
    }

    /// `L₁ + Σ f̃_l + residual`, demodulated.
    pub fn reconstruction(&self) -> BoundarySignal {
        let mut acc = self.demodulate(&self.trends[0].add(&self.residual).expect("shared grid"));
        for c in self.components() {
            acc = acc.add(&c).expect("shared grid");
        }
        acc
    }

    /// Writes `trend.csv`, `component_<l>.csv`, `residual.csv` and `decomposition.txt`.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, sig: &BoundarySignal| -> Result<()> {
            let path = dir.join(name);
            sig.write_csv(&path)?;
            written.push(path);
            Ok(())
        };
        put("trend.csv".into(), &self.demodulate(&self.trends[0]))?;
        for (l, c) in self.components().iter().enumerate() {
            put(format!("component_{}.csv", l + 1), c)?;
        }
        put("residual.csv".into(), &self.demodulate(&self.residual))?;
        let path = dir.join("decomposition.txt");
        write_atomic(&path, self.manifest_text().as_bytes())?;
        written.push(path);
        Ok(written)
    }

    pub fn manifest_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "requested_depth = {}", self.config.depth);
        let _ = writeln!(s, "depth = {}", self.depth());
        let _ = writeln!(s, "detrend_order = {}", self.config.detrend_order);
        let _ = writeln!(s, "stabilizer = {}", fmt_float(self.config.stabilizer));
        let _ = writeln!(s, "reflect = {}", self.config.reflect);
        let _ = writeln!(s, "carrier_hz = {}", fmt_float(self.config.carrier_hz));
        let _ = writeln!(s, "carrier_cycles = {}", self.carrier_cycles);
        let norms: Vec<_> = self.dirichlet_norms.iter().map(|&x| fmt_float(x)).collect();
        let _ = writeln!(s, "dirichlet_norms = {}", norms.join(","));
        s
    }
}

/// Least-squares polynomial trend of degree `order − 1` in `t`, fitted separately
/// to the real and imaginary parts. Returns `(trend, remainder)`.
pub fn detrend(g: &BoundarySignal, order: usize) -> Result<(BoundarySignal, BoundarySignal)> {
    if order == 0 {
        return Err(Error::InvalidParameter("detrend order must be at least 1".into()));
    }
    if order > MAX_DETREND_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    let n = g.len();
    if order == 1 {
        let mean = g.mean();
        return Ok((g.map(|_| mean), g.map(|z| z - mean)));
    }
    if order > n {
        return Err(Error::InvalidParameter(format!("order {order} exceeds {n} samples")));
    }
    let basis = orthonormal_legendre(n, order);
    let mut trend = vec![Complex64::new(0.0, 0.0); n];
    for q in &basis {
        let coef: Complex64 = q.iter().zip(g.samples()).map(|(&w, &z)| z * w).sum();
        for (t, &w) in trend.iter_mut().zip(q) {
            *t += coef * w;
        }
    }
    let remainder = g.samples().iter().zip(&trend).map(|(&z, &t)| z - t).collect();
    Ok((g.with_samples(trend), g.with_samples(remainder)))
}

/// Legendre polynomials on the sample grid mapped to `[−1, 1)`, re-orthonormalized
/// against the discrete inner product by modified Gram-Schmidt.
fn orthonormal_legendre(n: usize, order: usize) -> Vec<Vec<f64>> {
    let xs: Vec<f64> = (0..n).map(|j| 2.0 * j as f64 / n as f64 - 1.0).collect();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(order);
    let mut p_prev = vec![1.0; n];
    let mut p_cur = xs.clone();
    for deg in 0..order {
        let col = match deg {
            0 => vec![1.0; n],
            1 => xs.clone(),
            _ => {
                let k = deg as f64;
                let next: Vec<f64> =
                    (0..n).map(|j| ((2.0 * k - 1.0) * xs[j] * p_cur[j] - (k - 1.0) * p_prev[j]) / k).collect();
                p_prev = std::mem::replace(&mut p_cur, next);
                p_cur.clone()
            }
        };
        cols.push(col);
    }
    for i in 0..cols.len() {
        for _ in 0..2 {
            for j in 0..i {
                let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= dot * b;
                }
            }
        }
        let norm = cols[i].iter().map(|a| a * a).sum::<f64>().sqrt();
        for a in &mut cols[i] {
            *a /= norm;
        }
    }
    cols
}

pub fn unwind(f: &BoundarySignal, config: UnwindConfig) -> Result<UnwindingDecomposition> {
    if config.depth == 0 {
        return Err(Error::InvalidParameter("depth K must be at least 1".into()));
    }
    if config.detrend_order == 0 {
        return Err(Error::InvalidParameter("detrend order D must be at least 1".into()));
    }
    if config.detrend_order > MAX_DETREND_ORDER {
        return Err(Error::OrderTooHigh(config.detrend_order));
    }
    if !(config.stabilizer > 0.0) {
        return Err(Error::InvalidParameter("stabilizer must be positive".into()));
    }
    if !config.carrier_hz.is_finite() {
        return Err(Error::InvalidParameter("carrier frequency must be finite".into()));
    }
    let original_len = f.len();
    let mut work = if config.reflect && original_len > 2 { reflect(f) } else { f.clone() };
    // The carrier goes on after reflection so the mirrored half is lifted too. A
    // reflected span is generally not a whole number of periods; the count is then
    // rounded over that span, and demodulation uses the same count.
    let mut cycles = carrier_cycles(f, config.carrier_hz)?;
    let mut demodulator = Vec::new();
    if cycles != 0 {
        cycles = (config.carrier_hz * work.duration()).round() as i64;
        work = modulate_carrier(&work, cycles, Sign::Plus)?;
        let step = TAU / work.len() as f64;
        let m = work.len() as i64;
        demodulator =
            (0..original_len as i64).map(|j| Complex64::cis(-((cycles * j).rem_euclid(m) as f64) * step)).collect();
    }
    let g0 = project_nonnegative(&work);
    let scale = g0.l2();

    let mut trends = Vec::with_capacity(config.depth + 1);
    let mut factors = Vec::with_capacity(config.depth);
    let mut norms = vec![dirichlet_energy(&g0).sqrt()];
    let mut product = g0.ones_like();
    let mut current = g0.clone();
    let residual = loop {
        let (trend, rest) = detrend(&current, config.detrend_order)?;
        trends.push(trend);
        if factors.len() == config.depth || rest.l2() <= EXHAUSTION_RATIO * scale {
            break rest.mul(&product)?;
        }
        let fac = match weiss_factorize(&rest, config.stabilizer) {
            Ok(fac) => fac,
            Err(Error::ZeroSignal { .. }) => break rest.mul(&product)?,
            Err(e) => return Err(e),
        };
        product = product.mul(&fac.blaschke)?;
        norms.push(dirichlet_energy(&fac.outer).sqrt());
        factors.push(fac.blaschke);
        current = fac.outer;
    };

    let cut = |s: &BoundarySignal| {
        if s.len() == original_len {
            s.clone()
        } else {
            restrict(s, original_len)
        }
    };
    Ok(UnwindingDecomposition {
        trends: trends.iter().map(cut).collect(),
        factors: factors.iter().map(cut).collect(),
        residual: cut(&residual),
        dirichlet_norms: norms,
        analysed: cut(&g0),
        config,
        carrier_cycles: cycles,
        demodulator,
    })
}

/// `f̃_l = L_{l+1} ∏_{k≤l} B_k` for `l = 1 … depth`.
pub fn reconstruct_components(dec: &UnwindingDecomposition) -> Vec<BoundarySignal> {
    let mut product: Option<BoundarySignal> = None;
    dec.factors
        .iter()
        .zip(&dec.trends[1..])
        .map(|(b, trend)| {
            let p = match product.take() {
                Some(p) => p.mul(b).expect("shared grid"),
                None => b.clone(),
            };
            let c = trend.mul(&p).expect("shared grid");
            product = Some(p);
            c
        })
        .collect()
}
