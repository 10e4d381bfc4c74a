use super::grid::TfrGrid;
use crate::error::{Error, Result};
use crate::signal::{fmt_float, write_atomic};

/// Regularizes `log` on empty cells.
pub const LOG_FLOOR: f64 = 1e-12;
/// Half-width, in bins, of the band removed around each extracted curve.
pub const MASK_HALF_WIDTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct IfCurve {
    pub times: Vec<f64>,
    pub bins: Vec<usize>,
    /// Hz, one per time column.
    pub frequencies: Vec<f64>,
    pub penalty: f64,
}

impl IfCurve {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,frequency\n");
        for (t, f) in self.times.iter().zip(&self.frequencies) {
            s.push_str(&format!("{},{}\n", fmt_float(*t), fmt_float(*f)));
        }
        s
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Greedy ridge extraction. Each curve maximizes
/// `Σ_t log(v(t, b_t) + δ) − (λ / hop) Σ_t (b_{t+1} − b_t)²` over bin paths, where
/// `v` is the grid normalized by its total; dividing by the hop makes the penalty
/// a per-sample rate. Ties resolve toward the lower bin. After each curve a
/// `±3`-bin band around it is zeroed.
pub fn extract_if(tfr: &TfrGrid<f64>, lambda: f64, count: usize) -> Result<Vec<IfCurve>> {
    if tfr.n_times() == 0 || tfr.n_freqs() == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("penalty must be nonnegative, got {lambda}")));
    }
    if tfr.values().iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidParameter("ridge extraction needs a nonnegative grid".into()));
    }
    let total: f64 = tfr.values().iter().sum();
    let scale = if total > 0.0 { 1.0 / total } else { 1.0 };
    let mut work = tfr.map(|v| v * scale);
    let rate = lambda / tfr.hop.max(1) as f64;
    let mut curves = Vec::with_capacity(count);
    for _ in 0..count {
        let bins = best_path(&work, rate);
        for (t, &b) in bins.iter().enumerate() {
            let lo = b.saturating_sub(MASK_HALF_WIDTH);
            let hi = (b + MASK_HALF_WIDTH).min(work.n_freqs() - 1);
            work.column_mut(t)[lo..=hi].iter_mut().for_each(|v| *v = 0.0);
        }
        curves.push(IfCurve {
            times: (0..bins.len()).map(|t| tfr.time(t)).collect(),
            frequencies: bins.iter().map(|&b| tfr.frequency(b)).collect(),
            bins,
            penalty: lambda,
        });
    }
    Ok(curves)
}

fn best_path(grid: &TfrGrid<f64>, rate: f64) -> Vec<usize> {
    let (n_t, n_f) = (grid.n_times(), grid.n_freqs());
    let gain = |t: usize| grid.column(t).iter().map(|v| (v + LOG_FLOOR).ln()).collect::<Vec<_>>();
    let mut score = gain(0);
    let mut back = vec![vec![0usize; n_f]; n_t];
    let mut best = vec![0.0; n_f];
    for (t, back_t) in back.iter_mut().enumerate().skip(1) {
        max_plus_parabola(&score, rate, &mut best, back_t);
        score = gain(t).iter().zip(&best).map(|(g, b)| g + b).collect();
    }
    let mut b = argmax_low(&score);
    let mut path = vec![0; n_t];
    for t in (0..n_t).rev() {
        path[t] = b;
        b = back[t][b];
    }
    path
}

fn argmax_low(x: &[f64]) -> usize {
    let mut arg = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[arg] {
            arg = i;
        }
    }
    arg
}

/// `out[j] = max_i (prev[i] − rate (i − j)²)` with its lowest maximizing `i`, via
/// the lower envelope of parabolas (linear time).
fn max_plus_parabola(prev: &[f64], rate: f64, out: &mut [f64], arg: &mut [usize]) {
    let n = prev.len();
    if rate == 0.0 {
        let i = argmax_low(prev);
        out.fill(prev[i]);
        arg.fill(i);
        return;
    }
    // minimize c(i) + rate (i − j)² with c = −prev
    let c = |i: usize| -prev[i];
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut k = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((c(q) + rate * (q * q) as f64) - (c(p) + rate * (p * p) as f64))
                / (2.0 * rate * (q as f64 - p as f64));
            // z[0] = −∞ stops the pop before k underflows
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for j in 0..n {
        while z[k + 1] < j as f64 {
            k += 1;
        }
        let i = v[k];
        arg[j] = i;
        out[j] = prev[i] - rate * (i as f64 - j as f64).powi(2);
    }
}

/// `‖estimate − truth‖₂ / ‖truth‖₂`.
pub fn error_ratio(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::GridMismatch(format!("lengths {} and {} differ", estimate.len(), truth.len())));
    }
    let norm: f64 = truth.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroTruth);
    }
    let diff: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(diff / norm)
}
