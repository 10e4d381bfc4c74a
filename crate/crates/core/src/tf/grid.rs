use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::Result;
use crate::signal::{fmt_float, write_atomic};

/// A time × frequency matrix on uniform axes, stored column by column (one
/// column of frequency bins per time step).
#[derive(Debug, Clone, PartialEq)]
pub struct TfrGrid<T> {
    values: Vec<T>,
    n_times: usize,
    n_freqs: usize,
    pub time_step: f64,
    pub freq_step: f64,
    pub freq_origin: f64,
    /// Signal samples between consecutive columns.
    pub hop: usize,
}

impl<T: Copy> TfrGrid<T> {
    pub fn from_columns(
        columns: Vec<Vec<T>>,
        n_freqs: usize,
        time_step: f64,
        freq_step: f64,
        freq_origin: f64,
        hop: usize,
    ) -> Self {
        let n_times = columns.len();
        let mut values = Vec::with_capacity(n_times * n_freqs);
        for c in columns {
            assert_eq!(c.len(), n_freqs, "ragged time-frequency columns");
            values.extend(c);
        }
        Self { values, n_times, n_freqs, time_step, freq_step, freq_origin, hop }
    }

    pub fn filled(like: &TfrGrid<impl Copy>, value: T) -> Self {
        Self {
            values: vec![value; like.n_times * like.n_freqs],
            n_times: like.n_times,
            n_freqs: like.n_freqs,
            time_step: like.time_step,
            freq_step: like.freq_step,
            freq_origin: like.freq_origin,
            hop: like.hop,
        }
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_freqs(&self) -> usize {
        self.n_freqs
    }

    pub fn get(&self, time: usize, bin: usize) -> T {
        self.values[time * self.n_freqs + bin]
    }

    pub fn set(&mut self, time: usize, bin: usize, value: T) {
        self.values[time * self.n_freqs + bin] = value;
    }

    pub fn column(&self, time: usize) -> &[T] {
        &self.values[time * self.n_freqs..(time + 1) * self.n_freqs]
    }

    pub fn column_mut(&mut self, time: usize) -> &mut [T] {
        &mut self.values[time * self.n_freqs..(time + 1) * self.n_freqs]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.time_step
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        self.freq_origin + bin as f64 * self.freq_step
    }

    /// Nearest bin to `freq`, if it lies on the axis.
    pub fn bin_of(&self, freq: f64) -> Option<usize> {
        let b = ((freq - self.freq_origin) / self.freq_step).round();
        (b >= 0.0 && (b as usize) < self.n_freqs).then_some(b as usize)
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> TfrGrid<U> {
        TfrGrid {
            values: self.values.iter().map(|&v| f(v)).collect(),
            n_times: self.n_times,
            n_freqs: self.n_freqs,
            time_step: self.time_step,
            freq_step: self.freq_step,
            freq_origin: self.freq_origin,
            hop: self.hop,
        }
    }

    /// Keeps the first `n_times` columns.
    pub fn truncate_times(&mut self, n_times: usize) {
        if n_times < self.n_times {
            self.values.truncate(n_times * self.n_freqs);
            self.n_times = n_times;
        }
    }
}

impl TfrGrid<Complex64> {
    pub fn magnitude(&self) -> TfrGrid<f64> {
        self.map(|z| z.norm())
    }
}

impl TfrGrid<f64> {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
    }

    /// Two comment lines of axis metadata, then one row per frequency bin with
    /// one column per time step.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ =
            writeln!(s, "# time: count={} step={} origin=0 hop={}", self.n_times, fmt_float(self.time_step), self.hop);
        let _ = writeln!(
            s,
            "# frequency: count={} step={} origin={}",
            self.n_freqs,
            fmt_float(self.freq_step),
            fmt_float(self.freq_origin)
        );
        for k in 0..self.n_freqs {
            let row: Vec<String> = (0..self.n_times).map(|t| fmt_float(self.get(t, k))).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }

    /// Plain (ASCII) 8-bit PGM: one row per frequency bin, highest frequency on top,
    /// linear scaling so the maximum maps to 255.
    pub fn to_pgm(&self) -> String {
        let max = self.max_value();
        let mut s = format!("P2\n{} {}\n255\n", self.n_times, self.n_freqs);
        for k in (0..self.n_freqs).rev() {
            let row: Vec<String> = (0..self.n_times)
                .map(|t| {
                    let v = self.get(t, k);
                    let level = if max > 0.0 && v.is_finite() { (255.0 * v / max).round() } else { 0.0 };
                    (level.clamp(0.0, 255.0) as u8).to_string()
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_pgm().as_bytes())
    }
}
