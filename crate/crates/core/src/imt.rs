//! Signals of intrinsic-mode type: `A(t) e^{iφ(t)}` on the circle with slowly
//! varying amplitude and phase rate relative to `φ′`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::wrap_to_pi;
use crate::signal::BoundarySignal;

/// Relative slack allowed when checking the accuracy inequalities on the grid.
const VALIDATION_SLACK: f64 = 1e-9;

/// An intrinsic-mode-type function sampled on `n` equispaced angles of `[0, 2π)`.
///
/// Derivatives are central differences with periodic wrap; the phase is allowed to
/// gain a multiple of `2π` over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct ImtSpec {
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    accuracy: f64,
    inf_phase_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImtDerivatives {
    pub amplitude_rate: Vec<f64>,
    pub phase_rate: Vec<f64>,
    pub phase_accel: Vec<f64>,
}

impl ImtSpec {
    /// Validates `|A′| ≤ ε φ′`, `|φ″| ≤ ε φ′`, `A > 0` and `φ′ > 0` on the grid.
    pub fn new(amplitude: Vec<f64>, phase: Vec<f64>, accuracy: f64) -> Result<Self> {
        let d = Self::check_shape(&amplitude, &phase)?;
        if !(accuracy >= 0.0 && accuracy.is_finite()) {
            return Err(Error::InvalidImt(format!("accuracy must be nonnegative, got {accuracy}")));
        }
        for j in 0..amplitude.len() {
            let bound = accuracy * d.phase_rate[j] * (1.0 + VALIDATION_SLACK) + 1e-12;
            if d.amplitude_rate[j].abs() > bound {
                return Err(Error::InvalidImt(format!(
                    "|A'| = {} exceeds eps * phi' = {} at sample {j}",
                    d.amplitude_rate[j].abs(),
                    accuracy * d.phase_rate[j]
                )));
            }
            if d.phase_accel[j].abs() > bound {
                return Err(Error::InvalidImt(format!(
                    "|phi''| = {} exceeds eps * phi' = {} at sample {j}",
                    d.phase_accel[j].abs(),
                    accuracy * d.phase_rate[j]
                )));
            }
        }
        let inf_phase_rate = d.phase_rate.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { amplitude, phase, accuracy, inf_phase_rate })
    }

    /// Uses the smallest accuracy the samples satisfy.
    pub fn with_minimal_accuracy(amplitude: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let d = Self::check_shape(&amplitude, &phase)?;
        let accuracy = d
            .amplitude_rate
            .iter()
            .zip(&d.phase_accel)
            .zip(&d.phase_rate)
            .map(|((a, p), r)| a.abs().max(p.abs()) / r)
            .fold(0.0, f64::max);
        Self::new(amplitude, phase, accuracy)
    }

    /// Samples `A(θ)` and `φ(θ)` on `n` angles.
    pub fn from_fns(n: usize, amplitude: impl Fn(f64) -> f64, phase: impl Fn(f64) -> f64) -> Result<Self> {
        let step = std::f64::consts::TAU / n as f64;
        let theta = (0..n).map(|j| j as f64 * step);
        Self::with_minimal_accuracy(theta.clone().map(&amplitude).collect(), theta.map(&phase).collect())
    }

    fn check_shape(amplitude: &[f64], phase: &[f64]) -> Result<ImtDerivatives> {
        if amplitude.len() != phase.len() {
            return Err(Error::InvalidImt("amplitude and phase lengths differ".into()));
        }
        if amplitude.len() < 4 {
            return Err(Error::InvalidImt("need at least 4 samples".into()));
        }
        if let Some(j) = amplitude.iter().position(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidImt(format!("amplitude not positive at sample {j}")));
        }
        let d = derivatives(amplitude, phase);
        if let Some(j) = d.phase_rate.iter().position(|&r| !(r > 0.0)) {
            return Err(Error::InvalidImt(format!("phase rate not positive at sample {j}")));
        }
        Ok(d)
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn inf_phase_rate(&self) -> f64 {
        self.inf_phase_rate
    }

    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    pub fn derivatives(&self) -> ImtDerivatives {
        derivatives(&self.amplitude, &self.phase)
    }

    pub fn signal(&self) -> BoundarySignal {
        let samples = self.amplitude.iter().zip(&self.phase).map(|(&a, &p)| Complex64::from_polar(a, p)).collect();
        BoundarySignal::from_parts_unchecked(samples, std::f64::consts::TAU)
    }

    /// Adds the carrier `e^{iNθ}`; the accuracy carries over since `φ′` only grows.
    pub fn with_carrier(&self, cycles: u32) -> Self {
        let n = self.len();
        let step = std::f64::consts::TAU / n as f64;
        let phase = self.phase.iter().enumerate().map(|(j, p)| p + cycles as f64 * j as f64 * step).collect();
        Self {
            amplitude: self.amplitude.clone(),
            phase,
            accuracy: self.accuracy,
            inf_phase_rate: self.inf_phase_rate + cycles as f64,
        }
    }
}

/// Central differences with periodic wrap. Phase increments are taken modulo 2π,
/// which assumes less than half a turn per sample.
pub(crate) fn derivatives(amplitude: &[f64], phase: &[f64]) -> ImtDerivatives {
    let n = amplitude.len();
    let h = std::f64::consts::TAU / n as f64;
    let inc: Vec<f64> = (0..n).map(|j| wrap_to_pi(phase[(j + 1) % n] - phase[j])).collect();
    let mut amplitude_rate = Vec::with_capacity(n);
    let mut phase_rate = Vec::with_capacity(n);
    let mut phase_accel = Vec::with_capacity(n);
    for j in 0..n {
        let prev = (j + n - 1) % n;
        let next = (j + 1) % n;
        amplitude_rate.push((amplitude[next] - amplitude[prev]) / (2.0 * h));
        phase_rate.push((inc[prev] + inc[j]) / (2.0 * h));
        phase_accel.push((inc[j] - inc[prev]) / (h * h));
    }
    ImtDerivatives { amplitude_rate, phase_rate, phase_accel }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_exponential_has_zero_accuracy() {
        let spec = ImtSpec::from_fns(256, |_| 1.0, |t| 5.0 * t).unwrap();
        assert!(spec.accuracy() < 1e-9);
        assert!((spec.inf_phase_rate() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn modulated_amplitude_accuracy() {
        let spec = ImtSpec::from_fns(1024, |t| 1.0 + 0.1 * t.sin(), |t| 40.0 * t).unwrap();
        // |A'| / φ' = 0.1 |cos t| / 40
        assert!((spec.accuracy() - 0.0025).abs() < 1e-5);
    }

    #[test]
    fn rejects_invalid_specs() {
        let n = 64;
        let step = std::f64::consts::TAU / n as f64;
        let phase: Vec<f64> = (0..n).map(|j| 3.0 * j as f64 * step).collect();
        assert!(ImtSpec::new(vec![1.0; n], phase.clone(), 0.0).is_ok());
        let mut amp = vec![1.0; n];
        amp[3] = 0.0;
        assert!(ImtSpec::new(amp, phase.clone(), 1.0).is_err());
        let backwards: Vec<f64> = phase.iter().map(|p| -p).collect();
        assert!(ImtSpec::new(vec![1.0; n], backwards, 1.0).is_err());
        let wobble: Vec<f64> = (0..n).map(|j| 1.0 + 0.5 * (j as f64 * step).sin()).collect();
        assert!(matches!(ImtSpec::new(wobble, phase, 0.01), Err(Error::InvalidImt(_))));
    }

    #[test]
    fn carrier_raises_phase_rate() {
        let spec = ImtSpec::from_fns(512, |t| 1.0 + 0.2 * t.cos(), |t| 3.0 * t + 0.5 * t.sin()).unwrap();
        let shifted = spec.with_carrier(20);
        let d = shifted.derivatives();
        let min_rate = d.phase_rate.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min_rate - shifted.inf_phase_rate()).abs() < 1e-9);
        assert!((shifted.inf_phase_rate() - spec.inf_phase_rate() - 20.0).abs() < 1e-9);
    }
}
