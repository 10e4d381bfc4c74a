//! End-to-end pipelines for the two-component experiments: unwinding with and
//! without a carrier, then IF estimation from each component's SST.

use crate::error::{Error, Result};
use crate::signal::BoundarySignal;
use crate::synth::{apply_noise, NoiseSpec, TwoComponent};
use crate::tf::{error_ratio, extract_if, sst, IfCurve, SstConfig};
use crate::unwind::{unwind, UnwindConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub unwind: UnwindConfig,
    pub sst: SstConfig,
    /// Ridge penalty `λ`.
    pub lambda: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            unwind: UnwindConfig::new(2).reflect(true),
            sst: SstConfig {
                freq_max: Some(8.0),
                window_sigma: 0.125,
                analysis_step: Some(0.0625),
                reflect: true,
                ..SstConfig::default()
            },
            lambda: 1.0,
        }
    }
}

/// Unwinding components of `f e^{i2πξ₀t}`, each demodulated by `e^{−i2πξ₀t}`.
/// `carrier_hz = 0` is the plain decomposition.
pub fn carrier_components(f: &BoundarySignal, carrier_hz: f64, cfg: &UnwindConfig) -> Result<Vec<BoundarySignal>> {
    Ok(unwind(f, cfg.carrier(carrier_hz))?.components())
}

/// Single ridge of the component's SST.
pub fn estimate_if(component: &BoundarySignal, cfg: &PipelineConfig) -> Result<IfCurve> {
    let grid = sst(component, &cfg.sst)?;
    Ok(extract_if(&grid, cfg.lambda, 1)?.remove(0))
}

/// Truth sampled at the columns of an IF curve.
pub fn truth_at_columns(truth: &[f64], hop: usize, columns: usize) -> Vec<f64> {
    (0..columns).map(|c| truth[(c * hop).min(truth.len() - 1)]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentScores {
    pub component_er: [f64; 2],
    pub if_er: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoComponentReport {
    pub plain: ComponentScores,
    pub carrier: ComponentScores,
}

/// Scores one realization. `observed` replaces `tc.f` as the decomposed input
/// (for noisy variants); errors are always measured against the clean components.
pub fn score_two_component(
    tc: &TwoComponent,
    observed: &BoundarySignal,
    carrier_hz: f64,
    cfg: &PipelineConfig,
) -> Result<TwoComponentReport> {
    let score = |hz: f64| -> Result<ComponentScores> {
        let comps = carrier_components(observed, hz, &cfg.unwind)?;
        if comps.len() < 2 {
            return Err(Error::InvalidParameter(format!("unwinding stopped after {} components", comps.len())));
        }
        let truths = [(&tc.f1, &tc.if1), (&tc.f2, &tc.if2)];
        let mut component_er = [0.0; 2];
        let mut if_er = [0.0; 2];
        for (i, (sig, rate)) in truths.iter().enumerate() {
            component_er[i] = comps[i].relative_error(sig)?;
            let curve = estimate_if(&comps[i], cfg)?;
            let truth = truth_at_columns(rate, cfg.sst.hop, curve.len());
            if_er[i] = error_ratio(&curve.frequencies, &truth)?;
        }
        Ok(ComponentScores { component_er, if_er })
    };
    Ok(TwoComponentReport { plain: score(0.0)?, carrier: score(carrier_hz)? })
}

pub fn score_noisy_two_component(
    tc: &TwoComponent,
    noise: &NoiseSpec,
    carrier_hz: f64,
    cfg: &PipelineConfig,
) -> Result<TwoComponentReport> {
    score_two_component(tc, &apply_noise(&tc.f, noise), carrier_hz, cfg)
}
