//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: tracing the posterior through one trial,
//! computing a precision scaling curve, and sampling a Ramsey fringe.

use qpe_core::dynamics::{ramsey_fringe as fringe, DecayTime, SpinEnvironment};
use qpe_core::engine::{run_ensemble, run_trial_observed, TrialConfig};
use qpe_core::posterior::{Contrast, DensitySampler};
use wasm_bindgen::prelude::*;

const MAX_EXPONENT: u32 = 10;
const MAX_TRIALS: u32 = 5000;
const MAX_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    pub adaptive: bool,
    pub max_exponent: u32,
    /// `M` for the adaptive scheme, `M_K` for the nonadaptive one.
    pub clicks: u32,
    pub growth: u32,
    pub f_a: f64,
    pub f_i: f64,
    /// Zero or infinite for no dephasing.
    pub t2_over_tau: f64,
}

impl Protocol {
    fn config(&self, trials: u32, seed: u32) -> Result<TrialConfig, String> {
        if self.max_exponent > MAX_EXPONENT {
            return Err(format!("K is limited to {MAX_EXPONENT} in the browser"));
        }
        if self.clicks == 0 {
            return Err("need at least one click per stage".into());
        }
        let contrast = Contrast::new(self.f_a, self.f_i).map_err(|e| e.to_string())?;
        let mut config = if self.adaptive {
            TrialConfig::adaptive(self.max_exponent, self.clicks as u64)
        } else {
            TrialConfig::nonadaptive(self.max_exponent, self.clicks as u64, self.growth as u64)
        }
        .with_contrast(contrast)
        .with_trials(trials as u64)
        .with_seed(seed as u64);
        if self.t2_over_tau > 0.0 && self.t2_over_tau.is_finite() {
            config = config.with_t2_over_tau(self.t2_over_tau);
        }
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

/// Posterior densities after every click of one trial.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct TrialTrace {
    points: usize,
    densities: Vec<f64>,
    estimates: Vec<f64>,
    sharpness: Vec<f64>,
    phi_true: f64,
}

#[wasm_bindgen]
impl TrialTrace {
    pub fn steps(&self) -> usize {
        self.estimates.len()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Density on `points` equispaced phases after click `step` (1-based;
    /// 0 is the flat prior).
    pub fn density(&self, step: usize) -> Vec<f64> {
        if step == 0 {
            return vec![1.0 / std::f64::consts::TAU; self.points];
        }
        let i = step.min(self.steps()) - 1;
        self.densities[i * self.points..(i + 1) * self.points].to_vec()
    }

    pub fn estimate(&self, step: usize) -> f64 {
        if step == 0 {
            f64::NAN
        } else {
            self.estimates[step.min(self.steps()) - 1]
        }
    }

    pub fn sharpness(&self, step: usize) -> f64 {
        if step == 0 {
            0.0
        } else {
            self.sharpness[step.min(self.steps()) - 1]
        }
    }

    pub fn phi_true(&self) -> f64 {
        self.phi_true
    }
}

pub fn trace(protocol: &Protocol, seed: u32, trial: u32, points: usize) -> Result<TrialTrace, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    let config = protocol.config(1, seed)?;
    let mut sampler = DensitySampler::new(points);
    let mut densities = Vec::new();
    let mut estimates = Vec::new();
    let mut sharpness = Vec::new();
    let result = run_trial_observed(&config, trial as u64, &mut |post| {
        densities.extend_from_slice(sampler.samples(post));
        estimates.push(post.phase_estimate().unwrap_or(f64::NAN));
        sharpness.push(post.sharpness());
    })
    .map_err(|e| e.to_string())?;
    Ok(TrialTrace {
        points,
        densities,
        estimates,
        sharpness,
        phi_true: result.phi_true,
    })
}

/// Rows of `[K, T̃, V_H, V_H·T̃, stderr(V_H)]` for `K = 1..=max_exponent`,
/// flattened.
pub fn scaling(protocol: &Protocol, trials: u32, seed: u32) -> Result<Vec<f64>, String> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must lie in 1..={MAX_TRIALS}"));
    }
    let mut out = Vec::new();
    for k in 1..=protocol.max_exponent {
        let config = Protocol {
            max_exponent: k,
            ..*protocol
        }
        .config(trials, seed)?;
        let agg = run_ensemble(&config).map_err(|e| e.to_string())?;
        out.extend([k as f64, agg.resource_time as f64, agg.v_h, agg.product, agg.stderr_v_h]);
    }
    Ok(out)
}

/// Flattened `[t, P(+1)]` pairs for a spin with `λ_g = 1`.
pub fn fringe_samples(field: f64, t1: f64, t2: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if samples > 100_000 {
        return Err("too many samples".into());
    }
    let decay = |t: f64| {
        if t.is_finite() {
            DecayTime::finite(t)
        } else {
            Ok(DecayTime::Infinite)
        }
    };
    let env = SpinEnvironment::new(
        1.0,
        field,
        decay(t1).map_err(|e| e.to_string())?,
        decay(t2).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let pts = fringe(&env, t_max, samples).map_err(|e| e.to_string())?;
    Ok(pts.into_iter().flat_map(|(t, p)| [t, p]).collect())
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn trace_trial(
    adaptive: bool,
    max_exponent: u32,
    clicks: u32,
    growth: u32,
    f_a: f64,
    f_i: f64,
    t2_over_tau: f64,
    seed: u32,
    trial: u32,
    points: usize,
) -> Result<TrialTrace, JsError> {
    let protocol = Protocol {
        adaptive,
        max_exponent,
        clicks,
        growth,
        f_a,
        f_i,
        t2_over_tau,
    };
    trace(&protocol, seed, trial, points).map_err(|e| JsError::new(&e))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn scaling_curve(
    adaptive: bool,
    max_exponent: u32,
    clicks: u32,
    growth: u32,
    f_a: f64,
    f_i: f64,
    t2_over_tau: f64,
    trials: u32,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    let protocol = Protocol {
        adaptive,
        max_exponent,
        clicks,
        growth,
        f_a,
        f_i,
        t2_over_tau,
    };
    scaling(&protocol, trials, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ramsey_fringe(field: f64, t1: f64, t2: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    fringe_samples(field, t1, t2, t_max, samples).map_err(|e| JsError::new(&e))
}
