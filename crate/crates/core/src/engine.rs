//! Trial simulation, ensemble reduction and parameter sweeps.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::control::{adaptive_control_phase, nonadaptive_control_phase, ControlSchedule, Policy, StageOrder};
use crate::error::{QpeError, Result};
use crate::posterior::{ClickRecord, Contrast, FourierPosterior};
use crate::rng::{bootstrap_stream, trial_stream};

/// Largest `K` accepted without the high-memory opt-in. At this depth a
/// posterior holds about 10⁵ coefficients.
pub const DEFAULT_MAX_EXPONENT_CAP: u32 = 14;
/// Largest `K` accepted with the high-memory opt-in (about 1.5·10⁸ bytes
/// per in-flight trial at `K = 20`, `M = 6`).
pub const HIGH_MEMORY_MAX_EXPONENT_CAP: u32 = 24;

const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// `M` clicks per exponent with one-step look-ahead control phases.
    Adaptive { clicks_per_stage: u64 },
    /// `M_K + F(K − k)` clicks at exponent `k`, quarter-turn control phases.
    Nonadaptive {
        top_clicks: u64,
        growth: u64,
        order: StageOrder,
    },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Adaptive { .. } => "adaptive",
            Scheme::Nonadaptive { .. } => "nonadaptive",
        }
    }
}

/// Everything needed to run an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub scheme: Scheme,
    /// `K`, the largest multi-pass exponent.
    pub max_exponent: u32,
    /// `τ/T2`; zero means no dephasing.
    pub tau_over_t2: f64,
    pub contrast: Contrast,
    /// Ensemble size `S`.
    pub trials: u64,
    pub master_seed: u64,
    /// Control phase of the first click.
    pub initial_phase: f64,
}

impl TrialConfig {
    pub fn adaptive(max_exponent: u32, clicks_per_stage: u64) -> Self {
        TrialConfig {
            scheme: Scheme::Adaptive { clicks_per_stage },
            max_exponent,
            tau_over_t2: 0.0,
            contrast: Contrast::IDEAL,
            trials: 1000,
            master_seed: 0,
            initial_phase: 0.0,
        }
    }

    pub fn nonadaptive(max_exponent: u32, top_clicks: u64, growth: u64) -> Self {
        TrialConfig {
            scheme: Scheme::Nonadaptive {
                top_clicks,
                growth,
                order: StageOrder::Descending,
            },
            ..TrialConfig::adaptive(max_exponent, 1)
        }
    }

    pub fn with_t2_over_tau(mut self, t2_over_tau: f64) -> Self {
        self.tau_over_t2 = 1.0 / t2_over_tau;
        self
    }

    pub fn with_contrast(mut self, contrast: Contrast) -> Self {
        self.contrast = contrast;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_over_t2 >= 0.0) || !self.tau_over_t2.is_finite() {
            return Err(QpeError::arg(format!("tau/T2 must be finite and >= 0, got {}", self.tau_over_t2)));
        }
        if self.trials == 0 {
            return Err(QpeError::arg("ensemble needs at least one trial"));
        }
        if self.max_exponent > HIGH_MEMORY_MAX_EXPONENT_CAP {
            return Err(QpeError::arg(format!(
                "K = {} exceeds the supported maximum {HIGH_MEMORY_MAX_EXPONENT_CAP}",
                self.max_exponent
            )));
        }
        if !self.initial_phase.is_finite() {
            return Err(QpeError::arg("initial phase must be finite"));
        }
        Contrast::new(self.contrast.f_a(), self.contrast.f_i())?;
        self.schedule().map(|_| ())
    }

    pub fn schedule(&self) -> Result<ControlSchedule> {
        match &self.scheme {
            Scheme::Adaptive { clicks_per_stage } => {
                ControlSchedule::adaptive(self.max_exponent, *clicks_per_stage, self.initial_phase)
            }
            Scheme::Nonadaptive {
                top_clicks,
                growth,
                order,
            } => ControlSchedule::nonadaptive(self.max_exponent, *top_clicks, *growth, order, self.initial_phase),
        }
    }

    /// Dephasing visibility `V(τ_k) = e^{−2^k τ/T2}`.
    pub fn visibility(&self, k: u32) -> f64 {
        (-((1u64 << k) as f64) * self.tau_over_t2).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub phi_true: f64,
    /// Estimate in `[0, 2π)`; 0 when `valid` is false.
    pub phi_hat: f64,
    /// `|2π b_{−1}|` of the final posterior.
    pub sharpness: f64,
    pub clicks: u64,
    pub resource_time: u64,
    /// False when the final posterior had `b_{−1} = 0`.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateResult {
    /// Holevo variance from the mean posterior sharpness.
    pub v_h: f64,
    /// Holevo variance from the actual estimate errors.
    pub v_h_err: f64,
    pub resource_time: u64,
    /// `V_H · T̃`.
    pub product: f64,
    pub stderr_v_h: f64,
    pub stderr_v_h_err: f64,
    pub mean_sharpness: f64,
    pub trials: u64,
    pub invalid_trials: u64,
}

/// Draws one click: +1 with probability
/// `(f_a + f_i)/2 + (f_a − f_i)/2 · V cos(2^k φ − Φ)`. Consumes exactly one
/// uniform.
pub fn sample_click<R: Rng + ?Sized>(
    rng: &mut R,
    phi_true: f64,
    k: u32,
    phi_ctrl: f64,
    visibility: f64,
    contrast: &Contrast,
) -> Result<i8> {
    let y = visibility * ((1u64 << k) as f64 * phi_true - phi_ctrl).cos();
    let p = contrast.plus_probability(y);
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(QpeError::Internal(format!("click probability {p} outside [0, 1]")));
    }
    let draw: f64 = rng.gen();
    Ok(if draw < p { 1 } else { -1 })
}

pub fn run_trial(config: &TrialConfig, trial_index: u64) -> Result<TrialResult> {
    run_trial_observed(config, trial_index, &mut |_| {})
}

/// Runs one trial, calling `observer` after every posterior update.
pub fn run_trial_observed(
    config: &TrialConfig,
    trial_index: u64,
    observer: &mut dyn FnMut(&FourierPosterior),
) -> Result<TrialResult> {
    let schedule = config.schedule()?;
    let mut rng = trial_stream(config.master_seed, trial_index);
    let phi_true = rng.gen::<f64>() * TAU;
    let mut post = FourierPosterior::flat();
    let mut phase = schedule.initial_phase();
    let mut first = true;

    for stage in schedule.stages() {
        let visibility = config.visibility(stage.k);
        for _ in 0..stage.clicks {
            if !first {
                phase = match schedule.policy() {
                    Policy::Adaptive => adaptive_control_phase(&post, stage.k, visibility, &config.contrast),
                    Policy::Nonadaptive => nonadaptive_control_phase(phase),
                };
            }
            first = false;
            let u = sample_click(&mut rng, phi_true, stage.k, phase, visibility, &config.contrast)?;
            post.bayes_update(&ClickRecord {
                u,
                k: stage.k,
                control_phase: phase,
                visibility,
                contrast: config.contrast,
            })?;
            observer(&post);
        }
    }

    let (phi_hat, valid) = match post.phase_estimate() {
        Ok(phi) => (phi, true),
        Err(QpeError::NoInformation) => (0.0, false),
        Err(e) => return Err(e),
    };
    Ok(TrialResult {
        phi_true,
        phi_hat,
        sharpness: if valid { post.sharpness() } else { 0.0 },
        clicks: schedule.total_clicks(),
        resource_time: schedule.resource_time(),
        valid,
    })
}

fn holevo(mean_sharpness: f64) -> f64 {
    if mean_sharpness > 0.0 {
        mean_sharpness.powi(-2) - 1.0
    } else {
        f64::INFINITY
    }
}

fn error_phasor(r: &TrialResult) -> Complex64 {
    if r.valid {
        Complex64::from_polar(1.0, r.phi_hat - r.phi_true)
    } else {
        Complex64::default()
    }
}

/// Reduces trials to Holevo variances with bootstrap standard errors.
///
/// `V_H = (mean |2π b_{−1}|)^{−2} − 1`; the cross-check
/// `V_H_err = |mean e^{i(φ̂ − φ)}|^{−2} − 1` uses the realised errors.
/// Resampling uses a fixed stream so the reduction is deterministic.
pub fn holevo_variance(results: &[TrialResult]) -> Result<AggregateResult> {
    holevo_variance_seeded(results, 0)
}

pub fn holevo_variance_seeded(results: &[TrialResult], seed: u64) -> Result<AggregateResult> {
    if results.is_empty() {
        return Err(QpeError::arg("no trial results to aggregate"));
    }
    let n = results.len();
    let mean_sharpness = results.iter().map(|r| r.sharpness).sum::<f64>() / n as f64;
    let mean_phasor = results.iter().map(error_phasor).sum::<Complex64>() / n as f64;
    let v_h = holevo(mean_sharpness);
    let v_h_err = holevo(mean_phasor.norm());

    let mut rng = bootstrap_stream(seed);
    let mut boot_h = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut boot_err = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut s = 0.0;
        let mut z = Complex64::default();
        for _ in 0..n {
            let r = &results[rng.gen_range(0..n)];
            s += r.sharpness;
            z += error_phasor(r);
        }
        boot_h.push(holevo(s / n as f64));
        boot_err.push(holevo(z.norm() / n as f64));
    }

    let resource_time = results[0].resource_time;
    Ok(AggregateResult {
        v_h,
        v_h_err,
        resource_time,
        product: v_h * resource_time as f64,
        stderr_v_h: std_dev(&boot_h),
        stderr_v_h_err: std_dev(&boot_err),
        mean_sharpness,
        trials: n as u64,
        invalid_trials: results.iter().filter(|r| !r.valid).count() as u64,
    })
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if !mean.is_finite() {
        return f64::INFINITY;
    }
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn run_ensemble(config: &TrialConfig) -> Result<AggregateResult> {
    run_ensemble_observed(config, &|_| {})
}

/// Runs `S` trials on the ambient rayon pool (or sequentially without the
/// `parallel` feature). Trials are collected in index order, so the output is
/// identical for any worker count.
pub fn run_ensemble_observed(
    config: &TrialConfig,
    observer: &(dyn Fn(&FourierPosterior) + Sync),
) -> Result<AggregateResult> {
    let results = run_trials(config, observer)?;
    holevo_variance_seeded(&results, config.master_seed)
}

/// Individual trial results in index order.
pub fn run_trials(
    config: &TrialConfig,
    observer: &(dyn Fn(&FourierPosterior) + Sync),
) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let one = |i: u64| run_trial_observed(config, i, &mut |p| observer(p));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..config.trials).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..config.trials).map(one).collect()
    }
}

/// Number of detections per level for either scheme, used as a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detections {
    Adaptive { clicks_per_stage: u64 },
    Nonadaptive { top_clicks: u64, growth: u64 },
}

/// Sweep axes; an empty axis keeps the base value. Cells are ordered with
/// contrast outermost, then detections, then `K`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub contrasts: Vec<Contrast>,
    pub detections: Vec<Detections>,
    pub max_exponents: Vec<u32>,
}

impl SweepAxes {
    pub fn is_empty(&self) -> bool {
        self.contrasts.is_empty() && self.detections.is_empty() && self.max_exponents.is_empty()
    }

    pub fn cells(&self, base: &TrialConfig) -> Vec<TrialConfig> {
        let contrasts = if self.contrasts.is_empty() {
            vec![base.contrast]
        } else {
            self.contrasts.clone()
        };
        let detections: Vec<Option<Detections>> = if self.detections.is_empty() {
            vec![None]
        } else {
            self.detections.iter().copied().map(Some).collect()
        };
        let ks = if self.max_exponents.is_empty() {
            vec![base.max_exponent]
        } else {
            self.max_exponents.clone()
        };
        let mut cells = Vec::with_capacity(contrasts.len() * detections.len() * ks.len());
        for contrast in &contrasts {
            for det in &detections {
                for &k in &ks {
                    let mut cell = base.clone();
                    cell.contrast = *contrast;
                    cell.max_exponent = k;
                    if let Some(d) = det {
                        cell.scheme = match (d, &base.scheme) {
                            (Detections::Adaptive { clicks_per_stage }, _) => Scheme::Adaptive {
                                clicks_per_stage: *clicks_per_stage,
                            },
                            (Detections::Nonadaptive { top_clicks, growth }, Scheme::Nonadaptive { order, .. }) => {
                                Scheme::Nonadaptive {
                                    top_clicks: *top_clicks,
                                    growth: *growth,
                                    order: order.clone(),
                                }
                            }
                            (Detections::Nonadaptive { top_clicks, growth }, Scheme::Adaptive { .. }) => {
                                Scheme::Nonadaptive {
                                    top_clicks: *top_clicks,
                                    growth: *growth,
                                    order: StageOrder::Descending,
                                }
                            }
                        };
                    }
                    cells.push(cell);
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub config: TrialConfig,
    /// Failure message when the cell could not be run.
    pub outcome: std::result::Result<AggregateResult, String>,
}

/// One ensemble per sweep cell; a failing cell is recorded and the sweep goes
/// on.
pub fn sweep(base: &TrialConfig, axes: &SweepAxes) -> Vec<SweepRow> {
    sweep_observed(base, axes, &|_| {})
}

pub fn sweep_observed(
    base: &TrialConfig,
    axes: &SweepAxes,
    observer: &(dyn Fn(&FourierPosterior) + Sync),
) -> Vec<SweepRow> {
    axes.cells(base)
        .into_iter()
        .map(|config| {
            let outcome = run_ensemble_observed(&config, observer).map_err(|e| e.to_string());
            SweepRow { config, outcome }
        })
        .collect()
}

/// `B̂_z = φ̂ / (2 λ_g τ)`. Phases in `[0, 2π)` map onto the unambiguous field
/// window `[0, π/(λ_g τ))`.
pub fn field_from_phase(phi_hat: f64, tau: f64, gyromagnetic_ratio: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(QpeError::arg(format!("tau must be > 0, got {tau}")));
    }
    if gyromagnetic_ratio == 0.0 || !gyromagnetic_ratio.is_finite() {
        return Err(QpeError::arg("gyromagnetic ratio must be finite and nonzero"));
    }
    Ok(phi_hat / (2.0 * gyromagnetic_ratio * tau))
}

/// System phase `2 λ_g B_z τ` reduced into `[0, 2π)`.
pub fn phase_from_field(field: f64, tau: f64, gyromagnetic_ratio: f64) -> f64 {
    crate::posterior::wrap_phase(2.0 * gyromagnetic_ratio * field * tau)
}

/// Least-squares line through `ln(V_H T̃)` against `ln T̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// −1 for Heisenberg-like scaling, 0 for shot-noise scaling.
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits `(T̃, V_H)` pairs; rows with nonfinite or nonpositive `V_H` are
/// skipped.
pub fn scaling_fit(rows: &[(f64, f64)]) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(t, v)| t.is_finite() && *t > 0.0 && v.is_finite() && *v > 0.0)
        .map(|(t, v)| (t.ln(), (v * t).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(QpeError::arg(format!(
            "scaling fit needs at least 3 finite rows, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(QpeError::arg("scaling fit needs at least two distinct T values"));
    }
    let slope = sxy / sxx;
    Ok(ScalingFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
    })
}

/// Keeps the points with `T̃ < T2/τ`, where scaling below shot noise is
/// possible. With no dephasing every point is kept.
pub fn coherent_points(points: &[(f64, f64)], tau_over_t2: f64) -> Vec<(f64, f64)> {
    points
        .iter()
        .copied()
        .filter(|(t, _)| tau_over_t2 == 0.0 || *t < 1.0 / tau_over_t2)
        .collect()
}

/// `(T̃, V_H)` pairs from successful sweep rows.
pub fn scaling_points(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .map(|a| (a.resource_time as f64, a.v_h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn result(sharpness: f64, err: f64) -> TrialResult {
        TrialResult {
            phi_true: 1.0,
            phi_hat: 1.0 + err,
            sharpness,
            clicks: 1,
            resource_time: 10,
            valid: true,
        }
    }

    #[test]
    fn deterministic_click_at_full_contrast() {
        let mut rng = trial_stream(1, 0);
        for _ in 0..100 {
            assert_eq!(sample_click(&mut rng, 0.4, 2, 1.6, 1.0, &Contrast::IDEAL).unwrap(), 1);
        }
    }

    #[test]
    fn zero_information_click_frequency() {
        let c = Contrast::new(0.3, 0.3).unwrap();
        let mut rng = trial_stream(2, 0);
        let n = 200_000;
        let plus = (0..n)
            .filter(|i| sample_click(&mut rng, *i as f64 * 0.01, 1, 0.0, 1.0, &c).unwrap() == 1)
            .count();
        // 5σ binomial band
        let sigma = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((plus as f64 / n as f64 - 0.3).abs() < 5.0 * sigma);
    }

    #[test]
    fn single_ideal_click_trial() {
        let cfg = TrialConfig::adaptive(0, 1).with_seed(11);
        let r = run_trial(&cfg, 0).unwrap();
        assert_eq!(r.sharpness, 0.5);
        assert_eq!(r.clicks, 1);
        assert_eq!(r.resource_time, 1);
        assert!(r.valid);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = TrialConfig::adaptive(3, 6).with_seed(5);
        assert_eq!(run_trial(&cfg, 4).unwrap(), run_trial(&cfg, 4).unwrap());
        assert_ne!(run_trial(&cfg, 4).unwrap(), run_trial(&cfg, 5).unwrap());
    }

    #[test]
    fn holevo_spot_values() {
        let a = holevo_variance(&[result(1.0, 0.0); 5]).unwrap();
        assert_eq!(a.v_h, 0.0);
        assert_eq!(a.v_h_err, 0.0);
        let a = holevo_variance(&[result(0.5, 0.0); 5]).unwrap();
        assert_eq!(a.v_h, 3.0);
        assert_eq!(a.product, 30.0);
        let mut zero = result(0.0, 0.0);
        zero.valid = false;
        let a = holevo_variance(&[zero; 3]).unwrap();
        assert_eq!(a.v_h, f64::INFINITY);
        assert_eq!(a.invalid_trials, 3);
        assert!(holevo_variance(&[]).is_err());
    }

    #[test]
    fn error_estimator_uses_circular_mean() {
        let rs = [result(1.0, 0.5), result(1.0, -0.5)];
        let a = holevo_variance(&rs).unwrap();
        assert_abs_diff_eq!(a.v_h_err, 0.5f64.cos().powi(-2) - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_trial_ensemble_matches_trial() {
        let cfg = TrialConfig::adaptive(2, 3).with_trials(1).with_seed(9);
        let agg = run_ensemble(&cfg).unwrap();
        let r = run_trial(&cfg, 0).unwrap();
        assert_eq!(agg.mean_sharpness, r.sharpness);
        assert_eq!(agg.v_h, r.sharpness.powi(-2) - 1.0);
        assert_eq!(agg.resource_time, r.resource_time);
    }

    #[test]
    fn sweep_cells_order_and_single_cell() {
        let base = TrialConfig::nonadaptive(2, 6, 2).with_trials(20).with_seed(3);
        let axes = SweepAxes {
            contrasts: vec![Contrast::from_visibility(0.9).unwrap(), Contrast::IDEAL],
            detections: vec![],
            max_exponents: vec![1, 2, 3],
        };
        let cells = axes.cells(&base);
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0].max_exponent, 1);
        assert_eq!(cells[3].contrast, Contrast::IDEAL);
        let rows = sweep(&base, &SweepAxes::default());
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].outcome.clone().unwrap(), run_ensemble(&base).unwrap());
    }

    #[test]
    fn field_conversion() {
        assert_eq!(field_from_phase(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(field_from_phase(PI, 1.0, 1.0).unwrap(), PI / 2.0);
        assert!(field_from_phase(1.0, 0.0, 1.0).is_err());
        assert!(field_from_phase(1.0, 1.0, 0.0).is_err());
        let b = 0.7;
        let phi = phase_from_field(b, 0.5, 1.3);
        assert_abs_diff_eq!(field_from_phase(phi, 0.5, 1.3).unwrap(), b, epsilon = 1e-14);
    }

    #[test]
    fn scaling_fit_exact_power_laws() {
        let heis: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 5000.0].iter().map(|t| (*t, 3.0 / (t * t))).collect();
        assert_abs_diff_eq!(scaling_fit(&heis).unwrap().slope, -1.0, epsilon = 1e-12);
        let shot: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|t| (*t, 2.0 / t)).collect();
        assert_abs_diff_eq!(scaling_fit(&shot).unwrap().slope, 0.0, epsilon = 1e-12);
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, f64::INFINITY), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn coherent_points_cut() {
        let pts = [(90.0, 1.0), (999.0, 1.0), (1000.0, 1.0), (1530.0, 1.0)];
        assert_eq!(coherent_points(&pts, 1e-3).len(), 2);
        assert_eq!(coherent_points(&pts, 0.0).len(), 4);
    }

    #[test]
    fn config_validation() {
        assert!(TrialConfig::adaptive(3, 6).with_trials(0).validate().is_err());
        let mut c = TrialConfig::adaptive(3, 6);
        c.tau_over_t2 = -1.0;
        assert!(c.validate().is_err());
        assert!(TrialConfig::adaptive(30, 6).validate().is_err());
        assert_eq!(TrialConfig::adaptive(3, 6).with_t2_over_tau(1e3).visibility(3), (-0.008f64).exp());
    }
}
