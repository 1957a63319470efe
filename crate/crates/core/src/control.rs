//! Control-phase policies, detection schedules and resource accounting.
//!
//! The adaptive rule picks, before every click, the control phase that
//! maximizes the expected posterior sharpness after that click (a one-step
//! look-ahead). The nonadaptive rule advances the phase by a quarter turn per
//! click and compensates with more detections at the short accrual times.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QpeError, Result};
use crate::posterior::{wrap_phase, Contrast, FourierPosterior};

/// Order in which the exponents of a nonadaptive schedule are visited.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum StageOrder {
    /// `K, K−1, …, 0`.
    #[default]
    Descending,
    /// Any permutation of `0..=K`.
    Explicit(Vec<u32>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    Adaptive,
    /// Quarter-turn increments `Φ_m = Φ_{m−1} + π/2`.
    Nonadaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stage {
    pub k: u32,
    pub clicks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    stages: Vec<Stage>,
    policy: Policy,
    max_exponent: u32,
    initial_phase: f64,
}

impl ControlSchedule {
    /// `M` clicks at each of `k = K, K−1, …, 0`.
    pub fn adaptive(max_exponent: u32, clicks_per_stage: u64, initial_phase: f64) -> Result<Self> {
        if clicks_per_stage == 0 {
            return Err(QpeError::arg("adaptive schedule needs M >= 1"));
        }
        check_exponent(max_exponent)?;
        let stages = (0..=max_exponent)
            .rev()
            .map(|k| Stage {
                k,
                clicks: clicks_per_stage,
            })
            .collect();
        Ok(ControlSchedule {
            stages,
            policy: Policy::Adaptive,
            max_exponent,
            initial_phase,
        })
    }

    /// `M_K + F(K − k)` clicks at exponent `k`, visited in `order`.
    pub fn nonadaptive(
        max_exponent: u32,
        top_clicks: u64,
        growth: u64,
        order: &StageOrder,
        initial_phase: f64,
    ) -> Result<Self> {
        if top_clicks == 0 {
            return Err(QpeError::arg("nonadaptive schedule needs M_K >= 1"));
        }
        check_exponent(max_exponent)?;
        let ks: Vec<u32> = match order {
            StageOrder::Descending => (0..=max_exponent).rev().collect(),
            StageOrder::Explicit(list) => {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                if sorted != (0..=max_exponent).collect::<Vec<_>>() {
                    return Err(QpeError::arg(format!(
                        "stage order {list:?} is not a permutation of 0..={max_exponent}"
                    )));
                }
                list.clone()
            }
        };
        let stages = ks
            .into_iter()
            .map(|k| {
                detections_at_level(max_exponent, k, top_clicks, growth).map(|clicks| Stage { k, clicks })
            })
            .collect::<Result<_>>()?;
        Ok(ControlSchedule {
            stages,
            policy: Policy::Nonadaptive,
            max_exponent,
            initial_phase,
        })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn max_exponent(&self) -> u32 {
        self.max_exponent
    }

    pub fn initial_phase(&self) -> f64 {
        self.initial_phase
    }

    pub fn total_clicks(&self) -> u64 {
        self.stages.iter().map(|s| s.clicks).sum()
    }

    /// Dimensionless resource time `T̃ = Σ clicks · 2^k`.
    pub fn resource_time(&self) -> u64 {
        self.stages.iter().map(|s| s.clicks << s.k).sum()
    }
}

fn check_exponent(k: u32) -> Result<()> {
    if k > 40 {
        return Err(QpeError::arg(format!("max exponent K = {k} is out of range")));
    }
    Ok(())
}

/// `M(K, k) = M_K + F(K − k)`.
pub fn detections_at_level(max_exponent: u32, k: u32, top_clicks: u64, growth: u64) -> Result<u64> {
    if k > max_exponent {
        return Err(QpeError::arg(format!("exponent k = {k} exceeds K = {max_exponent}")));
    }
    if top_clicks == 0 {
        return Err(QpeError::arg("M_K must be >= 1"));
    }
    Ok(top_clicks + growth * u64::from(max_exponent - k))
}

/// `M(2^{K+1} − 1)`.
pub fn adaptive_resource_time(clicks_per_stage: u64, max_exponent: u32) -> u64 {
    clicks_per_stage * ((2u64 << max_exponent) - 1)
}

/// `M_K(2^{K+1} − 1) + F(2^{K+1} − 2 − K)`.
pub fn nonadaptive_resource_time(top_clicks: u64, growth: u64, max_exponent: u32) -> u64 {
    let pow = 2u64 << max_exponent;
    top_clicks * (pow - 1) + growth * (pow - 2 - u64::from(max_exponent))
}

/// Next quarter-turn control phase, reduced into `[0, 2π)`.
///
/// Phases that sit on the quarter-turn lattice stay on it exactly, so four
/// applications return the starting value bit for bit.
pub fn nonadaptive_control_phase(prev_phase: f64) -> f64 {
    let quarters = prev_phase / FRAC_PI_2;
    let nearest = quarters.round();
    if (quarters - nearest).abs() < 1e-9 {
        let q = (nearest as i64 + 1).rem_euclid(4);
        return q as f64 * FRAC_PI_2;
    }
    wrap_phase(prev_phase + FRAC_PI_2)
}

/// `(a, b, c) = (b_{−g}, V b_{−g−2^k}, V b_{−g+2^k})`.
fn harmonic_terms(post: &FourierPosterior, g: u64, k: u32, visibility: f64) -> [Complex64; 3] {
    let g = g as i64;
    let d = 1i64 << k;
    [
        post.coeff(-g),
        post.coeff(-g - d) * visibility,
        post.coeff(-g + d) * visibility,
    ]
}

/// `½ Σ_u |c_u a + (u/2) f_d (b e^{−iΦ} + c e^{iΦ})|`.
fn functional_value(terms: &[Complex64; 3], contrast: &Contrast, phi_ctrl: f64) -> f64 {
    let [a, b, c] = *terms;
    let w = (b * Complex64::from_polar(1.0, -phi_ctrl) + c * Complex64::from_polar(1.0, phi_ctrl))
        * (0.5 * contrast.visibility());
    let plus = a * contrast.baseline(1) + w;
    let minus = a * contrast.baseline(-1) - w;
    0.5 * (plus.norm() + minus.norm())
}

/// Expected sharpness after one more click,
/// `M(Φ) = (1/2π) Σ_u |∫ e^{iφ} P(u|φ, Φ) P(φ) dφ|`.
pub fn sharpness_functional(
    post: &FourierPosterior,
    k: u32,
    phi_ctrl: f64,
    visibility: f64,
    contrast: &Contrast,
) -> f64 {
    functional_value(&harmonic_terms(post, 1, k, visibility), contrast, phi_ctrl)
}

/// Harmonic the adaptive rule targets for a click at exponent `k`.
///
/// This is 1 whenever `b_{−1}` or one of its `±2^k` neighbours is nonzero.
/// Before any `k = 0` click those all vanish and the functional is flat, so
/// the rule falls back to the lowest harmonic the click will populate, the
/// refined lattice spacing.
pub fn target_harmonic(post: &FourierPosterior, k: u32, visibility: f64) -> u64 {
    let zero = Complex64::default();
    if harmonic_terms(post, 1, k, visibility).iter().any(|t| *t != zero) {
        1
    } else {
        post.spacing_after(k)
    }
}

/// Closed-form stationary points of `|a + w| + |a − w|` with
/// `w = b e^{−iΦ} + c e^{iΦ}`, each paired with its `+π` branch partner.
pub fn closed_form_candidates(a: Complex64, b: Complex64, c: Complex64) -> Vec<f64> {
    let mut out = Vec::with_capacity(6);
    let phi0 = (b * a.conj() - c.conj() * a).arg();
    out.push(phi0);
    out.push(phi0 + PI);
    let c1 = (a.conj() * c).powi(2) - (a * b.conj()).powi(2) + (b.norm_sqr() - c.norm_sqr()) * 4.0 * b.conj() * c;
    let c2 = Complex64::new(0.0, -2.0 * (a * a * b.conj() * c.conj()).im);
    if c1.norm() > 0.0 {
        let root = (c2 * c2 + c1.norm_sqr()).sqrt();
        for sign in [1.0, -1.0] {
            let phi = ((c2 + root * sign) / c1).sqrt().arg();
            if phi.is_finite() {
                out.push(phi);
                out.push(phi + PI);
            }
        }
    }
    out.into_iter().map(wrap_phase).collect()
}

/// Control phase that maximizes the one-step expected sharpness.
///
/// Candidates are the closed-form maximizers (exact for symmetric contrast,
/// `f_a + f_i = 1`). For asymmetric contrast the objective loses that form,
/// so a coarse scan with golden-section refinement is added. The candidate
/// with the largest objective wins; a flat objective returns 0.
pub fn adaptive_control_phase(post: &FourierPosterior, k: u32, visibility: f64, contrast: &Contrast) -> f64 {
    let g = target_harmonic(post, k, visibility);
    let terms = harmonic_terms(post, g, k, visibility);
    let zero = Complex64::default();
    if terms.iter().all(|t| *t == zero) {
        return 0.0;
    }
    let half = 0.5 * contrast.visibility();
    let mut candidates = closed_form_candidates(terms[0], terms[1] * half, terms[2] * half);
    if contrast.baseline(1) != contrast.baseline(-1) {
        candidates.extend(scan_and_refine(|phi| functional_value(&terms, contrast, phi)));
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for phi in candidates {
        let value = functional_value(&terms, contrast, phi);
        if value > best.0 {
            best = (value, phi);
        }
    }
    best.1
}

fn scan_and_refine(f: impl Fn(f64) -> f64) -> Vec<f64> {
    const SCAN: usize = 64;
    let step = TAU / SCAN as f64;
    let values: Vec<f64> = (0..SCAN).map(|i| f(i as f64 * step)).collect();
    let mut peaks: Vec<usize> = (0..SCAN)
        .filter(|&i| {
            let prev = values[(i + SCAN - 1) % SCAN];
            let next = values[(i + 1) % SCAN];
            values[i] >= prev && values[i] >= next
        })
        .collect();
    peaks.sort_by(|&x, &y| values[y].total_cmp(&values[x]));
    peaks.truncate(3);
    peaks
        .into_iter()
        .map(|i| golden_max(&f, i as f64 * step - step, i as f64 * step + step))
        .collect()
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    wrap_phase(0.5 * (lo + hi))
}

/// Fisher information of one click about φ,
/// `4^k sin²(2^kφ − Φ) / (e^{2^{k+1} τ/T2} − cos²(2^kφ − Φ))`.
///
/// The denominator is evaluated as `expm1(·) + sin²` which keeps the ideal
/// limit exact; the removable `0/0` at `τ/T2 = 0` resolves to `4^k`.
pub fn fisher_information(phi: f64, phi_ctrl: f64, k: u32, tau_over_t2: f64) -> Result<f64> {
    if !(tau_over_t2 >= 0.0) {
        return Err(QpeError::arg(format!("tau/T2 must be >= 0, got {tau_over_t2}")));
    }
    let scale = 4f64.powi(k as i32);
    let x = (1u64 << k) as f64 * phi - phi_ctrl;
    let s2 = x.sin().powi(2);
    let denom = ((2u64 << k) as f64 * tau_over_t2).exp_m1() + s2;
    if denom == 0.0 {
        return Ok(scale);
    }
    Ok(scale * s2 / denom)
}
