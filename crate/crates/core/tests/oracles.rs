//! Cross-checks against brute-force references written independently of the
//! library: a pointwise Bayes grid, direct quadrature and Monte Carlo counts.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use qpe_core::control::{adaptive_control_phase, sharpness_functional, ControlSchedule};
use qpe_core::engine::{
    field_from_phase, phase_from_field, run_ensemble, run_trial, run_trials, sample_click, TrialConfig,
};
use qpe_core::posterior::{angle_diff, ClickRecord, Contrast, FourierPosterior};
use qpe_core::rng::trial_stream;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 4096;

/// `P(u | φ)` written out from the measurement model.
fn likelihood(u: i8, k: u32, ctrl: f64, v: f64, f_a: f64, f_i: f64, phi: f64) -> f64 {
    let p_plus = 0.5 * (f_a + f_i) + 0.5 * (f_a - f_i) * v * ((1u64 << k) as f64 * phi - ctrl).cos();
    if u > 0 {
        p_plus
    } else {
        1.0 - p_plus
    }
}

struct Grid {
    p: Vec<f64>,
}

impl Grid {
    fn flat() -> Self {
        Grid { p: vec![1.0 / TAU; N] }
    }

    fn phi(n: usize) -> f64 {
        TAU * n as f64 / N as f64
    }

    fn update(&mut self, c: &ClickRecord) {
        for (n, p) in self.p.iter_mut().enumerate() {
            *p *= likelihood(c.u, c.k, c.control_phase, c.visibility, c.contrast.f_a(), c.contrast.f_i(), Self::phi(n));
        }
        let z: f64 = self.p.iter().sum::<f64>() * TAU / N as f64;
        for p in &mut self.p {
            *p /= z;
        }
    }

    fn coeff(&self, j: i64) -> Complex64 {
        self.p
            .iter()
            .enumerate()
            .map(|(n, p)| Complex64::from_polar(*p, -(j as f64) * Self::phi(n)))
            .sum::<Complex64>()
            / N as f64
    }

    fn circular_mean(&self) -> f64 {
        let z: Complex64 = self
            .p
            .iter()
            .enumerate()
            .map(|(n, p)| Complex64::from_polar(*p, Self::phi(n)))
            .sum();
        z.arg().rem_euclid(TAU)
    }
}

fn random_contrast(rng: &mut ChaCha8Rng) -> Contrast {
    let f_i = rng.gen_range(0.0..0.25);
    Contrast::new(rng.gen_range(f_i + 0.3..=1.0), f_i).unwrap()
}

fn random_click(rng: &mut ChaCha8Rng, max_k: u32) -> ClickRecord {
    ClickRecord {
        u: if rng.gen_bool(0.5) { 1 } else { -1 },
        k: rng.gen_range(0..=max_k),
        control_phase: rng.gen_range(0.0..TAU),
        visibility: rng.gen_range(0.2..=1.0),
        contrast: random_contrast(rng),
    }
}

#[test]
fn fourier_update_matches_pointwise_bayes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut post = FourierPosterior::flat();
        let mut grid = Grid::flat();
        for _ in 0..20 {
            let click = random_click(&mut rng, 5);
            post.bayes_update(&click).unwrap();
            grid.update(&click);
        }
        for j in [-1i64, 0, 1, 2, 32, -33] {
            let err = (post.coeff(j) - grid.coeff(j)).norm();
            assert!(err < 1e-9, "b_{j}: {err}");
        }
        match post.phase_estimate() {
            Ok(est) => assert!(angle_diff(est, grid.circular_mean()).abs() < 1e-8),
            Err(_) => assert!(grid.coeff(-1).norm() < 1e-12),
        }
        let integral: f64 = (0..N).map(|n| post.eval_density(Grid::phi(n))).sum::<f64>() * TAU / N as f64;
        assert!((integral - 1.0).abs() < 1e-9);
    }
}

#[test]
fn sharpness_functional_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..25 {
        let mut post = FourierPosterior::flat();
        let mut grid = Grid::flat();
        for _ in 0..rng.gen_range(0..8) {
            let click = random_click(&mut rng, 4);
            post.bayes_update(&click).unwrap();
            grid.update(&click);
        }
        let k = rng.gen_range(0..=4);
        let v = rng.gen_range(0.2..=1.0);
        let contrast = random_contrast(&mut rng);
        let ctrl = rng.gen_range(0.0..TAU);
        let mut quad = 0.0;
        for u in [1i8, -1] {
            let z: Complex64 = (0..N)
                .map(|n| {
                    let phi = Grid::phi(n);
                    let w = likelihood(u, k, ctrl, v, contrast.f_a(), contrast.f_i(), phi) * grid.p[n];
                    Complex64::from_polar(w, phi)
                })
                .sum::<Complex64>()
                * (TAU / N as f64);
            quad += z.norm();
        }
        quad /= TAU;
        let fun = sharpness_functional(&post, k, ctrl, v, &contrast);
        assert!((quad - fun).abs() < 1e-8, "{quad} vs {fun}");
    }
}

#[test]
fn adaptive_phase_is_grid_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let mut post = FourierPosterior::flat();
        for _ in 0..rng.gen_range(1..10) {
            post.bayes_update(&random_click(&mut rng, 4)).unwrap();
        }
        let k = rng.gen_range(0..=4);
        let v = rng.gen_range(0.2..=1.0);
        let contrast = random_contrast(&mut rng);
        let chosen = adaptive_control_phase(&post, k, v, &contrast);
        let best = (0..720)
            .map(|n| sharpness_functional(&post, k, TAU * n as f64 / 720.0, v, &contrast))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(sharpness_functional(&post, k, chosen, v, &contrast) >= best - 1e-9);
    }
}

/// Replays whole adaptive trials on the grid from the same random streams.
/// Control phases come from the library rule; everything else is redone.
#[test]
fn whole_trial_matches_grid_replay() {
    for k_max in 0..=5u32 {
        let config = TrialConfig::adaptive(k_max, 3).with_trials(35).with_seed(5);
        let schedule = ControlSchedule::adaptive(k_max, 3, 0.0).unwrap();
        for idx in 0..config.trials {
            let result = run_trial(&config, idx).unwrap();
            let mut rng = trial_stream(config.master_seed, idx);
            let phi_true = rng.gen::<f64>() * TAU;
            assert_eq!(phi_true, result.phi_true);
            let mut post = FourierPosterior::flat();
            let mut grid = Grid::flat();
            let mut first = true;
            for stage in schedule.stages() {
                for _ in 0..stage.clicks {
                    let ctrl = if first {
                        0.0
                    } else {
                        adaptive_control_phase(&post, stage.k, 1.0, &Contrast::IDEAL)
                    };
                    first = false;
                    let p = likelihood(1, stage.k, ctrl, 1.0, 1.0, 0.0, phi_true);
                    let u = if rng.gen::<f64>() < p { 1 } else { -1 };
                    let click = ClickRecord::ideal(u, stage.k, ctrl);
                    post.bayes_update(&click).unwrap();
                    grid.update(&click);
                }
            }
            let grid_sharpness = (TAU * grid.coeff(-1)).norm();
            assert!((grid_sharpness - result.sharpness).abs() < 1e-8, "K={k_max} trial {idx}");
        }
    }
}

#[test]
fn click_frequency_matches_model() {
    let contrast = Contrast::new(0.85, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let draws = 1_000_000;
    let plus = (0..draws)
        .filter(|_| sample_click(&mut rng, 0.0, 0, 0.0, 1.0, &contrast).unwrap() == 1)
        .count();
    let freq = plus as f64 / draws as f64;
    assert!((freq - 0.85).abs() < 0.002, "{freq}");
}

/// Pearson χ² over several parameter points; the statistic has one degree
/// of freedom per point, so the 0.999 quantile of the total is used.
#[test]
fn click_frequencies_pass_chi_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let points = [
        (0.3, 2u32, 1.0, 0.9, Contrast::new(0.85, 0.05).unwrap()),
        (1.7, 0, 0.2, 0.5, Contrast::from_visibility(0.9).unwrap()),
        (4.0, 3, 2.5, 1.0, Contrast::IDEAL),
        (5.5, 1, 4.0, 0.7, Contrast::new(0.55, 0.05).unwrap()),
    ];
    let draws = 1_000_000;
    let mut chi2 = 0.0;
    for (phi, k, ctrl, v, contrast) in points {
        let plus = (0..draws)
            .filter(|_| sample_click(&mut rng, phi, k, ctrl, v, &contrast).unwrap() == 1)
            .count() as f64;
        let p = likelihood(1, k, ctrl, v, contrast.f_a(), contrast.f_i(), phi);
        let expect = p * draws as f64;
        let expect_minus = draws as f64 - expect;
        chi2 += (plus - expect).powi(2) / expect + (plus - expect).powi(2) / expect_minus;
    }
    // χ²_4 at p = 0.001
    assert!(chi2 < 18.467, "{chi2}");
}

#[test]
fn estimators_agree_on_ideal_ensemble() {
    let agg = run_ensemble(&TrialConfig::adaptive(6, 6).with_trials(2000).with_seed(3)).unwrap();
    let se = (agg.stderr_v_h.powi(2) + agg.stderr_v_h_err.powi(2)).sqrt();
    assert!((agg.v_h - agg.v_h_err).abs() <= 3.0 * se, "{agg:?}");
}

#[test]
fn precision_improves_with_depth_below_dephasing_time() {
    let mut previous: Option<(f64, f64)> = None;
    for k in 1..=8 {
        let agg = run_ensemble(
            &TrialConfig::adaptive(k, 6)
                .with_t2_over_tau(1e3)
                .with_trials(1000)
                .with_seed(4),
        )
        .unwrap();
        let (product, se) = (agg.product, agg.stderr_v_h * agg.resource_time as f64);
        if let Some((prev, prev_se)) = previous {
            assert!(product < prev + 3.0 * (se * se + prev_se * prev_se).sqrt(), "K={k}");
        }
        previous = Some((product, se));
    }
}

#[test]
fn field_round_trip_within_reported_precision() {
    let (lambda, tau) = (1.76e11, 2e-6);
    let config = TrialConfig::adaptive(8, 6).with_trials(1000).with_seed(8);
    let results = run_trials(&config, &|_| {}).unwrap();
    let agg = run_ensemble(&config).unwrap();
    let mut sq = Vec::with_capacity(results.len());
    for r in &results {
        let b_true = field_from_phase(r.phi_true, tau, lambda).unwrap();
        assert!((phase_from_field(b_true, tau, lambda) - r.phi_true).abs() < 1e-9);
        let b_hat = field_from_phase(r.phi_hat, tau, lambda).unwrap();
        let wrapped = angle_diff(phase_from_field(b_hat - b_true, tau, lambda), 0.0);
        sq.push(field_from_phase(wrapped, tau, lambda).unwrap().powi(2));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let boot: Vec<f64> = (0..400)
        .map(|_| (0..sq.len()).map(|_| sq[rng.gen_range(0..sq.len())]).sum::<f64>() / sq.len() as f64)
        .collect();
    let mut sorted = boot.clone();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[2], sorted[397]);
    let predicted = agg.v_h / (2.0 * lambda * tau).powi(2);
    let slack = 2.58 * agg.stderr_v_h / (2.0 * lambda * tau).powi(2);
    assert!(
        predicted + slack >= lo && predicted - slack <= hi,
        "predicted {predicted:e}, bootstrap 99% interval [{lo:e}, {hi:e}]"
    );
    assert!(field_from_phase(PI, 1.0, 1.0).unwrap() == PI / 2.0);
}
