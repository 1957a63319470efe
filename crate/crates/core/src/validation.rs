//! Self-checks against independent brute-force references, run by the
//! `validate` subcommand.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::{adaptive_control_phase, sharpness_functional};
use crate::dynamics::{evolve_analytic, initial_superposition, integrate_master, DecayTime, SpinEnvironment};
use crate::error::Result;
use crate::posterior::grid::GridPosterior;
use crate::posterior::{ClickRecord, Contrast, FourierPosterior};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {} cases, max error {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_error,
            self.tolerance
        )
    }
}

fn random_contrast(rng: &mut ChaCha8Rng) -> Contrast {
    if rng.gen_bool(0.5) {
        Contrast::from_visibility(rng.gen_range(0.5..=1.0)).unwrap()
    } else {
        let f_i = rng.gen_range(0.0..0.3);
        Contrast::new(rng.gen_range(f_i + 0.2..=1.0), f_i).unwrap()
    }
}

/// A random click with `k <= max_k`. Its likelihood vanishes at most at
/// isolated points, so any outcome is possible.
pub fn random_click(rng: &mut ChaCha8Rng, max_k: u32) -> ClickRecord {
    ClickRecord {
        u: if rng.gen_bool(0.5) { 1 } else { -1 },
        k: rng.gen_range(0..=max_k),
        control_phase: rng.gen_range(0.0..TAU),
        visibility: rng.gen_range(0.3..=1.0),
        contrast: random_contrast(rng),
    }
}

/// Fourier recursion against a 4096-point grid posterior, on `b_{−1}`, `b_0`
/// and every harmonic up to 64.
pub fn check_posterior_against_grid(sequences: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..sequences {
        let len = rng.gen_range(1..=12);
        let mut fourier = FourierPosterior::flat();
        let mut grid = GridPosterior::flat(4096)?;
        for _ in 0..len {
            let click = random_click(&mut rng, 5);
            fourier.bayes_update(&click)?;
            grid.update(&click)?;
        }
        let top = (fourier.max_harmonic() as i64).min(64);
        for j in -top - 1..=top + 1 {
            worst = worst.max((fourier.coeff(j) - grid.coefficient(j)).norm());
        }
    }
    Ok(CheckReport {
        name: "posterior vs grid",
        cases: sequences,
        max_error: worst,
        tolerance: 1e-9,
    })
}

/// Random physical environment with `T2 <= 2 T1`.
pub fn random_environment(rng: &mut ChaCha8Rng) -> Result<SpinEnvironment> {
    let lambda = rng.gen_range(0.5..2.0);
    let field = rng.gen_range(-3.0..3.0);
    let t1 = rng.gen_range(0.5..10.0);
    let t2 = rng.gen_range(0.1..=2.0 * t1);
    SpinEnvironment::new(lambda, field, DecayTime::finite(t1)?, DecayTime::finite(t2)?)
}

/// Closed-form evolution against RK4 integration of the master equation with
/// `dt = 1e-4 · min(t, T2)`.
pub fn check_dynamics_against_integrator(points: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho0 = initial_superposition();
    let mut worst = 0.0f64;
    for _ in 0..points {
        let env = random_environment(&mut rng)?;
        let t = rng.gen_range(0.01..3.0);
        let exact = evolve_analytic(&env, t)?;
        let dt = 1e-4 * t.min(env.t2().as_f64());
        let numeric = integrate_master(&rho0, &env, t, dt)?;
        worst = worst.max(exact.max_abs_diff(&numeric));
    }
    Ok(CheckReport {
        name: "analytic vs integrated dynamics",
        cases: points,
        max_error: worst,
        tolerance: 1e-8,
    })
}

/// Error ratio when the RK4 step is halved at a coarse step; fourth order
/// gives about 16.
pub fn integrator_convergence_ratio(env: &SpinEnvironment, t: f64, dt: f64) -> Result<f64> {
    let rho0 = initial_superposition();
    let exact = evolve_analytic(env, t)?;
    let coarse = integrate_master(&rho0, env, t, dt)?.max_abs_diff(&exact);
    let fine = integrate_master(&rho0, env, t, dt / 2.0)?.max_abs_diff(&exact);
    Ok(coarse / fine)
}

/// Chosen adaptive phase against the argmax of the sharpness functional on
/// a dense grid; the error is how far the choice falls below that maximum.
pub fn check_adaptive_phase_against_grid(posteriors: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..posteriors {
        let mut post = FourierPosterior::flat();
        for _ in 0..rng.gen_range(0..10) {
            post.bayes_update(&random_click(&mut rng, 4))?;
        }
        let k = rng.gen_range(0..=4);
        let visibility = rng.gen_range(0.3..=1.0);
        let contrast = random_contrast(&mut rng);
        let chosen = adaptive_control_phase(&post, k, visibility, &contrast);
        let value = sharpness_functional(&post, k, chosen, visibility, &contrast);
        let grid_max = (0..720)
            .map(|n| sharpness_functional(&post, k, TAU * n as f64 / 720.0, visibility, &contrast))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(grid_max - value);
    }
    Ok(CheckReport {
        name: "adaptive phase vs grid argmax",
        cases: posteriors,
        max_error: worst,
        tolerance: 1e-9,
    })
}

/// Sharpness functional against direct quadrature of its defining integral.
pub fn check_functional_against_quadrature(posteriors: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    const N: usize = 2048;
    for _ in 0..posteriors {
        let mut post = FourierPosterior::flat();
        for _ in 0..rng.gen_range(0..8) {
            post.bayes_update(&random_click(&mut rng, 3))?;
        }
        let k = rng.gen_range(0..=3);
        let visibility = rng.gen_range(0.3..=1.0);
        let contrast = random_contrast(&mut rng);
        let phi_ctrl = rng.gen_range(0.0..TAU);
        let mut total = 0.0;
        for u in [1i8, -1] {
            let click = ClickRecord {
                u,
                k,
                control_phase: phi_ctrl,
                visibility,
                contrast,
            };
            let integral: Complex64 = (0..N)
                .map(|n| {
                    let phi = TAU * n as f64 / N as f64;
                    Complex64::from_polar(click.likelihood(phi) * post.eval_density(phi), phi)
                })
                .sum::<Complex64>()
                * (TAU / N as f64);
            total += integral.norm();
        }
        let quad = total / TAU;
        let fun = sharpness_functional(&post, k, phi_ctrl, visibility, &contrast);
        worst = worst.max((quad - fun).abs());
    }
    Ok(CheckReport {
        name: "sharpness functional vs quadrature",
        cases: posteriors,
        max_error: worst,
        tolerance: 1e-10,
    })
}

/// Every built-in check with its standard case count.
pub fn run_all(seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_posterior_against_grid(200, seed)?,
        check_dynamics_against_integrator(100, seed.wrapping_add(1))?,
        check_adaptive_phase_against_grid(100, seed.wrapping_add(2))?,
        check_functional_against_quadrature(50, seed.wrapping_add(3))?,
    ])
}
