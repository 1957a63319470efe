//! Two-level probe spin: state preparation, instantaneous π/2 pulses, free
//! precession with amplitude decay and dephasing, and the Ramsey click
//! probability.
//!
//! Basis ordering is `[|0⟩, |1⟩]`, with `σ_z = |0⟩⟨0| − |1⟩⟨1|` and
//! `σ_− = |0⟩⟨1|`, and ħ = 1 throughout. During free precession the spin
//! obeys
//!
//! ```text
//! dρ/dt = −i[λ_g B_z σ_z, ρ] + (1/T1) L(σ_−, ρ) + (1/(2 T2) − 1/(4 T1)) L(σ_z, ρ)
//! L(A, ρ) = A ρ A† − ½{A†A, ρ}
//! ```
//!
//! [`evolve_analytic`] gives the closed form for the standard initial state
//! and [`integrate_master`] integrates the same equation with classical RK4,
//! for arbitrary initial states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{QpeError, Result};

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default tolerance used by [`DensityMatrix::check`].
pub const STATE_TOLERANCE: f64 = 1e-12;

/// 2×2 density matrix of the probe spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    /// Builds a density matrix after checking Hermiticity, unit trace and
    /// positivity at [`STATE_TOLERANCE`].
    pub fn new(elements: Mat2) -> Result<Self> {
        let rho = DensityMatrix { m: elements };
        rho.check(STATE_TOLERANCE)?;
        Ok(rho)
    }

    /// Wraps elements without validation. Use [`DensityMatrix::check`] when
    /// the source is not trusted.
    pub fn from_elements_unchecked(elements: Mat2) -> Self {
        DensityMatrix { m: elements }
    }

    /// The computational basis state `|index⟩⟨index|`.
    pub fn basis(index: usize) -> Self {
        assert!(index < 2, "two-level system has basis states 0 and 1");
        let mut m = [[ZERO; 2]; 2];
        m[index][index] = ONE;
        DensityMatrix { m }
    }

    /// Pure state from Bloch angles: `cos(θ/2)|0⟩ + e^{iϕ} sin(θ/2)|1⟩`.
    pub fn pure_from_bloch(theta: f64, azimuth: f64) -> Self {
        let a = Complex64::new((theta / 2.0).cos(), 0.0);
        let b = Complex64::from_polar((theta / 2.0).sin(), azimuth);
        DensityMatrix {
            m: [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]],
        }
    }

    pub fn elements(&self) -> &Mat2 {
        &self.m
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Probability of finding the spin in `|index⟩`.
    pub fn population(&self, index: usize) -> f64 {
        self.m[index][index].re
    }

    /// Eigenvalues (ascending) of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let off = 0.5 * (self.m[0][1] + self.m[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// Verifies the density-matrix invariants at the given tolerance.
    pub fn check(&self, tol: f64) -> Result<()> {
        let m = &self.m;
        let herm = (m[1][0] - m[0][1].conj()).norm();
        if herm > tol || m[0][0].im.abs() > tol || m[1][1].im.abs() > tol {
            return Err(QpeError::Internal(format!(
                "density matrix not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(QpeError::Internal(format!("trace {tr} differs from 1")));
        }
        let [low, _] = self.eigenvalues();
        if low < -tol {
            return Err(QpeError::Internal(format!(
                "density matrix has negative eigenvalue {low:e}"
            )));
        }
        Ok(())
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }
}

/// Relaxation time that may be infinite. The infinite case is kept distinct so
/// that `e^{−t/T}` evaluates to exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayTime {
    Finite(f64),
    Infinite,
}

impl DecayTime {
    pub fn finite(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(DecayTime::Finite(t))
        } else if t == f64::INFINITY {
            Ok(DecayTime::Infinite)
        } else {
            Err(QpeError::arg(format!("relaxation time must be > 0, got {t}")))
        }
    }

    /// `1/T`, zero when infinite.
    pub fn rate(self) -> f64 {
        match self {
            DecayTime::Finite(t) => 1.0 / t,
            DecayTime::Infinite => 0.0,
        }
    }

    /// `e^{−t/T}`.
    pub fn survival(self, t: f64) -> f64 {
        match self {
            DecayTime::Finite(tt) => (-t / tt).exp(),
            DecayTime::Infinite => 1.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            DecayTime::Finite(t) => t,
            DecayTime::Infinite => f64::INFINITY,
        }
    }
}

/// Field, coupling and relaxation times seen by the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinEnvironment {
    gyromagnetic_ratio: f64,
    field: f64,
    t1: DecayTime,
    t2: DecayTime,
}

impl SpinEnvironment {
    /// Complete positivity of the dissipator requires `T2 ≤ 2 T1`; otherwise
    /// the dephasing rate `1/(2T2) − 1/(4T1)` goes negative.
    pub fn new(gyromagnetic_ratio: f64, field: f64, t1: DecayTime, t2: DecayTime) -> Result<Self> {
        if !gyromagnetic_ratio.is_finite() || gyromagnetic_ratio == 0.0 {
            return Err(QpeError::arg("gyromagnetic ratio must be finite and nonzero"));
        }
        if !field.is_finite() {
            return Err(QpeError::arg("field must be finite"));
        }
        for (name, t) in [("T1", t1), ("T2", t2)] {
            if let DecayTime::Finite(v) = t {
                if !(v.is_finite() && v > 0.0) {
                    return Err(QpeError::arg(format!("{name} must be > 0, got {v}")));
                }
            }
        }
        if t2.rate() < 0.5 * t1.rate() {
            return Err(QpeError::arg(format!(
                "T2 = {} exceeds 2·T1 = {}",
                t2.as_f64(),
                2.0 * t1.as_f64()
            )));
        }
        Ok(SpinEnvironment {
            gyromagnetic_ratio,
            field,
            t1,
            t2,
        })
    }

    /// Environment with no relaxation at all.
    pub fn ideal(gyromagnetic_ratio: f64, field: f64) -> Result<Self> {
        Self::new(gyromagnetic_ratio, field, DecayTime::Infinite, DecayTime::Infinite)
    }

    pub fn gyromagnetic_ratio(&self) -> f64 {
        self.gyromagnetic_ratio
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn t1(&self) -> DecayTime {
        self.t1
    }

    pub fn t2(&self) -> DecayTime {
        self.t2
    }

    /// Same environment with amplitude decay switched off.
    pub fn without_decay(&self) -> Self {
        SpinEnvironment {
            t1: DecayTime::Infinite,
            ..*self
        }
    }

    /// `Λ = 2iλ_g B_z − 1/T2`.
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(-self.t2.rate(), 2.0 * self.gyromagnetic_ratio * self.field)
    }

    /// Accrued phase `2 λ_g B_z t`.
    pub fn phase(&self, t: f64) -> f64 {
        2.0 * self.gyromagnetic_ratio * self.field * t
    }
}

/// State after the first π/2 pulse on `|0⟩`: `½[[1, i], [−i, 1]]`.
pub fn initial_superposition() -> DensityMatrix {
    DensityMatrix {
        m: [
            [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5)],
            [Complex64::new(0.0, -0.5), Complex64::new(0.5, 0.0)],
        ],
    }
}

/// Unitary for a π/2 rotation about the equatorial axis at `axis_angle`
/// from +X.
fn pi2_unitary(axis_angle: f64) -> Mat2 {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let e = Complex64::from_polar(1.0, axis_angle);
    [
        [s, -I * e.conj() * FRAC_1_SQRT_2],
        [-I * e * FRAC_1_SQRT_2, s],
    ]
}

/// `U ρ U†` for an instantaneous π/2 pulse about the equatorial axis at
/// `axis_angle` (0 is +X).
pub fn apply_pi2_pulse(rho: &DensityMatrix, axis_angle: f64) -> DensityMatrix {
    let u = pi2_unitary(axis_angle);
    DensityMatrix {
        m: mul(&mul(&u, &rho.m), &dagger(&u)),
    }
}

/// Closed-form free evolution from [`initial_superposition`] for time `t`.
pub fn evolve_analytic(env: &SpinEnvironment, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QpeError::arg(format!("evolution time must be >= 0, got {t}")));
    }
    let pop = 0.5 * env.t1.survival(t);
    let lambda = env.lambda();
    let coherence = (lambda * t).exp();
    Ok(DensityMatrix {
        m: [
            [Complex64::new(1.0 - pop, 0.0), 0.5 * I * coherence.conj()],
            [-0.5 * I * coherence, Complex64::new(pop, 0.0)],
        ],
    })
}

/// Integrates the master equation from `rho` for duration `t` with fixed-step
/// RK4. The step is shrunk so that an integer number of steps spans `t`
/// exactly.
pub fn integrate_master(
    rho: &DensityMatrix,
    env: &SpinEnvironment,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QpeError::arg(format!("integration time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(*rho);
    }
    if !(dt > 0.0) || dt > t {
        return Err(QpeError::arg(format!("step must satisfy 0 < dt <= t, got dt = {dt}")));
    }
    let steps = (t / dt).ceil() as u64;
    let h = t / steps as f64;
    let rhs = LindbladRhs::new(env);
    let mut state = rho.m;
    for _ in 0..steps {
        let k1 = rhs.eval(&state);
        let k2 = rhs.eval(&axpy(&state, h / 2.0, &k1));
        let k3 = rhs.eval(&axpy(&state, h / 2.0, &k2));
        let k4 = rhs.eval(&axpy(&state, h, &k3));
        for r in 0..2 {
            for c in 0..2 {
                state[r][c] += (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]) * (h / 6.0);
            }
        }
    }
    Ok(DensityMatrix { m: state })
}

struct LindbladRhs {
    hamiltonian: Mat2,
    lowering: Mat2,
    sigma_z: Mat2,
    decay_rate: f64,
    dephasing_rate: f64,
}

impl LindbladRhs {
    fn new(env: &SpinEnvironment) -> Self {
        let w = Complex64::new(env.gyromagnetic_ratio * env.field, 0.0);
        LindbladRhs {
            hamiltonian: [[w, ZERO], [ZERO, -w]],
            lowering: [[ZERO, ONE], [ZERO, ZERO]],
            sigma_z: [[ONE, ZERO], [ZERO, -ONE]],
            decay_rate: env.t1.rate(),
            dephasing_rate: 0.5 * env.t2.rate() - 0.25 * env.t1.rate(),
        }
    }

    fn eval(&self, rho: &Mat2) -> Mat2 {
        let commutator = sub(&mul(&self.hamiltonian, rho), &mul(rho, &self.hamiltonian));
        let mut out = scale(&commutator, -I);
        let decay = dissipator(&self.lowering, rho);
        let dephase = dissipator(&self.sigma_z, rho);
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] += decay[r][c] * self.decay_rate + dephase[r][c] * self.dephasing_rate;
            }
        }
        out
    }
}

/// `A ρ A† − ½{A†A, ρ}`.
fn dissipator(a: &Mat2, rho: &Mat2) -> Mat2 {
    let ad = dagger(a);
    let ada = mul(&ad, a);
    let jump = mul(&mul(a, rho), &ad);
    let anti = add(&mul(&ada, rho), &mul(rho, &ada));
    sub(&jump, &scale(&anti, Complex64::new(0.5, 0.0)))
}

/// Probability of a +1 click after a Ramsey sequence of accrual time `t`,
/// `½[1 + e^{−t/T2} cos(2 λ_g B_z t)]`.
pub fn click_probability(env: &SpinEnvironment, t: f64) -> Result<f64> {
    click_probability_with_phase(env, t, 0.0)
}

/// Click probability with a control phase offset,
/// `½[1 + e^{−t/T2} cos(2 λ_g B_z t − Φ)]`.
pub fn click_probability_with_phase(env: &SpinEnvironment, t: f64, control_phase: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QpeError::arg(format!("accrual time must be >= 0, got {t}")));
    }
    let visibility = env.t2.survival(t);
    Ok(0.5 * (1.0 + visibility * (env.phase(t) - control_phase).cos()))
}

/// The same probability obtained by running the pulse sequence: free
/// evolution (amplitude decay off), a closing π/2 pulse and the population of
/// `|0⟩`.
///
/// The closing pulse undoes the opening one, so it is taken about the axis at
/// angle `Φ + π`; with Φ = 0 this is the −X rotation that maps the unevolved
/// superposition back onto `|0⟩`.
pub fn ramsey_click_probability(env: &SpinEnvironment, t: f64, control_phase: f64) -> Result<f64> {
    let rho = evolve_analytic(&env.without_decay(), t)?;
    let readout = apply_pi2_pulse(&rho, control_phase + PI);
    Ok(readout.population(0))
}

/// Ramsey fringe sampled on an evenly spaced time grid (used for plotting).
pub fn ramsey_fringe(env: &SpinEnvironment, t_max: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(QpeError::arg("need at least two samples"));
    }
    (0..samples)
        .map(|i| {
            let t = t_max * i as f64 / (samples - 1) as f64;
            click_probability(env, t).map(|p| (t, p))
        })
        .collect()
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

fn scale(a: &Mat2, s: Complex64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

fn axpy(x: &Mat2, h: f64, k: &Mat2) -> Mat2 {
    [
        [x[0][0] + k[0][0] * h, x[0][1] + k[0][1] * h],
        [x[1][0] + k[1][0] * h, x[1][1] + k[1][1] * h],
    ]
}
