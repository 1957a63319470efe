//! Bayesian phase posterior stored as a Fourier series
//! `P(φ) = Σ_j b_j e^{ijφ}`.
//!
//! Only `b_j` for `j ≥ 0` are stored: the density is real, so
//! `b_{−j} = conj(b_j)` holds by construction. Nonzero coefficients live on a
//! lattice `j ∈ {0, s, 2s, …, J}` whose spacing `s` is the smallest shift
//! `2^k` applied so far; the lattice is refined in place when a click with a
//! smaller exponent arrives.

mod dd;
pub mod grid;

pub use grid::GridPosterior;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{QpeError, Result};

/// `1/(2π)`, the value of `b_0` for a normalized density.
pub const B0: f64 = 1.0 / TAU;

/// Detection contrast: probabilities of a +1 click when the spin is (`f_a`) or
/// is not (`f_i`) in the bright state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrast {
    f_a: f64,
    f_i: f64,
}

impl Contrast {
    pub const IDEAL: Contrast = Contrast { f_a: 1.0, f_i: 0.0 };

    pub fn new(f_a: f64, f_i: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f_a) || !(0.0..=1.0).contains(&f_i) {
            return Err(QpeError::arg(format!(
                "contrast values must lie in [0, 1], got f_a = {f_a}, f_i = {f_i}"
            )));
        }
        if f_i > f_a {
            return Err(QpeError::arg(format!("f_i = {f_i} exceeds f_a = {f_a}")));
        }
        Ok(Contrast { f_a, f_i })
    }

    /// Symmetric contrast with detection visibility `f_d = f_a − f_i` and
    /// `f_a + f_i = 1`.
    pub fn from_visibility(f_d: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f_d) {
            return Err(QpeError::arg(format!("f_d must lie in [0, 1], got {f_d}")));
        }
        Contrast::new(0.5 * (1.0 + f_d), 0.5 * (1.0 - f_d))
    }

    pub fn f_a(&self) -> f64 {
        self.f_a
    }

    pub fn f_i(&self) -> f64 {
        self.f_i
    }

    /// `f_d = f_a − f_i`.
    pub fn visibility(&self) -> f64 {
        self.f_a - self.f_i
    }

    /// Constant term of `2·P(u | φ)`: `f_a + f_i` for a +1 click and
    /// `2 − f_a − f_i` for a −1 click.
    pub fn baseline(&self, u: i8) -> f64 {
        if u > 0 {
            self.f_a + self.f_i
        } else {
            2.0 - self.f_a - self.f_i
        }
    }

    /// `P(+1) = (f_a + f_i)/2 + (f_a − f_i)/2 · y` with `y = V cos(2^k φ − Φ)`.
    pub fn plus_probability(&self, y: f64) -> f64 {
        0.5 * (self.f_a + self.f_i) + 0.5 * (self.f_a - self.f_i) * y
    }

    pub fn outcome_probability(&self, u: i8, y: f64) -> f64 {
        let p = self.plus_probability(y);
        if u > 0 {
            p
        } else {
            1.0 - p
        }
    }
}

/// One single-shot outcome together with the settings it was taken under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickRecord {
    /// +1 or −1.
    pub u: i8,
    /// Multi-pass exponent; accrual time is `2^k τ`.
    pub k: u32,
    pub control_phase: f64,
    /// Dephasing visibility `V(τ_k)` in `[0, 1]`.
    pub visibility: f64,
    pub contrast: Contrast,
}

impl ClickRecord {
    pub fn ideal(u: i8, k: u32, control_phase: f64) -> Self {
        ClickRecord {
            u,
            k,
            control_phase,
            visibility: 1.0,
            contrast: Contrast::IDEAL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.u != 1 && self.u != -1 {
            return Err(QpeError::arg(format!("click outcome must be ±1, got {}", self.u)));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(QpeError::arg(format!(
                "visibility must lie in [0, 1], got {}",
                self.visibility
            )));
        }
        if self.k > 62 {
            return Err(QpeError::arg(format!("exponent k = {} too large", self.k)));
        }
        Contrast::new(self.contrast.f_a, self.contrast.f_i).map(|_| ())
    }

    pub fn shift(&self) -> u64 {
        1u64 << self.k
    }

    /// Likelihood `P(u | φ)` of this click.
    pub fn likelihood(&self, phi: f64) -> f64 {
        let y = self.visibility * ((self.shift() as f64) * phi - self.control_phase).cos();
        self.contrast.outcome_probability(self.u, y)
    }
}

/// Fourier-series posterior over the system phase.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPosterior {
    /// Lattice step; `None` while only `b_0` is present.
    spacing: Option<u64>,
    /// `coeffs[n] = b_{n·spacing}` for `n = 0..len`, rounded to `f64`.
    coeffs: Vec<Complex64>,
    /// Low-order parts: `b_{n·spacing} = coeffs[n] + tails[n]` to about
    /// 32 digits.
    tails: Vec<Complex64>,
    clicks: u64,
}

impl Default for FourierPosterior {
    fn default() -> Self {
        Self::flat()
    }
}

impl FourierPosterior {
    /// Uniform prior, `P(φ) = 1/(2π)`.
    pub fn flat() -> Self {
        FourierPosterior {
            spacing: None,
            coeffs: vec![Complex64::new(B0, 0.0)],
            tails: vec![Complex64::default()],
            clicks: 0,
        }
    }

    pub fn spacing(&self) -> Option<u64> {
        self.spacing
    }

    /// Lattice spacing after a shift of `2^k` has been applied.
    pub fn spacing_after(&self, k: u32) -> u64 {
        let d = 1u64 << k;
        self.spacing.map_or(d, |s| s.min(d))
    }

    pub fn clicks_applied(&self) -> u64 {
        self.clicks
    }

    /// Largest harmonic index that may be nonzero.
    pub fn max_harmonic(&self) -> u64 {
        self.spacing.map_or(0, |s| s * (self.coeffs.len() as u64 - 1))
    }

    /// Stored coefficients `b_0, b_s, b_{2s}, …`.
    pub fn stored(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `b_j` for any integer `j`.
    pub fn coeff(&self, j: i64) -> Complex64 {
        let mag = j.unsigned_abs();
        let value = if mag == 0 {
            self.coeffs[0]
        } else {
            match self.spacing {
                Some(s) if mag.is_multiple_of(s) => self
                    .coeffs
                    .get((mag / s) as usize)
                    .copied()
                    .unwrap_or_default(),
                _ => Complex64::default(),
            }
        };
        if j < 0 {
            value.conj()
        } else {
            value
        }
    }

    /// Folds in one click outcome.
    ///
    /// The unnormalized coefficients are
    /// `b̃_j = c_u b_j + (u/2) f_d V (b_{j−2^k} e^{−iΦ} + b_{j+2^k} e^{iΦ})`
    /// with `c_u = f_a + f_i` for a +1 click and `2 − f_a − f_i` for a −1
    /// click, i.e. the Fourier image of `2·P(u|φ)·P(φ)`. They are then divided
    /// by `2π b̃_0` so that `b_0 = 1/(2π)` again. The arithmetic is
    /// double-double, so rounding error is not amplified in the posterior tails
    /// by later clicks.
    pub fn bayes_update(&mut self, click: &ClickRecord) -> Result<()> {
        click.validate()?;
        let d = click.shift();
        let new_spacing = self.spacing_after(click.k);
        self.refine(new_spacing);

        let step = (d / new_spacing) as usize;
        let old_len = self.coeffs.len();
        let new_len = old_len + step;

        // ext[m + step] = b_{m·s} for m in [−step, new_len + step)
        let extend = |src: &[Complex64]| {
            let mut ext = vec![Complex64::default(); new_len + 2 * step];
            for m in 1..=step.min(old_len - 1) {
                ext[step - m] = src[m].conj();
            }
            ext[step..step + old_len].copy_from_slice(src);
            ext
        };
        let hi = extend(&self.coeffs);
        let lo = extend(&self.tails);

        let alpha = click.contrast.baseline(click.u);
        let beta = 0.5 * f64::from(click.u) * click.contrast.visibility() * click.visibility;
        let stencil = dd::Stencil::new(alpha, Complex64::from_polar(beta, -click.control_phase));

        let (mut next, mut tails): (Vec<Complex64>, Vec<Complex64>) = (0..new_len)
            .map(|n| {
                stencil.apply(
                    (hi[n + step], lo[n + step]),
                    (hi[n], lo[n]),
                    (hi[n + 2 * step], lo[n + 2 * step]),
                )
            })
            .unzip();

        let norm = (next[0].re + tails[0].re) * TAU;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(QpeError::ImpossibleOutcome(next[0].re));
        }
        let inv = dd::Factor::new(1.0 / norm);
        for (c, t) in next.iter_mut().zip(tails.iter_mut()) {
            (*c, *t) = dd::scale(*c, *t, inv);
        }
        // trailing zeros appear when contrast or visibility vanish
        while next.len() > 1 && next[next.len() - 1] == Complex64::default() && tails[tails.len() - 1] == Complex64::default() {
            next.pop();
            tails.pop();
        }
        self.coeffs = next;
        self.tails = tails;
        self.spacing = Some(new_spacing);
        self.clicks += 1;
        Ok(())
    }

    /// Re-expresses the stored lattice on a finer spacing.
    fn refine(&mut self, new_spacing: u64) {
        let Some(s) = self.spacing else {
            return;
        };
        if new_spacing >= s {
            return;
        }
        let ratio = (s / new_spacing) as usize;
        let spread = |src: &[Complex64]| {
            let mut fine = vec![Complex64::default(); (src.len() - 1) * ratio + 1];
            for (n, c) in src.iter().enumerate() {
                fine[n * ratio] = *c;
            }
            fine
        };
        self.coeffs = spread(&self.coeffs);
        self.tails = spread(&self.tails);
        self.spacing = Some(new_spacing);
    }

    /// `arg(b_{−1})` mapped into `[0, 2π)`.
    pub fn phase_estimate(&self) -> Result<f64> {
        let b = self.coeff(-1);
        if b == Complex64::default() {
            return Err(QpeError::NoInformation);
        }
        Ok(wrap_phase(b.arg()))
    }

    /// `|2π b_{−1}|`, the modulus of the posterior's first circular moment.
    pub fn sharpness(&self) -> f64 {
        (TAU * self.coeff(-1)).norm()
    }

    /// `Σ_j b_j e^{ijφ}`.
    pub fn eval_density(&self, phi: f64) -> f64 {
        let Some(s) = self.spacing else {
            return self.coeffs[0].re;
        };
        let base = s as f64 * phi;
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| (c * Complex64::from_polar(1.0, n as f64 * base)).re)
            .sum();
        self.coeffs[0].re + 2.0 * tail
    }

    /// Density at `n` equispaced points `φ_q = 2πq/n`.
    pub fn density_samples(&self, n: usize) -> Vec<f64> {
        DensitySampler::new(n).samples(self).to_vec()
    }

    /// Largest violation of normalization, conjugate symmetry and
    /// boundedness. Conjugate symmetry is structural here and contributes 0.
    pub fn invariant_violation(&self) -> f64 {
        let b0 = self.coeffs[0];
        let mut worst = (b0.re - B0).abs().max(b0.im.abs());
        for c in &self.coeffs[1..] {
            worst = worst.max(c.norm() - B0);
        }
        worst.max(0.0)
    }
}

/// Evaluates posterior densities on a fixed grid of `n` points. Reuse one
/// sampler for many posteriors to avoid replanning.
///
/// On a lattice of spacing `s` the density has period `2π/s`, so the `n`
/// samples take only `m = n / gcd(n, s)` distinct values; those come from one
/// inverse FFT of size `m` over the coefficients folded modulo `m`.
pub struct DensitySampler {
    points: usize,
    planner: FftPlanner<f64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    out: Vec<f64>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl DensitySampler {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        DensitySampler {
            points: n,
            planner: FftPlanner::new(),
            buf: Vec::with_capacity(n),
            scratch: Vec::new(),
            out: vec![0.0; n],
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Distinct density values; sample `q` equals entry `q mod len`.
    fn distinct(&mut self, post: &FourierPosterior) -> usize {
        let n = self.points as u64;
        let spacing = post.spacing.unwrap_or(n);
        let d = gcd(n, spacing);
        let m = n / d;
        let step = (spacing / d) % m;
        self.buf.clear();
        self.buf.resize(m as usize, Complex64::default());
        self.buf[0] += post.coeffs[0];
        for (idx, c) in post.coeffs.iter().enumerate().skip(1) {
            let j = (idx as u64 % m) * step % m;
            self.buf[j as usize] += c;
            self.buf[((m - j) % m) as usize] += c.conj();
        }
        let fft: Arc<dyn Fft<f64>> = self.planner.plan_fft_inverse(m as usize);
        let need = fft.get_inplace_scratch_len();
        if self.scratch.len() < need {
            self.scratch.resize(need, Complex64::default());
        }
        fft.process_with_scratch(&mut self.buf, &mut self.scratch[..need]);
        m as usize
    }

    pub fn samples(&mut self, post: &FourierPosterior) -> &[f64] {
        let m = self.distinct(post);
        for (q, o) in self.out.iter_mut().enumerate() {
            *o = self.buf[q % m].re;
        }
        &self.out
    }

    pub fn min_density(&mut self, post: &FourierPosterior) -> f64 {
        let m = self.distinct(post);
        self.buf[..m].iter().map(|c| c.re).fold(f64::INFINITY, f64::min)
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed angular distance `a − b` folded into `(−π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}
