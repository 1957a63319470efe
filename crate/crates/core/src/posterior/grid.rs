use std::f64::consts::TAU;

use num_complex::Complex64;

use super::ClickRecord;
use crate::error::{QpeError, Result};

/// Brute-force posterior: density values on a uniform grid `φ_n = 2πn/N`,
/// updated pointwise with Bayes' rule. Independent of the Fourier recursion
/// and used to check it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    values: Vec<f64>,
    max_harmonic: u64,
}

impl GridPosterior {
    pub fn flat(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(QpeError::arg("grid needs at least one point"));
        }
        Ok(GridPosterior {
            values: vec![1.0 / TAU; points],
            max_harmonic: 0,
        })
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_harmonic(&self) -> u64 {
        self.max_harmonic
    }

    pub fn phi(&self, n: usize) -> f64 {
        TAU * n as f64 / self.values.len() as f64
    }

    /// Multiplies by `P(u | φ)` and renormalizes with the periodic trapezoid
    /// rule. The grid must hold at least four points per highest harmonic.
    pub fn update(&mut self, click: &ClickRecord) -> Result<()> {
        click.validate()?;
        let harmonic = self.max_harmonic + click.shift();
        if (self.values.len() as u64) < 4 * harmonic {
            return Err(QpeError::arg(format!(
                "grid of {} points aliases harmonic {harmonic}",
                self.values.len()
            )));
        }
        for n in 0..self.values.len() {
            let phi = self.phi(n);
            self.values[n] *= click.likelihood(phi);
        }
        let integral = self.integral();
        if !(integral > 0.0) {
            return Err(QpeError::ImpossibleOutcome(integral));
        }
        for v in self.values.iter_mut() {
            *v /= integral;
        }
        self.max_harmonic = harmonic;
        Ok(())
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * TAU / self.values.len() as f64
    }

    /// Fourier coefficient `b_j = (1/2π) ∫ P(φ) e^{−ijφ} dφ` by the
    /// trapezoid rule.
    pub fn coefficient(&self, j: i64) -> Complex64 {
        let n = self.values.len() as f64;
        let sum: Complex64 = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| Complex64::from_polar(*v, -(j as f64) * TAU * idx as f64 / n))
            .sum();
        sum / n
    }

    /// `∫ e^{iφ} P(φ) dφ`; its argument is the circular-mean estimate.
    pub fn first_moment(&self) -> Complex64 {
        self.coefficient(-1) * TAU
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::Contrast;

    #[test]
    fn ideal_click_gives_raised_cosine() {
        let mut g = GridPosterior::flat(256).unwrap();
        g.update(&ClickRecord::ideal(1, 0, 0.0)).unwrap();
        for n in 0..g.points() {
            let expect = (1.0 + g.phi(n).cos()) / TAU;
            assert!((g.values()[n] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_information_leaves_grid() {
        let mut g = GridPosterior::flat(64).unwrap();
        g.update(&ClickRecord::ideal(1, 1, 0.4)).unwrap();
        let before = g.clone();
        let click = ClickRecord {
            contrast: Contrast::new(0.6, 0.6).unwrap(),
            ..ClickRecord::ideal(-1, 2, 1.0)
        };
        g.update(&click).unwrap();
        for (a, b) in g.values().iter().zip(before.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn aliasing_guard() {
        let mut g = GridPosterior::flat(16).unwrap();
        g.update(&ClickRecord::ideal(1, 2, 0.0)).unwrap();
        assert!(g.update(&ClickRecord::ideal(1, 0, 0.0)).is_err());
    }
}
