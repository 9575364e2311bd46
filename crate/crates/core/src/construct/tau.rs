use std::cell::Cell;

use super::{ConstructError, Mode};
use crate::analysis::quadrature::circle_quadrature;
use crate::config::AugmentedConfiguration;
use crate::ratpoly::{rationalize, Rational};

pub const TAU_RTOL: f64 = 1e-13;

/// Which factors multiply `X_LR` on a cycle for a given mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scaling {
    pub multiplicity: bool,
    pub holes: bool,
}

impl Scaling {
    pub fn for_mode(mode: Mode) -> Scaling {
        Scaling { multiplicity: mode.uses_multiplicity(), holes: mode.has_holes() }
    }
}

/// Closed-form factors of the field on cycle `k`, evaluated in floating point
/// from the circle data rather than from expanded polynomials.
#[derive(Debug, Clone)]
pub struct CycleFactors {
    centers: Vec<(f64, f64, f64)>,
    primaries: Vec<(f64, f64)>,
    holes: Vec<(f64, f64)>,
    multiplicities: Vec<u32>,
    big_lambda: u32,
    k: usize,
    scaling: Scaling,
}

impl CycleFactors {
    pub fn new(aug: &AugmentedConfiguration, multiplicities: &[u32], k: usize, scaling: Scaling) -> Result<Self, ConstructError> {
        let circles = aug.circles();
        let idx = aug.index()?;
        let centers = circles
            .iter()
            .map(|c| {
                let (x, y) = c.center_f64();
                (x, y, c.radius_f64())
            })
            .collect();
        let primaries = idx.primaries().map(|j| circles[j].center_f64()).collect();
        Ok(CycleFactors {
            centers,
            primaries,
            holes: if scaling.holes { aug.singular_points_f64() } else { Vec::new() },
            multiplicities: multiplicities.to_vec(),
            big_lambda: multiplicities.iter().map(|m| m - 1).sum(),
            k,
            scaling,
        })
    }

    fn f(&self, j: usize, x: f64, y: f64) -> f64 {
        let (cx, cy, r) = self.centers[j];
        let d = (x - cx).hypot(y - cy);
        (d - r) * (d + r)
    }

    fn b_mu(&self, x: f64, y: f64) -> f64 {
        let b: f64 = self.primaries.iter().map(|&(a, c)| (x - a).powi(2) + (y - c).powi(2)).product();
        let mu: f64 = (0..self.centers.len()).filter(|&j| j != self.k).map(|j| self.f(j, x, y)).product();
        b * mu
    }

    /// `|X_LR| = |B μ_k| · 2 r_k` on the cycle.
    pub fn lr_speed(&self, x: f64, y: f64) -> f64 {
        self.b_mu(x, y).abs() * 2.0 * self.centers[self.k].2
    }

    /// `X_LR = B μ_k (-∂f_k/∂y, ∂f_k/∂x)` on the cycle.
    pub fn lr_vector(&self, x: f64, y: f64) -> (f64, f64) {
        let (cx, cy, _) = self.centers[self.k];
        let w = self.b_mu(x, y);
        (-2.0 * w * (y - cy), 2.0 * w * (x - cx))
    }

    /// The factor `S` with `X|_{C_k} = τ_k S X_LR|_{C_k}`.
    pub fn scale(&self, x: f64, y: f64) -> f64 {
        let mut s = 1.0;
        if self.scaling.multiplicity {
            let lead = self.big_lambda + u32::from(self.multiplicities[self.k] == 1);
            s *= lead as f64;
            for (j, &m) in self.multiplicities.iter().enumerate() {
                if j != self.k && m > 1 {
                    s *= self.f(j, x, y).powi(m as i32 - 1);
                }
            }
        }
        for &(a, b) in &self.holes {
            s *= (x - a).powi(2) + (y - b).powi(2);
        }
        s
    }
}

/// `τ_k = (1/T_k) ∮_{C_k} ds / (|X_LR| |S|)`, rounded to a rational.
pub fn compute_tau(aug: &AugmentedConfiguration, multiplicities: &[u32], k: usize, mode: Mode, period: f64) -> Result<Rational, ConstructError> {
    if !(period.is_finite() && period > 0.0) {
        return Err(ConstructError::InvalidPeriod(k, period));
    }
    let factors = CycleFactors::new(aug, multiplicities, k, Scaling::for_mode(mode))?;
    let circle = &aug.circles()[k];
    let degenerate = Cell::new(false);
    let integral = circle_quadrature(
        |x, y| {
            let w = factors.lr_speed(x, y) * factors.scale(x, y).abs();
            if !(w.is_finite() && w > 0.0) {
                degenerate.set(true);
            }
            1.0 / w
        },
        circle,
    );
    if degenerate.get() {
        return Err(ConstructError::ScalingVanishesOnCycle(k));
    }
    let integral = integral?;
    rationalize(integral / period, TAU_RTOL).ok_or(ConstructError::Rationalize(k))
}
