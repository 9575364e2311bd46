//! Floating-point dynamics of constructed fields: circle quadrature, adaptive
//! integration, Poincaré returns, and the integral identities on cycles.

mod integrals;
pub mod ode;
mod poincare;
pub mod quadrature;

pub use integrals::{divergence_period_integral, flux_sign, measure_period, residue_integral, residue_integral_on, tau_time_of_flight, PeriodMeasurement};
pub use ode::{integrate_orbit, DenseStep, IntegratorStats, OdeOptions, Stepper, Trajectory};
pub use poincare::{
    estimate_stability_and_multiplicity, poincare_return, poincare_return_directed, Direction, ReturnObservation, ReturnOptions, Side, StabilityEstimate,
};
pub use quadrature::{circle_quadrature, circle_quadrature_framed};

use crate::config::Circle;
use crate::construct::VectorField;
use crate::ratpoly::{CompiledPoly, Poly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("quadrature did not converge within the panel cap")]
    QuadratureNotConverged,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("step size underflow at elapsed time {s}")]
    StepUnderflow { s: f64 },
    #[error("non-finite state")]
    NonFiniteState,
    #[error("step limit {0} exceeded")]
    TooManySteps(usize),
    #[error("no return to the section within time {0}")]
    NoReturn(f64),
    #[error("fewer than 4 usable observations for the multiplicity fit")]
    Indeterminate,
    #[error("test circle is invalid: {0}")]
    TestCircleInvalid(String),
    #[error("circle is not invariant under the field")]
    NotInvariant,
}

/// `P`, `Q` and `div X` compiled for double-double evaluation.
#[derive(Debug, Clone)]
pub struct NumericField {
    pub p: CompiledPoly,
    pub q: CompiledPoly,
    pub div: CompiledPoly,
    pub v: CompiledPoly,
    exact: (Poly, Poly),
}

/// An invariant circle with the exact quotient `R = (P f_x + Q f_y) / f`, so
/// that the normal velocity near it is `f · R / |∇f|` with `f` computed from
/// the radial offset rather than by cancellation.
#[derive(Debug, Clone)]
pub struct CycleFrame {
    pub circle: Circle,
    pub center: (f64, f64),
    pub radius: f64,
    normal: CompiledPoly,
}

impl CycleFrame {
    /// Normal velocity divided by the offset, at radius `r + u` and angle `φ`.
    pub fn log_normal_rate(&self, u: f64, phi: f64) -> f64 {
        let rho = self.radius + u;
        let (s, c) = phi.sin_cos();
        (2.0 * self.radius + u) * self.normal.eval(self.center.0 + rho * c, self.center.1 + rho * s) / (2.0 * rho)
    }
}

impl NumericField {
    pub fn new(v: &VectorField) -> Self {
        Self::from_polys(&v.p, &v.q, &v.v)
    }

    pub fn from_polys(p: &Poly, q: &Poly, v: &Poly) -> Self {
        NumericField {
            p: CompiledPoly::new(p),
            q: CompiledPoly::new(q),
            div: CompiledPoly::new(&(&p.diff_x() + &q.diff_y())),
            v: CompiledPoly::new(v),
            exact: (p.clone(), q.clone()),
        }
    }

    pub fn frame(&self, circle: &Circle) -> Result<CycleFrame, AnalysisError> {
        let f = circle.implicit();
        let flux = &(&self.exact.0 * &f.diff_x()) + &(&self.exact.1 * &f.diff_y());
        let normal = match flux.exact_divide(&f) {
            Ok(Some(r)) => r,
            _ => return Err(AnalysisError::NotInvariant),
        };
        Ok(CycleFrame { circle: circle.clone(), center: circle.center_f64(), radius: circle.radius_f64(), normal: CompiledPoly::new(&normal) })
    }

    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }

    pub fn rhs(&self) -> impl Fn(f64, f64) -> (f64, f64) + '_ {
        move |x, y| self.eval(x, y)
    }
}
