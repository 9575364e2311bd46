use std::f64::consts::TAU;

use serde::Serialize;

use super::ode::OdeOptions;
use super::poincare::{poincare_return, revolve, ReturnOptions};
use super::quadrature::{circle_quadrature, circle_quadrature_atol, circle_quadrature_framed_atol, integrate_until};
use super::{AnalysisError, CycleFrame, NumericField};
use crate::config::{AugmentedConfiguration, Circle, Sign};
use crate::construct::{xt_polys, AuxiliaryBundle, VectorField};
use crate::ratpoly::{int, CompiledPoly, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodMeasurement {
    /// `∮ ds / |X|`
    pub quadrature: f64,
    /// Mean return time at `δ = ±1e-6`.
    pub ode: Option<f64>,
    pub discrepancy: Option<f64>,
}

fn speed(field: &NumericField, x: f64, y: f64) -> f64 {
    let (p, q) = field.eval(x, y);
    p.hypot(q)
}

pub fn measure_period(field: &NumericField, frame: &CycleFrame, opts: &ReturnOptions) -> Result<PeriodMeasurement, AnalysisError> {
    let quadrature = circle_quadrature(|x, y| 1.0 / speed(field, x, y), &frame.circle)?;
    let opts = ReturnOptions { period_hint: quadrature, ..*opts };
    let delta = 1e-6_f64.min(opts.clearance / 4.0);
    let ode = match (poincare_return(field, frame, -delta, &opts), poincare_return(field, frame, delta, &opts)) {
        (Ok(a), Ok(b)) => Some(0.5 * (a.return_time + b.return_time)),
        _ => None,
    };
    Ok(PeriodMeasurement { quadrature, ode, discrepancy: ode.map(|t| (t - quadrature).abs() / quadrature) })
}

/// `ℒ = ∮ div X / |X| ds` along the cycle. Vanishes identically on
/// non-hyperbolic cycles, hence the absolute floor.
pub fn divergence_period_integral(field: &NumericField, circle: &Circle) -> Result<f64, AnalysisError> {
    circle_quadrature_atol(|x, y| field.div.eval(x, y) / speed(field, x, y), circle, 1e-11)
}

/// `∮ ω / V` with `ω = -Q dx + P dy` on the counterclockwise circle
/// centered at `(cx, cy)` of radius `r`.
pub fn residue_integral_on(field: &NumericField, cx: f64, cy: f64, r: f64) -> Result<f64, AnalysisError> {
    if !(r > 0.0) {
        return Err(AnalysisError::TestCircleInvalid(format!("radius {r}")));
    }
    // the integrand is a quotient of large cancelling values, so its
    // rounding noise can exceed the relative target; 4π·1e-11 is ample
    circle_quadrature_framed_atol(
        |x, y, nx, ny| {
            let (p, q) = field.eval(x, y);
            (p * nx + q * ny) / field.v.eval(x, y)
        },
        cx,
        cy,
        r,
        RESIDUE_ATOL,
    )
}

pub const RESIDUE_ATOL: f64 = 1e-10;

/// Residue integral on the circle concentric with cycle `k` at radius
/// `r_k + ρ`, which must stay clear of every circle, center and hole.
pub fn residue_integral(field: &NumericField, aug: &AugmentedConfiguration, k: usize, rho: f64) -> Result<f64, AnalysisError> {
    let circle = &aug.circles()[k];
    let clearance = aug.clearance(k);
    if !(rho.abs() < clearance && rho != 0.0) {
        return Err(AnalysisError::TestCircleInvalid(format!("offset {rho} with clearance {clearance}")));
    }
    let (cx, cy) = circle.center_f64();
    residue_integral_on(field, cx, cy, circle.radius_f64() + rho)
}

/// Sign of the outward flux `∮ X·n ds` through the circle of radius
/// `r - ρ`; the interior stability is its negative.
pub fn flux_sign(field: &NumericField, circle: &Circle, rho: f64) -> Result<Sign, AnalysisError> {
    let r = circle.radius_f64() - rho;
    if !(rho > 0.0 && r > 0.0) {
        return Err(AnalysisError::TestCircleInvalid(format!("offset {rho}")));
    }
    let (cx, cy) = circle.center_f64();
    // only the sign is needed: stop once two estimates agree to 1%
    let flux = integrate_until(
        |t| {
            let (s, c) = t.sin_cos();
            let (p, q) = field.eval(cx + r * c, cy + r * s);
            r * (p * c + q * s)
        },
        0.0,
        TAU,
        |prev, cur, _| (cur - prev).abs() <= 0.01 * cur.abs(),
    )?;
    Sign::of(flux).ok_or_else(|| AnalysisError::TestCircleInvalid("zero flux".into()))
}

/// `τ_k` from the time of flight of the expanded polynomial `X_LR` around
/// cycle `k`, with `∫ dt / |S|` carried as a third state component.
pub fn tau_time_of_flight(v: &VectorField, k: usize, period: f64, tol: f64) -> Result<f64, AnalysisError> {
    let aug = &v.config;
    let circles = aug.circles();
    let idx = aug.index().map_err(|e| AnalysisError::TestCircleInvalid(e.to_string()))?;
    let ones = vec![1; circles.len()];
    let aux = AuxiliaryBundle::new(&circles, &ones, &idx);
    let lr = xt_polys(&aux, &vec![int(1); circles.len()], &vec![true; circles.len()]);
    let lr_num = NumericField::from_polys(&lr.p, &lr.q, &lr.v);
    let mults = v.multiplicities();
    let mut s = Poly::one();
    if v.mode.uses_multiplicity() {
        let lambda: u32 = mults.iter().map(|m| m - 1).sum();
        s = Poly::constant(int((lambda + u32::from(mults[k] == 1)) as i64));
        for (j, c) in circles.iter().enumerate() {
            if j != k && mults[j] > 1 {
                s = &s * &c.implicit().pow(mults[j] - 1);
            }
        }
    }
    if v.mode.has_holes() {
        let (_, l) = crate::construct::hole_factors(&aug.singular_points);
        s = &s * &l;
    }
    let s_num = CompiledPoly::new(&s);
    let circle = &circles[k];
    let (cx, cy) = circle.center_f64();
    let r = circle.radius_f64();
    let sgn = if divergence_period_integral(&lr_num, circle)? > 0.0 { -1.0 } else { 1.0 };
    // unit-speed parametrization, so the third component is ∫ dt / |S|
    let rhs = |y: &[f64; 3]| {
        let (a, b) = lr_num.eval(y[0], y[1]);
        let v = a.hypot(b);
        [sgn * a / v, sgn * b / v, 1.0 / (v * s_num.eval(y[0], y[1]).abs())]
    };
    let ode = OdeOptions::from_tol(tol).with_h_max(TAU * r / 64.0);
    let band = aug.clearance(k) / 2.0;
    let (y, _) = revolve(&rhs, [cx + r, cy, 0.0], (cx, cy), r, band, ode, 20.0 * TAU * r)?;
    Ok(y[2] / period)
}
