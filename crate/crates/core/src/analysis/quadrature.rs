use std::f64::consts::PI;
use std::sync::OnceLock;

use super::AnalysisError;
use crate::config::Circle;

const ORDER: usize = 16;
const START_PANELS: usize = 8;
const MAX_PANELS: usize = 1 << 15;
pub const QUADRATURE_RTOL: f64 = 1e-13;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton on P_n.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let k = k as f64;
                        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn composite(g: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> (f64, f64) {
    let rule = gauss_legendre();
    let h = (b - a) / panels as f64;
    let (mut sum, mut abs) = (0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let (mut s, mut sa) = (0.0, 0.0);
        for &(x, w) in rule {
            let v = g(mid + 0.5 * h * x);
            s += w * v;
            sa += w * v.abs();
        }
        sum += s;
        abs += sa;
    }
    (0.5 * h * sum, 0.5 * h * abs)
}

/// `∫_a^b g` by composite Gauss-Legendre, doubling the panel count until two
/// successive estimates agree to `QUADRATURE_RTOL` relative to `∫|g|`.
pub fn integrate(g: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64, AnalysisError> {
    integrate_atol(g, a, b, 0.0)
}

/// As [`integrate`], also accepting agreement within `atol`; needed when the
/// integrand is pure rounding noise around zero.
pub fn integrate_atol(g: impl Fn(f64) -> f64, a: f64, b: f64, atol: f64) -> Result<f64, AnalysisError> {
    integrate_until(g, a, b, |prev, cur, scale| (cur - prev).abs() <= (QUADRATURE_RTOL * scale).max(atol).max(f64::MIN_POSITIVE))
}

/// Panel doubling with a caller-supplied acceptance test on
/// `(previous, current, ∫|g|)`.
pub fn integrate_until(g: impl Fn(f64) -> f64, a: f64, b: f64, accept: impl Fn(f64, f64, f64) -> bool) -> Result<f64, AnalysisError> {
    let mut panels = START_PANELS;
    let (mut prev, _) = composite(&g, a, b, panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let (cur, scale) = composite(&g, a, b, panels);
        if !cur.is_finite() {
            return Err(AnalysisError::NonFinite("quadrature integrand".into()));
        }
        if accept(prev, cur, scale) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(AnalysisError::QuadratureNotConverged)
}

/// `∮ g ds` along a circle, `g` taking the point on the circle.
pub fn circle_quadrature(g: impl Fn(f64, f64) -> f64, circle: &Circle) -> Result<f64, AnalysisError> {
    let (cx, cy) = circle.center_f64();
    let r = circle.radius_f64();
    circle_quadrature_framed(|x, y, _, _| g(x, y), cx, cy, r)
}

/// `∮ g ds` with an absolute convergence floor.
pub fn circle_quadrature_atol(g: impl Fn(f64, f64) -> f64, circle: &Circle, atol: f64) -> Result<f64, AnalysisError> {
    let (cx, cy) = circle.center_f64();
    let r = circle.radius_f64();
    integrate_atol(
        |t| {
            let (s, c) = t.sin_cos();
            r * g(cx + r * c, cy + r * s)
        },
        0.0,
        2.0 * PI,
        atol,
    )
}

/// `∮ g ds` where `g` also receives the unit outward normal.
pub fn circle_quadrature_framed(g: impl Fn(f64, f64, f64, f64) -> f64, cx: f64, cy: f64, r: f64) -> Result<f64, AnalysisError> {
    circle_quadrature_framed_atol(g, cx, cy, r, 0.0)
}

/// As [`circle_quadrature_framed`] with an absolute convergence floor.
pub fn circle_quadrature_framed_atol(g: impl Fn(f64, f64, f64, f64) -> f64, cx: f64, cy: f64, r: f64, atol: f64) -> Result<f64, AnalysisError> {
    integrate_atol(
        |t| {
            let (s, c) = t.sin_cos();
            r * g(cx + r * c, cy + r * s, c, s)
        },
        0.0,
        2.0 * PI,
        atol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::int;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let v = integrate(|x| x.powi(31) + 3.0 * x.powi(2), -1.0, 1.0).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn unit_circle_basics() {
        let c = Circle::new(int(0), int(0), int(1));
        assert_relative_eq!(circle_quadrature(|_, _| 1.0, &c).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert!(circle_quadrature(|x, _| x, &c).unwrap().abs() < 1e-14);
    }

    #[test]
    fn framed_normal_flux_of_radial_field() {
        // (x, y) has flux 2 * area through a circle of radius 2
        let v = circle_quadrature_framed(|x, y, nx, ny| x * nx + y * ny, 0.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(v, 8.0 * PI, max_relative = 1e-13);
    }
}
