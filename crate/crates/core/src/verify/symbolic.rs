use std::f64::consts::TAU;

use crate::analysis::NumericField;
use crate::config::validate_configuration;
use crate::construct::{CycleFactors, Mode, Scaling, VectorField};
use crate::ratpoly::{to_f64, Poly};

use super::Check;

/// `P V_x + Q V_y - V (P_x + Q_y)`, expanded exactly.
pub fn iif_residual(p: &Poly, q: &Poly, v: &Poly) -> Poly {
    let lhs = &(p * &v.diff_x()) + &(q * &v.diff_y());
    let div = &p.diff_x() + &q.diff_y();
    &lhs - &(v * &div)
}

pub fn check_inverse_integrating_factor(v: &VectorField) -> Check {
    let r = iif_residual(&v.p, &v.q, &v.v);
    let detail = if r.is_zero() { "residual is the zero polynomial".to_string() } else { format!("residual has {} nonzero terms", r.len()) };
    Check::global("inverse_integrating_factor", r.is_zero(), detail)
}

/// The strict degree bound of each construction, from the base
/// configuration alone: `n` cycles, `r` primaries, `N` circles after
/// augmentation.
pub fn stated_degree_bound(v: &VectorField) -> Option<u32> {
    let base = &v.config.base;
    let r = validate_configuration(base).ok()?.primary_count;
    let n = base.len() as u32;
    let big_n = v.config.circles().len() as u32;
    let sum_m = base.total_multiplicity();
    Some(match v.mode {
        Mode::LR | Mode::T => 2 * (n + r),
        Mode::M | Mode::Tm => 2 * (r + sum_m),
        Mode::Ts => 2 * (3 * n + r),
        Mode::Full => 2 * (2 * (big_n - n) + r + sum_m),
    })
}

pub fn check_degree_bound(v: &VectorField) -> Check {
    let d = v.degree();
    match stated_degree_bound(v) {
        Some(b) => Check::global("degree_bound", d < b && v.degree_bound == b, format!("degree {d} against strict bound {b} (recorded {})", v.degree_bound)),
        None => Check::global("degree_bound", false, "base configuration is invalid".into()),
    }
}

/// `vanishing_order(V, f_k)` equals the effective multiplicity of every base
/// cycle and 1 on every helper circle.
pub fn check_vanishing_orders(v: &VectorField) -> Vec<Check> {
    let mults = v.multiplicities();
    v.config
        .circles()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let expected = mults[k];
            match v.v.vanishing_order(&c.implicit()) {
                Ok(o) => Check::circle("vanishing_order", k, o == expected, format!("order {o}, expected {expected}")),
                Err(e) => Check::circle("vanishing_order", k, false, e.to_string()),
            }
        })
        .collect()
}

/// `f_k` divides `P ∂f_k/∂x + Q ∂f_k/∂y` for every circle.
pub fn check_tangency(v: &VectorField) -> Vec<Check> {
    v.config
        .circles()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let f = c.implicit();
            let flux = &(&v.p * &f.diff_x()) + &(&v.q * &f.diff_y());
            let ok = matches!(flux.exact_divide(&f), Ok(Some(_)));
            Check::circle("tangency", k, ok, if ok { "f divides X·∇f".into() } else { "f does not divide X·∇f".into() })
        })
        .collect()
}

/// Samples the tangential scalar `s` with `X = s (-f_y, f_x)` at
/// `4 · degree_bound + 1` angles. Base cycles need a uniform sign and
/// `min |s| > 1e-9 max |s|`. Helper circles of a field with holes must
/// vanish there (homoclinic loops through the singular points).
pub fn check_nonvanishing_on_cycles(v: &VectorField, field: &NumericField) -> Vec<Check> {
    let samples = 4 * v.degree_bound as usize + 1;
    let n = v.config.n();
    v.config
        .circles()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let (cx, cy) = c.center_f64();
            let r = c.radius_f64();
            let values: Vec<(f64, f64)> = (0..samples)
                .map(|i| {
                    let th = TAU * i as f64 / samples as f64;
                    let (x, y) = (cx + r * th.cos(), cy + r * th.sin());
                    let (p, q) = field.eval(x, y);
                    let (fx, fy) = (2.0 * (x - cx), 2.0 * (y - cy));
                    (th, (q * fx - p * fy) / (fx * fx + fy * fy))
                })
                .collect();
            let max = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
            let offending = values.iter().find(|v| !(v.1.abs() > 1e-9 * max) || v.1.signum() != values[0].1.signum());
            let nonvanishing = max > 0.0 && offending.is_none();
            let detail = match offending {
                Some((th, s)) => format!("tangential scalar {s:e} at angle {th:.6} (max {max:e})"),
                None => format!("uniform sign over {samples} samples, max {max:e}"),
            };
            if k < n {
                Check::circle("nonvanishing_on_cycle", k, nonvanishing, detail)
            } else if v.mode.has_holes() {
                Check::circle("homoclinic_helper", k, !nonvanishing, detail)
            } else {
                Check::circle("nonvanishing_on_cycle", k, nonvanishing, detail)
            }
        })
        .collect()
}

/// At 64 points of each base cycle the field equals `τ_k S X_LR` computed in
/// closed form, within `1e-9` relative.
pub fn check_restriction_identity(v: &VectorField, field: &NumericField) -> Vec<Check> {
    let mults = v.multiplicities();
    let scaling = Scaling::for_mode(v.mode);
    (0..v.config.n())
        .map(|k| {
            let factors = match CycleFactors::new(&v.config, &mults, k, scaling) {
                Ok(f) => f,
                Err(e) => return Check::circle("restriction_identity", k, false, e.to_string()),
            };
            let tau = to_f64(&v.tau[k]);
            let c = &v.config.circles()[k];
            let worst = (0..64)
                .map(|i| {
                    let (x, y) = c.point_at(TAU * i as f64 / 64.0);
                    let (p, q) = field.eval(x, y);
                    let (a, b) = factors.lr_vector(x, y);
                    let w = tau * factors.scale(x, y);
                    let (ea, eb) = (w * a, w * b);
                    (p - ea).hypot(q - eb) / ea.hypot(eb)
                })
                .fold(0.0, f64::max);
            Check::circle("restriction_identity", k, worst <= 1e-9, format!("max relative deviation {worst:e}"))
        })
        .collect()
}
