//! Verification of a constructed field against its prescriptions: exact
//! symbolic certificates plus numerical measurements, joined into a report
//! whose pass flag is the conjunction of every check.

mod symbolic;

use std::f64::consts::PI;

use serde::Serialize;

pub use symbolic::{
    check_degree_bound, check_inverse_integrating_factor, check_nonvanishing_on_cycles, check_restriction_identity, check_tangency,
    check_vanishing_orders, iif_residual, stated_degree_bound,
};

use crate::analysis::quadrature::circle_quadrature;
use crate::analysis::{
    divergence_period_integral, estimate_stability_and_multiplicity, flux_sign, measure_period, residue_integral, tau_time_of_flight,
    AnalysisError, NumericField, ReturnOptions,
};
use crate::config::{expected_stability, expected_stability_hyperbolic, AugmentationCounts, Configuration, Sign};
use crate::construct::{Mode, VectorField};
use crate::ratpoly::{format_fraction, to_f64};

/// Multiplicities up to this are fitted numerically; above it the symbolic
/// vanishing order decides.
pub const MAX_FITTED_MULTIPLICITY: u32 = 3;
pub const SLOPE_TOLERANCE: f64 = 0.25;
pub const TAU_ORACLE_RTOL: f64 = 1e-8;

/// The time-of-flight oracle runs two decades tighter than the return maps,
/// since its error accumulates over a whole revolution.
pub fn oracle_tol(tol_ode: f64) -> f64 {
    (tol_ode * 1e-2).max(1e-15)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Absolute ODE tolerance (relative is 100 times this).
    pub tol_ode: f64,
    /// Relative period tolerance and absolute tolerance on the integral
    /// identities.
    pub tol_report: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol_ode: 1e-12, tol_report: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub circle: Option<usize>,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn global(name: &str, pass: bool, detail: String) -> Check {
        Check { name: name.into(), circle: None, pass, detail }
    }

    pub fn circle(name: &str, k: usize, pass: bool, detail: String) -> Check {
        Check { name: name.into(), circle: Some(k), pass, detail }
    }
}

/// What the mode is meant to realize on a cycle: periods only in modes that
/// prescribe them, multiplicities only in modes that use them, and the
/// requested interior stability always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prescription {
    pub period: Option<f64>,
    pub multiplicity: u32,
    pub interior_stability: Sign,
    pub exterior_stability: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Requested {
    pub period: f64,
    pub multiplicity: u32,
    pub interior_stability: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodReport {
    pub quadrature: Option<f64>,
    pub ode: Option<f64>,
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub interior: Option<Sign>,
    pub exterior: Option<Sign>,
    pub resolved: Option<[bool; 2]>,
    /// The closed-form stability of a field without helper circles.
    pub formula: Option<Sign>,
    pub flux_sign: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub vanishing_order: Option<u32>,
    pub slope: Option<f64>,
    pub estimate: Option<u32>,
    pub usable: usize,
    /// `numeric`, or `indeterminate-numeric` when the symbolic order decides.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralReport {
    pub value: Option<f64>,
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauReport {
    pub exact: String,
    pub value: f64,
    pub time_of_flight: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub index: usize,
    pub requested: Requested,
    pub effective: Prescription,
    pub clearance: f64,
    pub period: PeriodReport,
    pub stability: StabilityReport,
    pub multiplicity: MultiplicityReport,
    pub residue: IntegralReport,
    pub divergence: IntegralReport,
    pub tau: Option<TauReport>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub remark_optimization: bool,
    pub counts: AugmentationCounts,
    pub primary_count: Option<u32>,
    pub degree: u32,
    pub degree_bound: u32,
    pub tolerances: VerifyOptions,
    pub symbolic: Vec<Check>,
    pub cycles: Vec<CycleReport>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.symbolic.iter().chain(self.cycles.iter().flat_map(|c| c.checks.iter())).filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn sign_name(s: Option<Sign>) -> String {
    s.map_or("none".into(), |s| format!("{:+}", s.value()))
}

/// The stability formula of the non-augmented constructions.
fn formula_stability(v: &VectorField, k: usize) -> Option<Sign> {
    if v.config.mode.is_some() {
        return None;
    }
    let idx = v.index().ok()?;
    match v.mode {
        Mode::LR | Mode::T => Some(expected_stability_hyperbolic(&idx, k)),
        Mode::M | Mode::Tm => Some(expected_stability(&idx, &v.multiplicities(), k)),
        Mode::Ts | Mode::Full => None,
    }
}

fn err_check(name: &str, k: usize, e: &AnalysisError) -> Check {
    Check::circle(name, k, false, format!("measurement failed: {e}"))
}

fn verify_cycle(v: &VectorField, field: &NumericField, base: &Configuration, k: usize, opts: &VerifyOptions) -> CycleReport {
    let spec = &base.cycles[k];
    let circle = &spec.circle;
    let mults = v.multiplicities();
    let m = mults[k];
    let nu = spec.interior_stability;
    let effective = Prescription {
        period: v.mode.prescribes_period().then_some(spec.period),
        multiplicity: m,
        interior_stability: nu,
        exterior_stability: Sign::parity(m + 1).times(nu),
    };
    let clearance = v.config.clearance(k);
    let idx = v.config.index().ok();
    let contained = idx.as_ref().map(|i| i.entries[k].contained_primaries);
    let mut checks = Vec::new();
    let ropts = ReturnOptions { tol: opts.tol_ode, period_hint: spec.period, clearance };
    let frame = field.frame(circle);

    // period
    let mut period = PeriodReport { quadrature: None, ode: None, discrepancy: None };
    match frame.as_ref().map_err(Clone::clone).and_then(|f| measure_period(field, f, &ropts)) {
        Ok(p) => {
            period = PeriodReport { quadrature: Some(p.quadrature), ode: p.ode, discrepancy: p.discrepancy };
            if let Some(t) = effective.period {
                let rel = (p.quadrature - t).abs() / t;
                checks.push(Check::circle("period", k, rel <= opts.tol_report, format!("quadrature {} against {t}, relative {rel:e}", p.quadrature)));
            }
            let ok = p.discrepancy.is_some_and(|d| d <= opts.tol_report);
            checks.push(Check::circle("period_ode", k, ok, format!("return time {:?}, discrepancy {:?}", p.ode, p.discrepancy)));
        }
        Err(e) => checks.push(err_check("period", k, &e)),
    }

    // stability and multiplicity
    let formula = formula_stability(v, k);
    let mut stability = StabilityReport { interior: None, exterior: None, resolved: None, formula, flux_sign: None };
    let order = v.v.vanishing_order(&circle.implicit()).ok();
    let fit = m <= MAX_FITTED_MULTIPLICITY;
    let mut multiplicity = MultiplicityReport {
        vanishing_order: order,
        slope: None,
        estimate: None,
        usable: 0,
        status: if fit { "numeric".into() } else { "indeterminate-numeric".into() },
    };
    let ropts_hint = ReturnOptions { period_hint: period.quadrature.unwrap_or(spec.period), ..ropts };
    match frame.as_ref().map_err(Clone::clone).and_then(|f| estimate_stability_and_multiplicity(field, f, &ropts_hint, fit)) {
        Ok(est) => {
            stability.interior = Some(est.interior);
            stability.exterior = Some(est.exterior);
            stability.resolved = Some(est.resolved);
            let ok = est.resolved == [true, true] && est.interior == nu && est.exterior == effective.exterior_stability;
            checks.push(Check::circle(
                "stability",
                k,
                ok,
                format!(
                    "measured interior {} exterior {} (resolved {:?}), requested {} {}",
                    sign_name(Some(est.interior)),
                    sign_name(Some(est.exterior)),
                    est.resolved,
                    sign_name(Some(nu)),
                    sign_name(Some(effective.exterior_stability))
                ),
            ));
            if let Some(f) = formula {
                let ok = est.interior == f && est.exterior == Sign::parity(m + 1).times(f);
                checks.push(Check::circle("stability_formula", k, ok, format!("closed form {}, measured {}", sign_name(Some(f)), sign_name(Some(est.interior)))));
            }
            multiplicity.slope = est.slope;
            multiplicity.estimate = est.multiplicity;
            multiplicity.usable = est.usable;
            if fit {
                let ok = est.slope.is_some_and(|s| (s - m as f64).abs() <= SLOPE_TOLERANCE);
                checks.push(Check::circle("multiplicity_fit", k, ok, format!("slope {:?} from {} points, expected {m}", est.slope, est.usable)));
            }
        }
        Err(e) => {
            checks.push(err_check("stability", k, &e));
            if fit {
                checks.push(err_check("multiplicity_fit", k, &e));
            }
        }
    }
    checks.push(Check::circle("multiplicity_symbolic", k, order == Some(m), format!("vanishing order {order:?}, expected {m}")));

    // flux through the interior test circle
    match flux_sign(field, circle, clearance / 2.0) {
        Ok(f) => {
            stability.flux_sign = Some(f);
            let ok = f.flip() == nu;
            checks.push(Check::circle("flux_sign", k, ok, format!("flux {}, interior stability {}", sign_name(Some(f)), sign_name(Some(nu)))));
        }
        Err(e) => checks.push(err_check("flux_sign", k, &e)),
    }

    // residue integral on the outer concentric test circle
    let expected_residue = contained.map(|s| 4.0 * PI * s as f64);
    let mut residue = IntegralReport { value: None, expected: expected_residue };
    match residue_integral(field, &v.config, k, clearance / 2.0) {
        Ok(val) => {
            residue.value = Some(val);
            let ok = expected_residue.is_some_and(|e| (val.abs() - e).abs() <= opts.tol_report);
            checks.push(Check::circle("residue", k, ok, format!("{val} against ±{expected_residue:?}")));
        }
        Err(e) => checks.push(err_check("residue", k, &e)),
    }

    // divergence integral: closed form in mode T, sign (or vanishing) elsewhere
    let mut divergence = IntegralReport { value: None, expected: None };
    match divergence_period_integral(field, circle) {
        Ok(val) => {
            divergence.value = Some(val);
            if v.mode == Mode::T {
                let expected = formula.zip(contained).map(|(f, s)| f.value() as f64 * 4.0 * PI * s as f64 / to_f64(&v.tau[k]));
                divergence.expected = expected;
                let ok = expected.is_some_and(|e| (val - e).abs() <= opts.tol_report);
                checks.push(Check::circle("divergence", k, ok, format!("{val} against {expected:?}")));
            } else if m == 1 {
                let ok = Sign::of(val) == Some(nu);
                checks.push(Check::circle("divergence_sign", k, ok, format!("{val}, sign should be {}", sign_name(Some(nu)))));
            } else {
                divergence.expected = Some(0.0);
                let scale = circle_quadrature(|x, y| field.div.eval(x, y).abs() / field.eval(x, y).0.hypot(field.eval(x, y).1), circle).unwrap_or(f64::INFINITY);
                let ok = val.abs() <= opts.tol_report * scale.max(1.0);
                checks.push(Check::circle("divergence_vanishes", k, ok, format!("{val} against scale {scale:e}")));
            }
        }
        Err(e) => checks.push(err_check("divergence", k, &e)),
    }

    // τ against its time-of-flight oracle
    let tau = v.mode.prescribes_period().then(|| {
        let value = to_f64(&v.tau[k]);
        let tof = tau_time_of_flight(v, k, spec.period, oracle_tol(opts.tol_ode));
        let rel = tof.as_ref().ok().map(|t| (t - value).abs() / value);
        checks.push(match &tof {
            Ok(t) => Check::circle("tau_oracle", k, rel.is_some_and(|r| r <= TAU_ORACLE_RTOL), format!("quadrature {value}, time of flight {t}")),
            Err(e) => err_check("tau_oracle", k, e),
        });
        TauReport { exact: format_fraction(&v.tau[k]), value, time_of_flight: tof.ok(), relative_error: rel }
    });

    let pass = checks.iter().all(|c| c.pass);
    CycleReport {
        index: k,
        requested: Requested { period: spec.period, multiplicity: spec.multiplicity, interior_stability: nu },
        effective,
        clearance,
        period,
        stability,
        multiplicity,
        residue,
        divergence,
        tau,
        checks,
        pass,
    }
}

/// Symbolic checks only; cheap enough for whole-corpus sweeps.
pub fn symbolic_checks(v: &VectorField, field: &NumericField) -> Vec<Check> {
    let mut out = vec![check_inverse_integrating_factor(v), check_degree_bound(v)];
    out.extend(check_vanishing_orders(v));
    out.extend(check_tangency(v));
    out.extend(check_nonvanishing_on_cycles(v, field));
    out.extend(check_restriction_identity(v, field));
    out
}

/// Runs every symbolic check and every per-cycle measurement. Measurement
/// failures become failed checks.
pub fn assemble_report(v: &VectorField, opts: &VerifyOptions) -> VerificationReport {
    let field = NumericField::new(v);
    let symbolic = symbolic_checks(v, &field);
    let base = &v.config.base;
    let cycles: Vec<CycleReport> = (0..base.len()).map(|k| verify_cycle(v, &field, base, k, opts)).collect();
    let pass = symbolic.iter().all(|c| c.pass) && cycles.iter().all(|c| c.pass);
    VerificationReport {
        mode: v.mode,
        remark_optimization: v.remark_optimization,
        counts: v.config.counts,
        primary_count: v.config.index().ok().map(|i| i.primary_count),
        degree: v.degree(),
        degree_bound: v.degree_bound,
        tolerances: *opts,
        symbolic,
        cycles,
        pass,
    }
}
