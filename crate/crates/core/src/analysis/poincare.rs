use std::f64::consts::TAU;

use serde::Serialize;

use super::ode::{OdeOptions, Stepper};
use super::{AnalysisError, CycleFrame, NumericField};
use crate::config::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Interior => -1.0,
            Side::Exterior => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnOptions {
    /// Absolute ODE tolerance; relative is 100 times this.
    pub tol: f64,
    /// Expected period; kept for reporting, the integration runs in arc length.
    pub period_hint: f64,
    /// Distance from the cycle to anything else.
    pub clearance: f64,
}

impl ReturnOptions {
    /// Arc-length steps capped at a 64th of the circumference.
    fn ode(&self, r: f64) -> OdeOptions {
        OdeOptions { max_steps: 50_000, ..OdeOptions::from_tol(self.tol) }.with_h_max(TAU * r / 64.0)
    }

    /// Displacements below this are integration noise; the offset is
    /// integrated logarithmically, so its error is relative to `δ`.
    pub fn noise(&self, delta: f64) -> f64 {
        1e3 * self.tol * delta.abs()
    }
}

/// First return to the angle-0 ray, expressed for the forward map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnObservation {
    /// Signed radial offset of the starting point.
    pub delta: f64,
    /// Signed radial offset where the orbit came back.
    pub image: f64,
    /// Forward-map displacement `P(s) - s` for the pair.
    pub displacement: f64,
    pub return_time: f64,
    pub side: Side,
    pub direction: Direction,
}

impl ReturnObservation {
    /// Whether the forward flow moves toward the cycle on this side.
    pub fn attracting(&self) -> bool {
        match self.direction {
            Direction::Forward => self.image.abs() < self.delta.abs(),
            Direction::Backward => self.image.abs() > self.delta.abs(),
        }
    }

    pub fn stability(&self) -> Sign {
        if self.attracting() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }
}

fn unwrap(prev: f64, a: f64) -> f64 {
    a + TAU * ((prev - a) / TAU).round()
}

/// Integrates until the orbit has turned once around `center`; the first two
/// state components are the position. Leaves the radial band `|d - r| < band`
/// as `NoReturn`.
pub(crate) fn revolve<const D: usize>(
    rhs: &dyn Fn(&[f64; D]) -> [f64; D],
    y0: [f64; D],
    center: (f64, f64),
    r: f64,
    band: f64,
    ode: OdeOptions,
    s_max: f64,
) -> Result<([f64; D], f64), AnalysisError> {
    let (cx, cy) = center;
    let angle = |y: &[f64; D]| (y[1] - cy).atan2(y[0] - cx);
    let offset = |y: &[f64; D]| (y[0] - cx).hypot(y[1] - cy) - r;
    let v0 = rhs(&y0);
    let w = (y0[0] - cx) * v0[1] - (y0[1] - cy) * v0[0];
    if w == 0.0 || !w.is_finite() {
        return Err(AnalysisError::NoReturn(0.0));
    }
    let sense = w.signum();
    let phi0 = angle(&y0);
    let mut phi = phi0;
    let mut st = Stepper::new(rhs, y0, ode)?;
    loop {
        let step = st.step()?;
        let (mut lo, mut lo_phi) = (step.s0, phi);
        for j in 1..=4 {
            let s = if j == 4 { step.end() } else { step.s0 + step.h * j as f64 / 4.0 };
            let y = if j == 4 { st.y } else { step.at(s) };
            if offset(&y).abs() > band {
                return Err(AnalysisError::NoReturn(s));
            }
            let p = unwrap(lo_phi, angle(&y));
            if sense * (p - phi0) >= TAU {
                let (mut a, mut b) = (lo, s);
                for _ in 0..200 {
                    if b - a <= 1e-12 {
                        break;
                    }
                    let m = 0.5 * (a + b);
                    if sense * (unwrap(lo_phi, angle(&step.at(m))) - phi0) >= TAU {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                let t = 0.5 * (a + b);
                return Ok((step.at(t), t));
            }
            lo = s;
            lo_phi = p;
        }
        phi = lo_phi;
        if st.s > s_max {
            return Err(AnalysisError::NoReturn(s_max));
        }
    }
}

/// First return to the angle-0 ray from radius `r + δ`, integrating
/// `(z, φ, t)` in arc length with offset `u = δ e^z`. The normal velocity is
/// exactly proportional to `u`, so `z` has a bounded rate: the image keeps
/// its relative accuracy through any amount of contraction or expansion and
/// never crosses the cycle. Arc length removes the speed variation along the
/// cycle. Returns the image offset and the elapsed time.
fn polar_return(field: &NumericField, frame: &CycleFrame, delta: f64, sgn: f64, opts: &ReturnOptions) -> Result<(f64, f64), AnalysisError> {
    let (cx, cy) = frame.center;
    let r = frame.radius;
    let rhs = |y: &[f64; 3]| {
        let u = delta * y[0].exp();
        let rho = r + u;
        let (s, c) = y[1].sin_cos();
        let (a, b) = field.eval(cx + rho * c, cy + rho * s);
        let v = a.hypot(b);
        [sgn * frame.log_normal_rate(u, y[1]) / v, sgn * (b * c - a * s) / (v * rho), 1.0 / v]
    };
    let y0 = [0.0, 0.0, 0.0];
    let w0 = rhs(&y0);
    if !(w0[1].is_finite() && w0[1] != 0.0) {
        return Err(AnalysisError::NoReturn(0.0));
    }
    let sense = w0[1].signum();
    let band = opts.clearance / 2.0;
    let s_max = 20.0 * TAU * r;
    let mut st = Stepper::new(&rhs, y0, opts.ode(r))?;
    loop {
        let step = st.step()?;
        for j in 1..=4 {
            let s = if j == 4 { step.end() } else { step.s0 + step.h * j as f64 / 4.0 };
            let y = if j == 4 { st.y } else { step.at(s) };
            if (delta * y[0].exp()).abs() > band {
                return Err(AnalysisError::NoReturn(s));
            }
        }
        if sense * st.y[1] >= TAU {
            let (mut a, mut b) = (step.s0, step.end());
            for _ in 0..200 {
                if b - a <= 1e-13 * b.max(1.0) {
                    break;
                }
                let m = 0.5 * (a + b);
                if sense * step.at(m)[1] >= TAU {
                    b = m;
                } else {
                    a = m;
                }
            }
            let y = step.at(0.5 * (a + b));
            return Ok((delta * y[0].exp(), y[2]));
        }
        if st.s > s_max {
            return Err(AnalysisError::NoReturn(s_max));
        }
    }
}

/// First return from radius `r + δ` in a fixed time direction.
pub fn poincare_return_directed(
    field: &NumericField,
    frame: &CycleFrame,
    delta: f64,
    direction: Direction,
    opts: &ReturnOptions,
) -> Result<ReturnObservation, AnalysisError> {
    if !(delta != 0.0 && delta.abs() < opts.clearance / 2.0) {
        return Err(AnalysisError::TestCircleInvalid(format!("offset {delta} outside (0, clearance/2)")));
    }
    let sgn = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let (image, t) = polar_return(field, frame, delta, sgn, opts)?;
    let displacement = match direction {
        Direction::Forward => image - delta,
        Direction::Backward => delta - image,
    };
    let side = if delta < 0.0 { Side::Interior } else { Side::Exterior };
    Ok(ReturnObservation { delta, image, displacement, return_time: t, side, direction })
}

/// First return from radius `r + δ`, integrating in whichever time
/// direction keeps the orbit near the cycle (forward when it contracts).
pub fn poincare_return(field: &NumericField, frame: &CycleFrame, delta: f64, opts: &ReturnOptions) -> Result<ReturnObservation, AnalysisError> {
    let fwd = poincare_return_directed(field, frame, delta, Direction::Forward, opts);
    if let Ok(o) = &fwd {
        if o.attracting() {
            return fwd;
        }
    }
    match poincare_return_directed(field, frame, delta, Direction::Backward, opts) {
        Ok(b) => Ok(b),
        Err(e) => fwd.map_err(|_| e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityEstimate {
    pub interior: Sign,
    pub exterior: Sign,
    /// Whether each side's displacement cleared the noise floor.
    pub resolved: [bool; 2],
    pub multiplicity: Option<u32>,
    pub slope: Option<f64>,
    pub usable: usize,
    pub observations: Vec<ReturnObservation>,
}

/// Grows `δ` by 4 until the displacement clears the noise floor; a return
/// that leaves the band (transient excursions on strongly non-uniform
/// cycles) is retried closer in instead.
fn side_stability(field: &NumericField, frame: &CycleFrame, side: Side, opts: &ReturnOptions) -> Result<(ReturnObservation, bool), AnalysisError> {
    let mut delta = 1e-3 * opts.clearance;
    let mut shrunk = false;
    loop {
        let o = match poincare_return(field, frame, side.sign() * delta, opts) {
            Ok(o) => o,
            Err(e) => {
                if delta < 1e-7 * opts.clearance {
                    return Err(e);
                }
                delta /= 8.0;
                shrunk = true;
                continue;
            }
        };
        if o.displacement.abs() > opts.noise(o.delta) {
            return Ok((o, true));
        }
        if shrunk || 4.0 * delta > opts.clearance / 4.0 {
            return Ok((o, false));
        }
        delta *= 4.0;
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

/// Where the displacement is attributed. Near the identity the geometric mean
/// of preimage and image makes `cδ^2/(1 - cδ)`-type saturation exact for
/// `m = 2` and nearly so above; far from it (strong hyperbolic contraction)
/// the image is at the noise level and the start offset is used.
fn abscissa(o: &ReturnObservation, near_identity: bool) -> f64 {
    if near_identity {
        (o.delta * o.image).abs().sqrt()
    } else {
        o.delta.abs()
    }
}

/// Common slope with a separate intercept per side.
fn pooled_slope(groups: &[Vec<(f64, f64)>]) -> Option<(f64, usize)> {
    let (mut sxy, mut sxx, mut used) = (0.0, 0.0, 0);
    for g in groups.iter().filter(|g| g.len() >= 2) {
        let n = g.len() as f64;
        let mx = g.iter().map(|p| p.0).sum::<f64>() / n;
        let my = g.iter().map(|p| p.1).sum::<f64>() / n;
        for &(x, y) in g {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        used += g.len();
    }
    (used >= 4 && sxx > 0.0).then(|| (sxy / sxx, used))
}

/// Largest ladder start `0.05 · clearance · 2^{-j}`, `j ≤ 40`, at which the
/// return map is close to the identity on this side (`|displacement| < δ/4`),
/// so the leading-order power law governs the whole ladder. A strongly
/// contracting hyperbolic cycle never gets there, but its ratio `image/δ`
/// stops changing under halving; the map is then linear and the current
/// start is kept.
fn ladder_start(field: &NumericField, frame: &CycleFrame, side: Side, opts: &ReturnOptions) -> f64 {
    let mut delta = 0.05 * opts.clearance;
    let mut first_ok = None;
    let mut prev_ratio: Option<f64> = None;
    for _ in 0..=40 {
        if let Ok(o) = poincare_return(field, frame, side.sign() * delta, opts) {
            if o.displacement.abs() < 0.25 * delta {
                return delta;
            }
            let q = o.image / o.delta;
            if prev_ratio.is_some_and(|p| (q - p).abs() <= 1e-3 * q.abs().max(p.abs())) {
                return 2.0 * delta;
            }
            prev_ratio = Some(q);
            first_ok.get_or_insert(delta);
        }
        delta *= 0.5;
    }
    first_ok.unwrap_or(delta)
}

/// Interior and exterior stabilities from the displacement direction, and
/// (when `fit`) the multiplicity from the log-log slope of the displacement
/// over a ladder `δ_i = δ_0 · 2^{-i}`, `i = 0..6`, one intercept per side.
/// `δ_0` starts at `0.05 · clearance` and is halved until the return map is
/// near the identity.
pub fn estimate_stability_and_multiplicity(
    field: &NumericField,
    frame: &CycleFrame,
    opts: &ReturnOptions,
    fit: bool,
) -> Result<StabilityEstimate, AnalysisError> {
    let (inner, inner_ok) = side_stability(field, frame, Side::Interior, opts)?;
    let (outer, outer_ok) = side_stability(field, frame, Side::Exterior, opts)?;
    let mut observations = vec![inner, outer];
    let (mut multiplicity, mut slope, mut usable) = (None, None, 0);
    if fit {
        let mut groups = vec![Vec::new(), Vec::new()];
        for (g, side) in [Side::Interior, Side::Exterior].into_iter().enumerate() {
            let start = ladder_start(field, frame, side, opts);
            let mut obs = Vec::new();
            for i in 0..7 {
                let delta = side.sign() * start * 0.5f64.powi(i);
                if let Ok(o) = poincare_return(field, frame, delta, opts) {
                    obs.push(o);
                }
            }
            let near_identity = median(obs.iter().map(|o| (o.image / o.delta).abs()).collect()).is_some_and(|q| (0.5..2.0).contains(&q));
            for o in &obs {
                if o.displacement.abs() > opts.noise(o.delta) {
                    groups[g].push((abscissa(o, near_identity).ln(), o.displacement.abs().ln()));
                }
            }
            observations.extend(obs);
        }
        if let Some((s, n)) = pooled_slope(&groups) {
            slope = Some(s);
            usable = n;
            multiplicity = Some(s.round().max(1.0) as u32);
        } else {
            usable = groups.iter().map(Vec::len).sum();
        }
    }
    Ok(StabilityEstimate {
        interior: inner.stability(),
        exterior: outer.stability(),
        resolved: [inner_ok, outer_ok],
        multiplicity,
        slope,
        usable,
        observations,
    })
}
