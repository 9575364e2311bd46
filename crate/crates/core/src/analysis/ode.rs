use std::io::Write;

use super::AnalysisError;

// Dormand-Prince 5(4) tableau; the nodes c_i are not needed for autonomous systems
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    /// Absolute tolerance `tol`, relative `100 tol`.
    pub fn from_tol(tol: f64) -> Self {
        OdeOptions { atol: tol, rtol: 100.0 * tol, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }

    pub fn with_h_max(mut self, h: f64) -> Self {
        self.h_max = h;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const D: usize> {
    pub s0: f64,
    pub h: f64,
    rcont: [[f64; D]; 5],
}

impl<const D: usize> DenseStep<D> {
    pub fn end(&self) -> f64 {
        self.s0 + self.h
    }

    pub fn at(&self, s: f64) -> [f64; D] {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

/// Adaptive Dormand-Prince 5(4) with PI step control for autonomous
/// systems, integrated in elapsed time `s >= 0`; backward time is handled
/// by the caller negating the right-hand side.
pub struct Stepper<'a, const D: usize> {
    rhs: &'a dyn Fn(&[f64; D]) -> [f64; D],
    pub s: f64,
    pub y: [f64; D],
    k1: [f64; D],
    h: f64,
    facold: f64,
    opts: OdeOptions,
    pub stats: IntegratorStats,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

impl<'a, const D: usize> Stepper<'a, D> {
    pub fn new(rhs: &'a dyn Fn(&[f64; D]) -> [f64; D], y0: [f64; D], opts: OdeOptions) -> Result<Self, AnalysisError> {
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFiniteState);
        }
        let k1 = rhs(&y0);
        let mut st = Stepper { rhs, s: 0.0, y: y0, k1, h: 0.0, facold: 1e-4, opts, stats: IntegratorStats { evaluations: 1, ..Default::default() } };
        st.h = st.initial_step();
        Ok(st)
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    fn norm(&self, v: &[f64; D], y: &[f64; D], z: &[f64; D]) -> f64 {
        let s: f64 = (0..D).map(|i| (v[i] / self.scale(y[i], z[i])).powi(2)).sum();
        (s / D as f64).sqrt()
    }

    fn initial_step(&mut self) -> f64 {
        let d0 = self.norm(&self.y, &self.y, &self.y);
        let d1 = self.norm(&self.k1, &self.y, &self.y);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.opts.h_max);
        let y1 = axpy(&self.y, h0, &[(1.0, &self.k1)]);
        let k2 = (self.rhs)(&y1);
        self.stats.evaluations += 1;
        let diff: [f64; D] = std::array::from_fn(|i| k2[i] - self.k1[i]);
        let d2 = self.norm(&diff, &self.y, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(self.opts.h_max)
    }

    /// Advances one accepted step.
    pub fn step(&mut self) -> Result<DenseStep<D>, AnalysisError> {
        let f = self.rhs;
        loop {
            if self.stats.steps + self.stats.rejected >= self.opts.max_steps {
                return Err(AnalysisError::TooManySteps(self.opts.max_steps));
            }
            let h = self.h.min(self.opts.h_max);
            if h < 1e-14 * self.s.abs().max(1.0) {
                return Err(AnalysisError::StepUnderflow { s: self.s });
            }
            let y = &self.y;
            let k1 = self.k1;
            let k2 = f(&axpy(y, h, &[(A21, &k1)]));
            let k3 = f(&axpy(y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(&axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(&axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(&axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y1 = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(&y1);
            self.stats.evaluations += 6;
            let err: [f64; D] =
                std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
            let e = self.norm(&err, y, &y1);
            if !e.is_finite() || y1.iter().any(|v| !v.is_finite()) {
                if h < 1e-14 * self.s.abs().max(1.0) * 1e3 {
                    return Err(AnalysisError::NonFiniteState);
                }
                self.h = h * FAC_MIN;
                self.stats.rejected += 1;
                continue;
            }
            let expo = 0.2 - 0.75 * BETA;
            let fac11 = e.powf(expo);
            if e <= 1.0 {
                let fac = (fac11 / self.facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.facold = e.max(1e-4);
                let mut rcont = [[0.0; D]; 5];
                for i in 0..D {
                    let dy = y1[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    rcont[0][i] = y[i];
                    rcont[1][i] = dy;
                    rcont[2][i] = bspl;
                    rcont[3][i] = dy - h * k7[i] - bspl;
                    rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let out = DenseStep { s0: self.s, h, rcont };
                self.s += h;
                self.y = y1;
                self.k1 = k7;
                self.h = h / fac;
                self.stats.steps += 1;
                return Ok(out);
            }
            self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            self.stats.rejected += 1;
        }
    }
}

/// Sampled orbit. `times` run in the direction of integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<(f64, f64)>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn last(&self) -> (f64, f64) {
        *self.states.last().expect("nonempty")
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "t,x,y")?;
        for (t, (x, y)) in self.times.iter().zip(&self.states) {
            writeln!(w, "{t},{x},{y}")?;
        }
        Ok(())
    }
}

/// Integrates `x' = X(x)` from `start` to time `t_end` (negative for
/// backward time), recording every accepted step.
pub fn integrate_orbit(
    rhs: &dyn Fn(f64, f64) -> (f64, f64),
    start: (f64, f64),
    t_end: f64,
    opts: OdeOptions,
) -> Result<Trajectory, AnalysisError> {
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs();
    let f = |y: &[f64; 2]| {
        let (a, b) = rhs(y[0], y[1]);
        [dir * a, dir * b]
    };
    let mut st = Stepper::new(&f, [start.0, start.1], opts)?;
    let mut traj = Trajectory { times: vec![0.0], states: vec![start], stats: IntegratorStats::default() };
    while st.s < span {
        let remaining = span - st.s;
        if st.h > remaining {
            st.h = remaining;
        }
        let step = st.step()?;
        let y = if step.end() > span { step.at(span) } else { st.y };
        traj.times.push(dir * step.end().min(span));
        traj.states.push((y[0], y[1]));
        if remaining <= step.h {
            break;
        }
    }
    traj.stats = st.stats;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rotation(x: f64, y: f64) -> (f64, f64) {
        (-y, x)
    }

    #[test]
    fn harmonic_oscillator_closes() {
        let t = integrate_orbit(&rotation, (1.0, 0.0), 2.0 * std::f64::consts::PI, OdeOptions::from_tol(1e-12)).unwrap();
        let (x, y) = t.last();
        assert!((x - 1.0).abs() < 1e-9 && y.abs() < 1e-9);
        assert!(t.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn dense_output_is_fifth_order_accurate() {
        let f = |y: &[f64; 1]| [y[0]];
        let mut st = Stepper::new(&f, [1.0], OdeOptions::from_tol(1e-10)).unwrap();
        let step = st.step().unwrap();
        let mid = step.s0 + 0.37 * step.h;
        assert_relative_eq!(step.at(mid)[0], mid.exp(), max_relative = 1e-9);
    }

    #[test]
    fn backward_undoes_forward() {
        let vdp = |x: f64, y: f64| (y, (1.0 - x * x) * y - x);
        let opts = OdeOptions::from_tol(1e-12);
        let fwd = integrate_orbit(&vdp, (0.5, 0.1), 3.0, opts).unwrap();
        let back = integrate_orbit(&vdp, fwd.last(), -3.0, opts).unwrap();
        let (x, y) = back.last();
        assert!((x - 0.5).abs() < 1e-7 && (y - 0.1).abs() < 1e-7);
        assert!(back.times.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn step_underflow_reported() {
        let blow = |x: f64, _y: f64| (x * x, 0.0);
        let r = integrate_orbit(&blow, (1.0, 0.0), 2.0, OdeOptions::from_tol(1e-10));
        assert!(matches!(r, Err(AnalysisError::StepUnderflow { .. }) | Err(AnalysisError::NonFiniteState)));
    }
}
