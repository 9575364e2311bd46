use serde_json::{json, Value};

use super::VectorField;
use crate::config::ConfigError;
use crate::ratpoly::{format_fraction, int, to_f64, Rational};

/// `f_k^{exponent}` with `f_k = (x - a)^2 + (y - b)^2 - r^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogFactor {
    pub circle: usize,
    pub center: (Rational, Rational),
    pub radius_sq: Rational,
    pub exponent: Rational,
}

/// `weight · h_k` inside the exponential, `h_k = f^{1-m}/(1-m)` or `ln f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub circle: usize,
    pub weight: Rational,
    pub multiplicity: u32,
}

/// `Φ = ln(Π |f_k|^{τ_k} · B · e^{-2Σθ_k} · e^{Λ Σ τ_j h_j})`, a first integral
/// with `X = V (-Φ_y, Φ_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxData {
    pub log_factors: Vec<LogFactor>,
    /// Primary centers; each contributes `g_k^1` and an angle with weight −2.
    pub angular_centers: Vec<(Rational, Rational)>,
    pub big_lambda: u32,
    pub exp_terms: Vec<ExpTerm>,
    /// Helper circles left out of the sums.
    pub omitted: Vec<usize>,
    pub remark_optimization: bool,
}

pub fn darboux_data(v: &VectorField) -> Result<DarbouxData, ConfigError> {
    let circles = v.config.circles();
    let idx = v.index()?;
    let mults = v.multiplicities();
    let include = v.included();
    let big_lambda: u32 = mults.iter().map(|m| m - 1).sum();
    let mut log_factors = Vec::new();
    let mut exp_terms = Vec::new();
    for (k, c) in circles.iter().enumerate() {
        if !include[k] {
            continue;
        }
        log_factors.push(LogFactor {
            circle: k,
            center: c.center.clone(),
            radius_sq: &c.radius * &c.radius,
            exponent: v.tau[k].clone(),
        });
        if big_lambda > 0 {
            exp_terms.push(ExpTerm { circle: k, weight: &v.tau[k] * int(big_lambda as i64), multiplicity: mults[k] });
        }
    }
    Ok(DarbouxData {
        log_factors,
        angular_centers: idx.primaries().map(|k| circles[k].center.clone()).collect(),
        big_lambda,
        exp_terms,
        omitted: (0..circles.len()).filter(|&k| !include[k]).collect(),
        remark_optimization: v.remark_optimization,
    })
}

struct Pt {
    f: f64,
    fx: f64,
    fy: f64,
}

fn circle_at(center: &(Rational, Rational), radius_sq: &Rational, x: f64, y: f64) -> Pt {
    let (a, b) = (to_f64(&center.0), to_f64(&center.1));
    let (dx, dy) = (x - a, y - b);
    Pt { f: dx * dx + dy * dy - to_f64(radius_sq), fx: 2.0 * dx, fy: 2.0 * dy }
}

impl DarbouxData {
    fn factor(&self, k: usize) -> &LogFactor {
        self.log_factors.iter().find(|l| l.circle == k).expect("exp term has a log factor")
    }

    /// `Φ(x, y)` on the principal branch of every angle.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for l in &self.log_factors {
            s += to_f64(&l.exponent) * circle_at(&l.center, &l.radius_sq, x, y).f.abs().ln();
        }
        for (a, b) in &self.angular_centers {
            let (dx, dy) = (x - to_f64(a), y - to_f64(b));
            s += (dx * dx + dy * dy).ln() - 2.0 * dy.atan2(dx);
        }
        for e in &self.exp_terms {
            let l = self.factor(e.circle);
            let f = circle_at(&l.center, &l.radius_sq, x, y).f;
            let h = if e.multiplicity == 1 { f.abs().ln() } else { f.powi(1 - e.multiplicity as i32) / (1.0 - e.multiplicity as f64) };
            s += to_f64(&e.weight) * h;
        }
        s
    }

    /// `(Φ_x, Φ_y)`, single-valued.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let (mut gx, mut gy) = (0.0, 0.0);
        for l in &self.log_factors {
            let p = circle_at(&l.center, &l.radius_sq, x, y);
            let t = to_f64(&l.exponent);
            gx += t * p.fx / p.f;
            gy += t * p.fy / p.f;
        }
        for (a, b) in &self.angular_centers {
            let (dx, dy) = (x - to_f64(a), y - to_f64(b));
            let g = dx * dx + dy * dy;
            gx += (2.0 * dx + 2.0 * dy) / g;
            gy += (2.0 * dy - 2.0 * dx) / g;
        }
        for e in &self.exp_terms {
            let l = self.factor(e.circle);
            let p = circle_at(&l.center, &l.radius_sq, x, y);
            let w = to_f64(&e.weight) * p.f.powi(-(e.multiplicity as i32));
            gx += w * p.fx;
            gy += w * p.fy;
        }
        (gx, gy)
    }

    pub fn to_json(&self) -> Value {
        let pair = |p: &(Rational, Rational)| json!([format_fraction(&p.0), format_fraction(&p.1)]);
        json!({
            "log_factors": self.log_factors.iter().map(|l| json!({
                "circle": l.circle,
                "center": pair(&l.center),
                "radius_sq": format_fraction(&l.radius_sq),
                "exponent": format_fraction(&l.exponent),
            })).collect::<Vec<_>>(),
            "angular_centers": self.angular_centers.iter().map(|c| json!({
                "center": pair(c),
                "g_exponent": 1,
                "angle_weight": -2,
            })).collect::<Vec<_>>(),
            "big_lambda": self.big_lambda,
            "exp_terms": self.exp_terms.iter().map(|e| json!({
                "circle": e.circle,
                "weight": format_fraction(&e.weight),
                "h": if e.multiplicity == 1 { "ln f".to_string() } else { format!("f^{}/{}", 1 - e.multiplicity as i64, 1 - e.multiplicity as i64) },
            })).collect::<Vec<_>>(),
            "omitted_circles": self.omitted,
            "remark_optimization": self.remark_optimization,
        })
    }
}
