//! Circle configurations, their nesting combinatorics, forest layout and the
//! helper-circle augmentation that fixes interior stabilities.

mod augment;
mod io;
mod layout;

pub use augment::{augment_configuration, augment_for_stability, augment_with_floor, epsilon_for, AugmentMode, AugmentationCounts, AugmentedConfiguration, ExtraCircle};
pub use io::{ConfigFile, CycleRecord, ForestRecord};
pub use layout::{layout_forest, ForestNode, NestingForest};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ratpoly::{to_f64, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("circles {0} and {1} intersect or are tangent")]
    Overlap(usize, usize),
    #[error("center of circle {1} lies on circle {0}")]
    CenterOnCircle(usize, usize),
    #[error("circle {0} has a nonpositive radius")]
    NonpositiveRadius(usize),
    #[error("circles {0} and {1} coincide")]
    DuplicateCircle(usize, usize),
    #[error("cycle {0} has an invalid prescription: {1}")]
    InvalidPrescription(usize, String),
    #[error("configuration has no cycles")]
    Empty,
    #[error("hyperbolic augmentation needs every multiplicity equal to 1 (cycle {0} has {1})")]
    NotHyperbolic(usize, u32),
    #[error("augmentation failed to produce stability {expected} on cycle {cycle}")]
    AugmentationFailed { cycle: usize, expected: i32 },
    #[error("clearance too small: epsilon {0} is below the floor")]
    ClearanceTooSmall(String),
    #[error("malformed configuration file: {0}")]
    Malformed(String),
}

/// A stability or orientation sign, `-1` (attracting) or `+1` (repelling).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    /// `(-1)^e`
    pub fn parity(e: u32) -> Sign {
        if e.is_multiple_of(2) {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Positive)
        } else if x < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, o: Sign) -> Sign {
        if self == o {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl TryFrom<i32> for Sign {
    type Error = String;
    fn try_from(v: i32) -> Result<Self, String> {
        match v {
            -1 => Ok(Sign::Negative),
            1 => Ok(Sign::Positive),
            _ => Err(format!("stability must be -1 or 1, got {v}")),
        }
    }
}

impl From<Sign> for i32 {
    fn from(s: Sign) -> i32 {
        s.value()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    pub center: (Rational, Rational),
    pub radius: Rational,
}

impl Circle {
    pub fn new(cx: Rational, cy: Rational, radius: Rational) -> Self {
        Circle { center: (cx, cy), radius }
    }

    /// `f = (x - cx)^2 + (y - cy)^2 - r^2`
    pub fn implicit(&self) -> Poly {
        Poly::circle(&self.center.0, &self.center.1, &(&self.radius * &self.radius))
    }

    /// `g = (x - cx)^2 + (y - cy)^2`
    pub fn squared_distance(&self) -> Poly {
        Poly::circle(&self.center.0, &self.center.1, &Rational::zero())
    }

    pub fn center_f64(&self) -> (f64, f64) {
        (to_f64(&self.center.0), to_f64(&self.center.1))
    }

    pub fn radius_f64(&self) -> f64 {
        to_f64(&self.radius)
    }

    /// Point at angle `theta` measured from the center.
    pub fn point_at(&self, theta: f64) -> (f64, f64) {
        let (cx, cy) = self.center_f64();
        let r = self.radius_f64();
        (cx + r * theta.cos(), cy + r * theta.sin())
    }

    /// Exact value of the implicit equation at a rational point.
    pub fn implicit_at(&self, p: &(Rational, Rational)) -> Rational {
        let dx = &p.0 - &self.center.0;
        let dy = &p.1 - &self.center.1;
        &dx * &dx + &dy * &dy - &self.radius * &self.radius
    }

    /// Float value of the implicit equation at a point.
    pub fn implicit_f64(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.center_f64();
        let r = self.radius_f64();
        let (dx, dy) = (x - cx, y - cy);
        // factored as (d - r)(d + r) to keep relative accuracy near the circle
        let d = dx.hypot(dy);
        (d - r) * (d + r)
    }

    pub fn center_distance_sq(&self, o: &Circle) -> Rational {
        let dx = &self.center.0 - &o.center.0;
        let dy = &self.center.1 - &o.center.1;
        &dx * &dx + &dy * &dy
    }

    /// True when `self` lies strictly inside the disk bounded by `outer`.
    pub fn is_inside(&self, outer: &Circle) -> bool {
        if self.radius >= outer.radius {
            return false;
        }
        let gap = &outer.radius - &self.radius;
        self.center_distance_sq(outer) < &gap * &gap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSpec {
    pub circle: Circle,
    pub period: f64,
    pub multiplicity: u32,
    pub interior_stability: Sign,
}

impl CycleSpec {
    /// `(-1)^(m+1) * nu`
    pub fn exterior_stability(&self) -> Sign {
        Sign::parity(self.multiplicity + 1).times(self.interior_stability)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub cycles: Vec<CycleSpec>,
}

impl Configuration {
    pub fn new(cycles: Vec<CycleSpec>) -> Self {
        Configuration { cycles }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn circles(&self) -> Vec<Circle> {
        self.cycles.iter().map(|c| c.circle.clone()).collect()
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.cycles.iter().map(|c| c.multiplicity).collect()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.cycles.iter().map(|c| c.multiplicity).sum()
    }
}

/// Nesting data of one circle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingEntry {
    /// Smallest circle strictly containing this one.
    pub parent: Option<usize>,
    pub is_primary: bool,
    /// Number of circles containing this one.
    pub depth: u32,
    /// Sum of multiplicities of the containing circles.
    pub enclosing_multiplicity: u32,
    /// Primary circles inside the closed disk (itself included).
    pub contained_primaries: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingIndex {
    pub entries: Vec<NestingEntry>,
    pub primary_count: u32,
}

impl NestingIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn primaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().enumerate().filter(|(_, e)| e.is_primary).map(|(k, _)| k)
    }

    pub fn children(&self, k: usize) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, e)| e.parent == Some(k)).map(|(j, _)| j).collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, e)| e.parent.is_none()).map(|(j, _)| j).collect()
    }
}

/// Checks the geometric validity conditions and derives nesting data for a
/// set of circles with multiplicities.
pub fn nesting_index(circles: &[Circle], multiplicities: &[u32]) -> Result<NestingIndex, ConfigError> {
    assert_eq!(circles.len(), multiplicities.len());
    if circles.is_empty() {
        return Err(ConfigError::Empty);
    }
    for (k, c) in circles.iter().enumerate() {
        if !c.radius.is_positive() {
            return Err(ConfigError::NonpositiveRadius(k));
        }
    }
    let n = circles.len();
    // containment[k][j]: circle k lies inside circle j
    let mut inside = vec![vec![false; n]; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let (a, b) = (&circles[j], &circles[k]);
            if a == b {
                return Err(ConfigError::DuplicateCircle(j, k));
            }
            let d2 = a.center_distance_sq(b);
            let sum = &a.radius + &b.radius;
            let diff = &a.radius - &b.radius;
            if d2 > &sum * &sum {
                continue;
            }
            if d2 < &diff * &diff {
                if a.radius > b.radius {
                    inside[k][j] = true;
                } else {
                    inside[j][k] = true;
                }
                continue;
            }
            return Err(ConfigError::Overlap(j, k));
        }
    }
    for j in 0..n {
        for k in 0..n {
            if j != k && circles[j].implicit_at(&circles[k].center).is_zero() {
                return Err(ConfigError::CenterOnCircle(j, k));
            }
        }
    }
    let is_primary: Vec<bool> = (0..n).map(|j| (0..n).all(|k| !inside[k][j])).collect();
    let entries: Vec<NestingEntry> = (0..n)
        .map(|k| {
            let enclosing: Vec<usize> = (0..n).filter(|&j| inside[k][j]).collect();
            let parent = enclosing.iter().copied().min_by(|&a, &b| circles[a].radius.cmp(&circles[b].radius));
            let contained_primaries = (0..n).filter(|&j| is_primary[j] && (j == k || inside[j][k])).count() as u32;
            NestingEntry {
                parent,
                is_primary: is_primary[k],
                depth: enclosing.len() as u32,
                enclosing_multiplicity: enclosing.iter().map(|&j| multiplicities[j]).sum(),
                contained_primaries,
            }
        })
        .collect();
    let primary_count = is_primary.iter().filter(|&&p| p).count() as u32;
    Ok(NestingIndex { entries, primary_count })
}

/// Validates prescriptions and geometry of a configuration.
pub fn validate_configuration(c: &Configuration) -> Result<NestingIndex, ConfigError> {
    for (k, cy) in c.cycles.iter().enumerate() {
        if !(cy.period.is_finite() && cy.period > 0.0) {
            return Err(ConfigError::InvalidPrescription(k, format!("period {} must be positive", cy.period)));
        }
        if cy.multiplicity == 0 {
            return Err(ConfigError::InvalidPrescription(k, "multiplicity must be at least 1".into()));
        }
    }
    nesting_index(&c.circles(), &c.multiplicities())
}

/// Interior stability forced by the nesting: `(-1)^(m_k + M_k + 1)`.
pub fn expected_stability(idx: &NestingIndex, multiplicities: &[u32], k: usize) -> Sign {
    Sign::parity(multiplicities[k] + idx.entries[k].enclosing_multiplicity + 1)
}

/// All-hyperbolic shortcut `(-1)^(N_k)`.
pub fn expected_stability_hyperbolic(idx: &NestingIndex, k: usize) -> Sign {
    Sign::parity(idx.entries[k].depth)
}

/// Distance from circle `k` to the nearest other circle, center, or extra
/// point. Floating, for numerical step sizing only.
pub fn clearance(circles: &[Circle], points: &[(f64, f64)], k: usize) -> f64 {
    let c = &circles[k];
    let (cx, cy) = c.center_f64();
    let r = c.radius_f64();
    let mut best = f64::INFINITY;
    for (j, o) in circles.iter().enumerate() {
        let (ox, oy) = o.center_f64();
        let ro = o.radius_f64();
        let d = (cx - ox).hypot(cy - oy);
        // distance from circle k to center of circle j (including its own)
        best = best.min((d - r).abs());
        if j == k {
            continue;
        }
        let gap = if d >= r + ro { d - r - ro } else { (r - ro).abs() - d };
        best = best.min(gap.abs());
    }
    for &(px, py) in points {
        best = best.min(((px - cx).hypot(py - cy) - r).abs());
    }
    best
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::int;

    fn cyc(cx: i64, cy: i64, r: i64, m: u32) -> CycleSpec {
        CycleSpec {
            circle: Circle::new(int(cx), int(cy), int(r)),
            period: 1.0,
            multiplicity: m,
            interior_stability: Sign::Positive,
        }
    }

    #[test]
    fn disjoint_pair() {
        let c = Configuration::new(vec![cyc(0, 0, 1, 1), cyc(5, 0, 1, 1)]);
        let idx = validate_configuration(&c).unwrap();
        assert_eq!(idx.primary_count, 2);
        for e in &idx.entries {
            assert!(e.is_primary);
            assert_eq!((e.depth, e.enclosing_multiplicity, e.contained_primaries), (0, 0, 1));
        }
    }

    #[test]
    fn nested_pair() {
        let c = Configuration::new(vec![cyc(0, 0, 4, 1), cyc(2, 0, 1, 1)]);
        let idx = validate_configuration(&c).unwrap();
        assert_eq!(idx.primary_count, 1);
        assert!(!idx.entries[0].is_primary);
        assert!(idx.entries[1].is_primary);
        assert_eq!(idx.entries[0].depth, 0);
        assert_eq!(idx.entries[1].depth, 1);
        assert_eq!(idx.entries[1].parent, Some(0));
        assert_eq!(idx.entries[0].contained_primaries, 1);
        assert_eq!(idx.entries[1].contained_primaries, 1);
    }

    #[test]
    fn overlap_rejected() {
        let c = Configuration::new(vec![cyc(0, 0, 2, 1), cyc(3, 0, 2, 1)]);
        assert_eq!(validate_configuration(&c), Err(ConfigError::Overlap(0, 1)));
        let tangent = Configuration::new(vec![cyc(0, 0, 1, 1), cyc(2, 0, 1, 1)]);
        assert_eq!(validate_configuration(&tangent), Err(ConfigError::Overlap(0, 1)));
        let inner_tangent = Configuration::new(vec![cyc(0, 0, 3, 1), cyc(1, 0, 2, 1)]);
        assert_eq!(validate_configuration(&inner_tangent), Err(ConfigError::Overlap(0, 1)));
    }

    #[test]
    fn other_validity_errors() {
        let c = Configuration::new(vec![cyc(0, 0, 4, 1), cyc(2, 0, 2, 1)]);
        // circle 1 passes through the center of circle 0 -- also tangent internally
        assert!(validate_configuration(&c).is_err());
        let c = Configuration::new(vec![cyc(0, 0, 5, 1), cyc(3, 0, 1, 1)]);
        // circle 1 is inside and misses (0,0); center (3,0) is not on circle 0
        assert!(validate_configuration(&c).is_ok());
        let c = Configuration::new(vec![cyc(0, 0, 6, 1), cyc(3, 0, 3, 1)]);
        assert!(matches!(validate_configuration(&c), Err(ConfigError::Overlap(0, 1))));
        let c = Configuration::new(vec![cyc(0, 0, 10, 1), cyc(2, 0, 2, 1)]);
        assert_eq!(validate_configuration(&c), Err(ConfigError::CenterOnCircle(1, 0)));
        let c = Configuration::new(vec![cyc(0, 0, 1, 1), cyc(0, 0, 1, 1)]);
        assert_eq!(validate_configuration(&c), Err(ConfigError::DuplicateCircle(0, 1)));
        let c = Configuration::new(vec![cyc(0, 0, 0, 1)]);
        assert_eq!(validate_configuration(&c), Err(ConfigError::NonpositiveRadius(0)));
    }

    #[test]
    fn concentric_allowed() {
        let c = Configuration::new(vec![cyc(0, 0, 2, 1), cyc(0, 0, 1, 1)]);
        let idx = validate_configuration(&c).unwrap();
        assert_eq!(idx.entries[1].parent, Some(0));
    }

    #[test]
    fn stability_formulas() {
        let single = Configuration::new(vec![cyc(0, 0, 1, 1)]);
        let idx = validate_configuration(&single).unwrap();
        assert_eq!(expected_stability(&idx, &[1], 0), Sign::Positive);
        assert_eq!(expected_stability(&idx, &[2], 0), Sign::Negative);
        let nested = Configuration::new(vec![cyc(0, 0, 4, 1), cyc(2, 0, 1, 1)]);
        let idx = validate_configuration(&nested).unwrap();
        assert_eq!(expected_stability(&idx, &[1, 1], 1), Sign::Negative);
        assert_eq!(expected_stability_hyperbolic(&idx, 1), Sign::Negative);
    }

    #[test]
    fn exterior_from_interior() {
        let mut c = cyc(0, 0, 1, 2);
        c.interior_stability = Sign::Negative;
        assert_eq!(c.exterior_stability(), Sign::Positive);
        c.multiplicity = 3;
        assert_eq!(c.exterior_stability(), Sign::Negative);
    }
}
