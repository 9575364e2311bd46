use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{expected_stability, nesting_index, validate_configuration, Circle, ConfigError, Configuration, NestingIndex, Sign};
use crate::ratpoly::rational::{floor_dyadic, sqrt_lower, sqrt_upper};
use crate::ratpoly::{int, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMode {
    /// One concentric circle per cycle (all multiplicities 1).
    Hyperbolic,
    /// Rule table driven by multiplicity parity and the requested stability.
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraCircle {
    pub circle: Circle,
    /// Base cycle this helper circle was added for.
    pub owner: usize,
}

/// Circle counts. `total` is what the rule table actually produced; the
/// `stated` values follow the closed-form count `N = n + n1 + 2 n2` with
/// `n2 = #{m even, M odd}`, which can disagree with the rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationCounts {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub total: usize,
    pub n2_stated: usize,
    pub total_stated: usize,
}

/// Base configuration plus helper circles, their singular points and the
/// separation `epsilon`. A configuration without helpers has no epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedConfiguration {
    pub base: Configuration,
    pub extra_circles: Vec<ExtraCircle>,
    pub epsilon: Option<Rational>,
    pub singular_points: Vec<(Rational, Rational)>,
    pub counts: AugmentationCounts,
    pub mode: Option<AugmentMode>,
}

impl AugmentedConfiguration {
    /// Wraps a configuration that receives no helper circles.
    pub fn plain(base: Configuration) -> Self {
        let n = base.len();
        AugmentedConfiguration {
            base,
            extra_circles: Vec::new(),
            epsilon: None,
            singular_points: Vec::new(),
            counts: AugmentationCounts { n, n1: 0, n2: 0, total: n, n2_stated: 0, total_stated: n },
            mode: None,
        }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Base circles first, then helpers.
    pub fn circles(&self) -> Vec<Circle> {
        let mut v = self.base.circles();
        v.extend(self.extra_circles.iter().map(|e| e.circle.clone()));
        v
    }

    /// Base multiplicities, then 1 for each helper.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut v = self.base.multiplicities();
        v.extend(std::iter::repeat_n(1, self.extra_circles.len()));
        v
    }

    pub fn index(&self) -> Result<NestingIndex, ConfigError> {
        nesting_index(&self.circles(), &self.multiplicities())
    }

    pub fn singular_points_f64(&self) -> Vec<(f64, f64)> {
        self.singular_points
            .iter()
            .map(|(a, b)| (crate::ratpoly::to_f64(a), crate::ratpoly::to_f64(b)))
            .collect()
    }

    /// Float clearance of circle `k` (base or helper) from everything else.
    pub fn clearance(&self, k: usize) -> f64 {
        super::clearance(&self.circles(), &self.singular_points_f64(), k)
    }
}

/// Exact rational lower bound for the smallest gap among circle pairs,
/// circle-to-center distances and radii, divided by four and rounded down to
/// a dyadic rational.
pub fn epsilon_for(circles: &[Circle]) -> Rational {
    let mut min: Option<Rational> = None;
    let mut take = |v: Rational| {
        if min.as_ref().is_none_or(|m| &v < m) {
            min = Some(v);
        }
    };
    for (k, c) in circles.iter().enumerate() {
        take(c.radius.clone());
        for (j, o) in circles.iter().enumerate() {
            if j == k {
                continue;
            }
            let d2 = c.center_distance_sq(o);
            // distance from circle c to the center of o
            let r2 = &c.radius * &c.radius;
            if d2 > r2 {
                take(sqrt_lower(&d2) - &c.radius);
            } else {
                take(&c.radius - sqrt_upper(&d2));
            }
            if j < k {
                continue;
            }
            let sum = &c.radius + &o.radius;
            if d2 > &sum * &sum {
                take(sqrt_lower(&d2) - sum);
            } else {
                take((&c.radius - &o.radius).abs() - sqrt_upper(&d2));
            }
        }
    }
    let quarter = min.expect("nonempty") * rat(1, 4);
    if quarter.is_positive() {
        floor_dyadic(&quarter)
    } else {
        Rational::zero()
    }
}

fn default_floor() -> Rational {
    rat(1, 1_000_000_000)
}

/// Adds helper circles so that every base cycle gets its requested interior
/// stability, and places one singular point on each helper at angle 0.
pub fn augment_for_stability(c: &Configuration, idx: &NestingIndex, mode: AugmentMode) -> Result<AugmentedConfiguration, ConfigError> {
    augment_with_floor(c, idx, mode, &default_floor())
}

pub fn augment_with_floor(
    c: &Configuration,
    idx: &NestingIndex,
    mode: AugmentMode,
    floor: &Rational,
) -> Result<AugmentedConfiguration, ConfigError> {
    if mode == AugmentMode::Hyperbolic {
        if let Some((k, cy)) = c.cycles.iter().enumerate().find(|(_, cy)| cy.multiplicity != 1) {
            return Err(ConfigError::NotHyperbolic(k, cy.multiplicity));
        }
    }
    let eps = epsilon_for(&c.circles());
    if &eps < floor || eps.is_zero() {
        return Err(ConfigError::ClearanceTooSmall(crate::ratpoly::format_short(&eps)));
    }
    let mut extras = Vec::new();
    let mut n1 = 0;
    let mut n2 = 0;
    let mut n2_stated = 0;
    for (k, cy) in c.cycles.iter().enumerate() {
        let nu = int(cy.interior_stability.value() as i64);
        let shifted = |delta: Rational| Circle::new(cy.circle.center.0.clone(), cy.circle.center.1.clone(), &cy.circle.radius + delta);
        let odd = cy.multiplicity % 2 == 1;
        if odd {
            n1 += 1;
        }
        if !odd && idx.entries[k].enclosing_multiplicity % 2 == 1 {
            n2_stated += 1;
        }
        match (mode, odd, cy.interior_stability) {
            (AugmentMode::Hyperbolic, _, _) | (AugmentMode::General, true, _) => {
                extras.push(ExtraCircle { circle: shifted(-(&eps * &nu)), owner: k });
            }
            (AugmentMode::General, false, Sign::Negative) => {}
            (AugmentMode::General, false, Sign::Positive) => {
                n2 += 1;
                extras.push(ExtraCircle { circle: shifted(-eps.clone()), owner: k });
                extras.push(ExtraCircle { circle: shifted(eps.clone()), owner: k });
            }
        }
    }
    let singular_points: Vec<(Rational, Rational)> = extras
        .iter()
        .map(|e| (&e.circle.center.0 + &e.circle.radius, e.circle.center.1.clone()))
        .collect();
    let n = c.len();
    let counts = match mode {
        AugmentMode::Hyperbolic => AugmentationCounts { n, n1: n, n2: 0, total: 2 * n, n2_stated: 0, total_stated: 2 * n },
        AugmentMode::General => AugmentationCounts {
            n,
            n1,
            n2,
            total: n + extras.len(),
            n2_stated,
            total_stated: n + n1 + 2 * n2_stated,
        },
    };
    let aug = AugmentedConfiguration {
        base: c.clone(),
        extra_circles: extras,
        epsilon: Some(eps),
        singular_points,
        counts,
        mode: Some(mode),
    };
    let aug_idx = aug.index()?;
    let mults = aug.multiplicities();
    for (k, cy) in c.cycles.iter().enumerate() {
        if expected_stability(&aug_idx, &mults, k) != cy.interior_stability {
            return Err(ConfigError::AugmentationFailed { cycle: k, expected: cy.interior_stability.value() });
        }
    }
    Ok(aug)
}

/// Validate and augment in one step.
pub fn augment_configuration(c: &Configuration, mode: AugmentMode) -> Result<AugmentedConfiguration, ConfigError> {
    let idx = validate_configuration(c)?;
    augment_for_stability(c, &idx, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CycleSpec;

    fn single(m: u32, nu: Sign) -> Configuration {
        Configuration::new(vec![CycleSpec {
            circle: Circle::new(int(0), int(0), int(1)),
            period: std::f64::consts::PI,
            multiplicity: m,
            interior_stability: nu,
        }])
    }

    #[test]
    fn hyperbolic_stable_adds_enclosing_circle() {
        let c = single(1, Sign::Negative);
        let aug = augment_configuration(&c, AugmentMode::Hyperbolic).unwrap();
        assert_eq!(aug.extra_circles.len(), 1);
        let eps = aug.epsilon.clone().unwrap();
        assert_eq!(aug.extra_circles[0].circle.radius, int(1) + &eps);
        let idx = aug.index().unwrap();
        assert_eq!(idx.entries[0].enclosing_multiplicity, 1);
        assert_eq!(expected_stability(&idx, &aug.multiplicities(), 0), Sign::Negative);
    }

    #[test]
    fn general_rules() {
        let aug = augment_configuration(&single(2, Sign::Positive), AugmentMode::General).unwrap();
        let eps = aug.epsilon.clone().unwrap();
        let radii: Vec<_> = aug.extra_circles.iter().map(|e| e.circle.radius.clone()).collect();
        assert_eq!(radii, vec![int(1) - &eps, int(1) + &eps]);
        assert_eq!(aug.counts.total, 3);

        let aug = augment_configuration(&single(2, Sign::Negative), AugmentMode::General).unwrap();
        assert!(aug.extra_circles.is_empty());
        assert_eq!(aug.counts.total, 1);

        let aug = augment_configuration(&single(1, Sign::Positive), AugmentMode::General).unwrap();
        assert_eq!(aug.extra_circles[0].circle.radius, int(1) - aug.epsilon.clone().unwrap());
    }

    #[test]
    fn epsilon_is_quarter_of_unit_gaps() {
        // single unit circle: radius 1, center-to-circle gap 1
        let eps = epsilon_for(&[Circle::new(int(0), int(0), int(1))]);
        assert_eq!(eps, rat(1, 4));
    }

    #[test]
    fn singular_points_lie_on_helpers() {
        let aug = augment_configuration(&single(2, Sign::Positive), AugmentMode::General).unwrap();
        for (e, q) in aug.extra_circles.iter().zip(&aug.singular_points) {
            assert!(e.circle.implicit_at(q).is_zero());
        }
    }

    #[test]
    fn hyperbolic_rejects_multiplicity() {
        assert_eq!(
            augment_configuration(&single(2, Sign::Positive), AugmentMode::Hyperbolic),
            Err(ConfigError::NotHyperbolic(0, 2))
        );
    }

    #[test]
    fn floor_enforced() {
        let c = single(1, Sign::Positive);
        let idx = validate_configuration(&c).unwrap();
        assert!(matches!(
            augment_with_floor(&c, &idx, AugmentMode::General, &int(1)),
            Err(ConfigError::ClearanceTooSmall(_))
        ));
    }
}
