//! Regression corpus: small configurations covering every construction mode,
//! disjoint and nested layouts, and multiplicities up to 4. Periods sit near
//! each geometry's natural period so every cycle returns on a moderate time
//! scale.

use crate::config::{Circle, Configuration, CycleSpec, Sign};
use crate::construct::Mode;
use crate::ratpoly::rat;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub mode: Mode,
    pub config: Configuration,
}

/// `(cx, cy, r)` as `(numerator, denominator)` pairs, then period,
/// multiplicity and interior stability.
type Row = ((i64, i64), (i64, i64), (i64, i64), f64, u32, i32);

fn config(rows: &[Row]) -> Configuration {
    Configuration::new(
        rows.iter()
            .map(|&(x, y, r, period, multiplicity, nu)| CycleSpec {
                circle: Circle::new(rat(x.0, x.1), rat(y.0, y.1), rat(r.0, r.1)),
                period,
                multiplicity,
                interior_stability: if nu > 0 { Sign::Positive } else { Sign::Negative },
            })
            .collect(),
    )
}

fn entry(name: &'static str, mode: Mode, rows: &[Row]) -> CorpusEntry {
    CorpusEntry { name, mode, config: config(rows) }
}

const Z: (i64, i64) = (0, 1);

const fn n(v: i64) -> (i64, i64) {
    (v, 1)
}

/// The nested pair used as the end-to-end example: periods 1 and 2,
/// multiplicities 1 and 2, interior stabilities -1 and +1.
pub fn nested_example() -> Configuration {
    config(&[(Z, Z, (5, 2), 1.0, 1, -1), ((5, 32), Z, (15, 8), 2.0, 2, 1)])
}

pub fn corpus() -> Vec<CorpusEntry> {
    use Mode::*;
    vec![
        // limit cycles only
        entry("lr-unit", LR, &[(Z, Z, n(1), 1.0, 1, 1)]),
        entry("lr-pair", LR, &[(Z, Z, n(1), 1.0, 1, 1), (n(4), Z, n(1), 1.0, 1, 1)]),
        entry("lr-nest", LR, &[(Z, Z, (5, 2), 1.0, 1, 1), ((5, 32), Z, (15, 8), 1.0, 1, -1)]),
        entry("lr-nest-sibling", LR, &[(Z, Z, n(4), 1.0, 1, 1), (n(-2), Z, n(1), 1.0, 1, -1), (n(2), Z, n(1), 1.0, 1, -1), (n(8), Z, n(1), 1.0, 1, 1)]),
        // prescribed periods
        entry("t-unit", T, &[(Z, Z, n(1), 3.0, 1, 1)]),
        entry("t-unit-slow", T, &[(Z, Z, n(1), 6.0, 1, 1)]),
        entry("t-pair", T, &[(Z, Z, n(1), 0.0173, 1, 1), (n(4), Z, n(1), 0.0346, 1, 1)]),
        entry("t-nest", T, &[(Z, Z, (7, 2), 0.0893, 1, 1), (Z, Z, (49, 16), 0.117, 1, -1)]),
        entry("t-triple", T, &[(Z, Z, n(1), 0.00145, 1, 1), (n(3), Z, n(1), 0.000441, 1, 1), (Z, n(3), n(1), 0.000441, 1, 1)]),
        entry("t-nest-sibling", T, &[(Z, Z, n(4), 7.81e-05, 1, 1), (n(-2), Z, n(1), 0.0014, 1, -1), (n(2), Z, n(1), 0.0014, 1, -1)]),
        // multiplicities
        entry("m-unit-2", M, &[(Z, Z, n(1), 1.0, 2, -1)]),
        entry("m-unit-3", M, &[(Z, Z, n(1), 1.0, 3, 1)]),
        entry("m-pair", M, &[(Z, Z, n(1), 1.0, 2, -1), (n(4), Z, n(1), 1.0, 1, 1)]),
        entry("m-nest", M, &[(Z, Z, (7, 2), 1.0, 2, -1), (Z, Z, (49, 16), 1.0, 1, 1)]),
        // periods and multiplicities
        entry("tm-unit-2", Tm, &[(Z, Z, n(1), 3.0, 2, -1)]),
        entry("tm-unit-3", Tm, &[(Z, Z, n(1), 1.5, 3, 1)]),
        entry("tm-unit-4", Tm, &[(Z, Z, n(1), 1.05, 4, -1)]),
        entry("tm-pair", Tm, &[(Z, Z, n(1), 0.000804, 1, 1), (n(4), Z, n(1), 0.0173, 2, -1)]),
        entry("tm-nest", Tm, &[(Z, Z, (7, 2), 0.0156, 1, 1), (Z, Z, (49, 16), 0.117, 2, 1)]),
        // hyperbolic cycles with any stabilities
        entry("ts-unit-stable", Ts, &[(Z, Z, n(1), 9.93, 1, -1)]),
        entry("ts-pair", Ts, &[(Z, Z, n(1), 0.00121, 1, 1), (n(4), Z, n(1), 0.000129, 1, -1)]),
        entry("ts-nest", Ts, &[(Z, Z, (7, 2), 0.126, 1, 1), (Z, Z, (49, 16), 0.872, 1, 1)]),
        entry("ts-nest-offset", Ts, &[(Z, Z, (5, 2), 3.29, 1, -1), ((5, 32), Z, (15, 8), 1.81, 1, -1)]),
        // everything prescribed
        entry("full-unit", Full, &[(Z, Z, n(1), 16.4, 1, 1)]),
        entry("full-unit-2", Full, &[(Z, Z, n(1), 3.0, 2, -1)]),
        entry("full-unit-3", Full, &[(Z, Z, n(1), 8.21, 3, 1)]),
        entry("full-pair", Full, &[(Z, Z, n(1), 0.0105, 1, 1), (n(4), Z, n(1), 0.000237, 2, -1)]),
        CorpusEntry { name: "full-nest", mode: Full, config: nested_example() },
        entry("full-nest-natural", Full, &[(Z, Z, (5, 2), 0.957, 1, -1), ((5, 32), Z, (15, 8), 191.0, 2, 1)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{expected_stability, expected_stability_hyperbolic, validate_configuration};

    #[test]
    fn corpus_is_within_size_limits_and_covers_every_mode() {
        let c = corpus();
        assert!(c.len() >= 25);
        for e in &c {
            assert!(e.config.len() <= 6 && e.config.total_multiplicity() <= 12, "{}", e.name);
            validate_configuration(&e.config).unwrap();
        }
        for m in Mode::ALL {
            assert!(c.iter().any(|e| e.mode == m), "{m:?} missing");
        }
        assert!(c.iter().any(|e| e.config.cycles.iter().any(|s| s.multiplicity == 4)));
    }

    #[test]
    fn non_augmented_entries_request_the_forced_stability() {
        for e in corpus() {
            let idx = validate_configuration(&e.config).unwrap();
            for (k, s) in e.config.cycles.iter().enumerate() {
                let forced = match e.mode {
                    Mode::LR | Mode::T => expected_stability_hyperbolic(&idx, k),
                    Mode::M | Mode::Tm => expected_stability(&idx, &e.config.multiplicities(), k),
                    Mode::Ts | Mode::Full => continue,
                };
                assert_eq!(s.interior_stability, forced, "{} cycle {k}", e.name);
            }
        }
    }

    #[test]
    fn nested_example_is_in_the_corpus() {
        let ex = nested_example();
        assert!(corpus().iter().any(|e| e.mode == Mode::Full && e.config == ex));
        let periods: Vec<f64> = ex.cycles.iter().map(|s| s.period).collect();
        assert_eq!(periods, [1.0, 2.0]);
    }
}
