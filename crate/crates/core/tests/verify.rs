//! Report assembly on hand-checkable single-circle fields.

use std::f64::consts::PI;

use cyclefield::config::{Circle, Configuration, CycleSpec, Sign};
use cyclefield::construct::{build_field, BuildOptions, Mode};
use cyclefield::ratpoly::int;
use cyclefield::verify::{assemble_report, VerifyOptions};

fn unit(m: u32, nu: Sign) -> Configuration {
    Configuration::new(vec![CycleSpec { circle: Circle::new(int(0), int(0), int(1)), period: PI, multiplicity: m, interior_stability: nu }])
}

#[test]
fn hyperbolic_unstable_circle_passes_in_every_period_mode() {
    for mode in [Mode::T, Mode::Ts, Mode::Full] {
        let v = build_field(&unit(1, Sign::Positive), mode, BuildOptions::default()).unwrap();
        let r = assemble_report(&v, &VerifyOptions::default());
        assert!(r.pass, "{mode}: {:?}", r.failed_checks().collect::<Vec<_>>());
        let c = &r.cycles[0];
        assert_eq!(c.stability.interior, Some(Sign::Positive));
        assert_eq!(c.stability.exterior, Some(Sign::Positive));
        assert!((c.period.quadrature.unwrap() - PI).abs() < 1e-6 * PI);
    }
}

#[test]
fn double_circle_is_semistable() {
    let v = build_field(&unit(2, Sign::Negative), Mode::Full, BuildOptions::default()).unwrap();
    assert!(v.config.extra_circles.is_empty());
    let r = assemble_report(&v, &VerifyOptions::default());
    assert!(r.pass, "{:?}", r.failed_checks().collect::<Vec<_>>());
    let c = &r.cycles[0];
    assert_eq!(c.multiplicity.vanishing_order, Some(2));
    assert_eq!(c.multiplicity.estimate, Some(2));
    assert_eq!((c.stability.interior, c.stability.exterior), (Some(Sign::Negative), Some(Sign::Positive)));
}

#[test]
fn mis_specified_stability_fails_without_helpers() {
    let v = build_field(&unit(2, Sign::Positive), Mode::Tm, BuildOptions::default()).unwrap();
    let r = assemble_report(&v, &VerifyOptions::default());
    assert!(!r.pass);
    let red: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
    assert!(red.contains(&"stability") && red.contains(&"flux_sign"), "{red:?}");
    // the measurement itself still matches the forced sign
    assert_eq!(r.cycles[0].stability.interior, Some(Sign::Negative));
}

#[test]
fn report_json_has_stable_key_order() {
    let v = build_field(&unit(1, Sign::Positive), Mode::LR, BuildOptions::default()).unwrap();
    let json = assemble_report(&v, &VerifyOptions::default()).to_json();
    // top-level keys sit at two spaces of indentation
    let keys = ["mode", "remark_optimization", "counts", "degree", "symbolic", "cycles", "pass"];
    let positions: Vec<usize> = keys.iter().map(|k| json.find(&format!("\n  \"{k}\"")).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
    // no period is prescribed in this mode
    assert!(json.contains("\"period\": null"));
}
