//! Acceptance run over the regression corpus. Prints one PASS/FAIL line per
//! criterion, then exits nonzero if any criterion failed.

use std::f64::consts::PI;
use std::time::Instant;

use cyclefield::analysis::{divergence_period_integral, measure_period, NumericField, ReturnOptions};
use cyclefield::config::{Circle, Configuration, CycleSpec, Sign};
use cyclefield::construct::{build_field, BuildOptions, FieldFile, Mode, VectorField};
use cyclefield::corpus::{corpus, nested_example, CorpusEntry};
use cyclefield::ratpoly::{int, Poly};
use cyclefield::verify::{assemble_report, iif_residual, Check, VerificationReport, VerifyOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: ok_detail }
    } else {
        Outcome { pass: false, detail: failures.join("; ") }
    }
}

fn unit(period: f64, m: u32, nu: Sign) -> Configuration {
    Configuration::new(vec![CycleSpec { circle: Circle::new(int(0), int(0), int(1)), period, multiplicity: m, interior_stability: nu }])
}

/// Every check with this name across the reports, tagged with the entry name.
fn checks<'a>(runs: &'a [(CorpusEntry, VectorField, VerificationReport)], name: &'a str) -> impl Iterator<Item = (&'a str, &'a Check)> + 'a {
    runs.iter().flat_map(move |(e, _, r)| {
        r.symbolic.iter().chain(r.cycles.iter().flat_map(|c| c.checks.iter())).filter(move |c| c.name == name).map(move |c| (e.name, c))
    })
}

fn failing(runs: &[(CorpusEntry, VectorField, VerificationReport)], name: &str) -> Vec<String> {
    checks(runs, name).filter(|(_, c)| !c.pass).map(|(e, c)| format!("{e} {name} {:?}: {}", c.circle, c.detail)).collect()
}

fn count(runs: &[(CorpusEntry, VectorField, VerificationReport)], name: &str) -> usize {
    checks(runs, name).count()
}

fn identity_suite() -> Outcome {
    let start = Instant::now();
    let entries = corpus();
    let mut failures = Vec::new();
    for e in &entries {
        match build_field(&e.config, e.mode, BuildOptions::default()) {
            Ok(v) if iif_residual(&v.p, &v.q, &v.v).is_zero() => {}
            Ok(_) => failures.push(format!("{}: nonzero residual", e.name)),
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        failures.push(format!("took {elapsed:.2} s"));
    }
    let modes: std::collections::BTreeSet<&str> = entries.iter().map(|e| e.mode.name()).collect();
    outcome(failures, format!("{} configurations, modes {modes:?}, {elapsed:.2} s", entries.len()))
}

fn period_anchor() -> Option<String> {
    let v = build_field(&unit(1.0, 1, Sign::Positive), Mode::LR, BuildOptions::default()).expect("anchor builds");
    let field = NumericField::new(&v);
    let circle = &v.config.circles()[0];
    let opts = ReturnOptions { tol: 1e-12, period_hint: PI, clearance: v.config.clearance(0) };
    match field.frame(circle).and_then(|frame| measure_period(&field, &frame, &opts)) {
        Ok(p) => ((p.quadrature - PI).abs() > 1e-9).then(|| format!("unit circle period {} differs from pi", p.quadrature)),
        Err(e) => Some(format!("unit circle period failed: {e}")),
    }
}

fn divergence_anchors() -> Vec<String> {
    let mut failures = Vec::new();
    let mut anchor = |label: &str, c: &Configuration, mode: Mode, k: usize, expected: f64| {
        let v = build_field(c, mode, BuildOptions::default()).expect("anchor builds");
        let field = NumericField::new(&v);
        let l = divergence_period_integral(&field, &v.config.circles()[k]).expect("anchor integral");
        if (l - expected).abs() > 1e-6 {
            failures.push(format!("{label}: {l} against {expected}"));
        }
    };
    // the unit circle has natural period pi, so T = pi gives tau = 1 and
    // T = pi / 2 gives tau = 2
    anchor("single circle tau 1", &unit(PI, 1, Sign::Positive), Mode::T, 0, 4.0 * PI);
    anchor("single circle tau 2", &unit(PI / 2.0, 1, Sign::Positive), Mode::T, 0, 2.0 * PI);
    let lr_nest = corpus().into_iter().find(|e| e.name == "lr-nest").expect("corpus entry");
    anchor("nested inner", &lr_nest.config, Mode::LR, 1, -4.0 * PI);
    failures
}

fn negative_controls(opts: &VerifyOptions) -> Outcome {
    let mut failures = Vec::new();
    let mut v = build_field(&unit(PI, 1, Sign::Positive), Mode::T, BuildOptions::default()).expect("builds");
    v.p = &v.p + &Poly::one();
    let r = assemble_report(&v, opts);
    let red: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
    if r.pass || !red.contains(&"inverse_integrating_factor") {
        failures.push(format!("perturbed P not rejected (red checks {red:?})"));
    }
    // a non-augmented double cycle is forced to be attracting inside
    let v = build_field(&unit(PI, 2, Sign::Positive), Mode::Tm, BuildOptions::default()).expect("builds");
    let r = assemble_report(&v, opts);
    let red: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
    if r.pass || !red.contains(&"stability") {
        failures.push(format!("opposite stability not rejected (red checks {red:?})"));
    }
    outcome(failures, "perturbed P and opposite stability both give failing reports (exit 2)".into())
}

fn determinism(opts: &VerifyOptions) -> Outcome {
    let run = || {
        let v = build_field(&nested_example(), Mode::Full, BuildOptions::default()).expect("builds");
        let field = FieldFile::from_field(&v).to_json();
        let v = FieldFile::from_json(&field).and_then(FieldFile::into_field).expect("round trip");
        (field, assemble_report(&v, opts).to_json())
    };
    let (a, b) = (run(), run());
    let mut failures = Vec::new();
    if a.0 != b.0 {
        failures.push("field files differ".into());
    }
    if a.1 != b.1 {
        failures.push("reports differ".into());
    }
    outcome(failures, format!("field file {} bytes and report {} bytes identical", a.0.len(), a.1.len()))
}

fn main() {
    let opts = VerifyOptions::default();
    let runs: Vec<(CorpusEntry, VectorField, VerificationReport)> = corpus()
        .into_iter()
        .map(|e| {
            let v = build_field(&e.config, e.mode, BuildOptions::default()).expect("corpus entry builds");
            let r = assemble_report(&v, &opts);
            (e, v, r)
        })
        .collect();

    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("exact inverse integrating factor identity", identity_suite()));

    results.push((
        "strict degree bounds",
        outcome(failing(&runs, "degree_bound"), format!("{} fields below their bound", count(&runs, "degree_bound"))),
    ));

    let mut f = failing(&runs, "period");
    f.extend(failing(&runs, "period_ode"));
    f.extend(period_anchor());
    results.push((
        "period realization",
        outcome(f, format!("{} prescribed periods, {} return-time cross-checks, unit anchor pi", count(&runs, "period"), count(&runs, "period_ode"))),
    ));

    let full: Vec<_> = runs.iter().filter(|(e, _, _)| e.mode == Mode::Full).map(|(e, v, r)| (e.clone(), v.clone(), r.clone())).collect();
    let mut f = failing(&full, "stability");
    f.extend(failing(&runs, "stability_formula"));
    if count(&runs, "stability_formula") == 0 {
        f.push("no closed-form stability checks ran".into());
    }
    results.push((
        "stability realization",
        outcome(f, format!("{} full-mode cycles, {} closed-form comparisons", count(&full, "stability"), count(&runs, "stability_formula"))),
    ));

    let mut f = failing(&runs, "residue");
    f.extend(failing(&runs, "divergence"));
    f.extend(divergence_anchors());
    results.push((
        "integral identities",
        outcome(f, format!("{} residues, {} mode-T divergence integrals, 3 anchors", count(&runs, "residue"), count(&runs, "divergence"))),
    ));

    let mut f = failing(&runs, "vanishing_order");
    f.extend(failing(&runs, "multiplicity_symbolic"));
    f.extend(failing(&runs, "multiplicity_fit"));
    let mut high = 0;
    for (e, _, r) in &runs {
        for c in &r.cycles {
            if c.effective.multiplicity > 3 {
                high += 1;
                if c.multiplicity.status != "indeterminate-numeric" {
                    f.push(format!("{} cycle {} has status {}", e.name, c.index, c.multiplicity.status));
                }
            }
        }
    }
    if high == 0 {
        f.push("no cycle of multiplicity 4 or more in the corpus".into());
    }
    results.push((
        "multiplicity",
        outcome(f, format!("{} slope fits, {} symbolic-only cycles", count(&runs, "multiplicity_fit"), high)),
    ));

    results.push(("tau oracle equivalence", outcome(failing(&runs, "tau_oracle"), format!("{} cycles", count(&runs, "tau_oracle")))));
    results.push(("negative controls", negative_controls(&opts)));
    results.push(("determinism", determinism(&opts)));

    let other: Vec<String> = runs
        .iter()
        .filter(|(_, _, r)| !r.pass)
        .map(|(e, _, r)| format!("{}: {:?}", e.name, r.failed_checks().map(|c| &c.name).collect::<Vec<_>>()))
        .collect();
    for (i, (name, o)) in results.iter().enumerate() {
        println!("{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if !other.is_empty() {
        println!("corpus reports with failures: {}", other.join("; "));
    }
    if !(results.iter().all(|(_, o)| o.pass) && other.is_empty()) {
        std::process::exit(1);
    }
}
