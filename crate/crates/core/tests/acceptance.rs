//! Release acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::Instant;

use initial_integrals::gen;
use initial_integrals::instances::{left_endpoint_target, mean_target};
use initial_integrals::measures::{shipped_measure_targets, verify_axioms, verify_integration, verify_psi, Category};
use initial_integrals::report::LawOutcome;
use initial_integrals::scalar::{Exponent, Rational};
use initial_integrals::sequences::shipped_seq_targets;
use initial_integrals::suite::{
    cantor_density_law, ftc_roundtrip_law, gamma_isometry_law, holder_equality_law, holder_law, lambek_law,
    mean_equation_law, mean_equation_witness, negative_controls, power_mean_law, sequences_laws, two_path_law,
};
use initial_integrals::universal::{apply_universal, compile_theta};

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn from_laws(laws: &[LawOutcome]) -> Verdict {
    let failed: Vec<&LawOutcome> = laws.iter().filter(|l| !l.passed).collect();
    let cases: u64 = laws.iter().map(|l| l.cases as u64).sum();
    if failed.is_empty() {
        Verdict { passed: true, detail: format!("{} laws, {cases} cases", laws.len()) }
    } else {
        let mut detail = format!("{} of {} laws failed", failed.len(), laws.len());
        for l in failed {
            detail.push_str(&format!("\n    {}: {}", l.law, l.note.clone().unwrap_or_default()));
            if let Some(c) = &l.counterexample {
                detail.push_str(&format!("\n      counterexample: {c}"));
            }
        }
        Verdict { passed: false, detail }
    }
}

fn integration_agreement() -> Verdict {
    const CASES: usize = 100_000;
    const LEVEL: u32 = 12;
    let start = Instant::now();
    let table = compile_theta(&mean_target::<Rational>(), LEVEL).expect("level 12 is within the cap");
    let mut rng = gen::rng(SEED, "integration-agreement");
    for k in 0..CASES {
        let f = gen::random_step::<Rational>(&mut rng, LEVEL);
        let theta = apply_universal(&table, &f).expect("level within table");
        if theta[0] != f.integrate_exact() {
            return Verdict {
                passed: false,
                detail: format!("case {k}: theta = {}, integral = {} for {f:?}", theta[0], f.integrate_exact()),
            };
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict { passed: secs < 30.0, detail: format!("{CASES} steps up to level {LEVEL}, zero error, {secs:.1} s (target < 30 s)") }
}

fn functional_equation() -> Verdict {
    const LEVEL: u32 = 10;
    let mean = compile_theta(&mean_target::<Rational>(), LEVEL).expect("within cap");
    let mut v = from_laws(&[mean_equation_law(&mean, LEVEL, SEED, 10_000)]);
    let left = compile_theta(&left_endpoint_target::<Rational>(), LEVEL).expect("within cap");
    match mean_equation_witness(&left, LEVEL, SEED, 10_000) {
        Some(w) => v.detail.push_str(&format!("; left-endpoint witness {:?}", w.coeffs())),
        None => {
            v.passed = false;
            v.detail.push_str("; the left-endpoint functional satisfied the equation on every sample");
        }
    }
    v
}

fn gamma_isometry() -> Verdict {
    let mut laws: Vec<LawOutcome> = [
        Exponent::one(),
        Exponent::Infinite,
        Exponent::integer(2),
        Exponent::integer(3),
        Exponent::new(Rational::new(3, 2)).expect("valid"),
    ]
    .iter()
    .map(|p| gamma_isometry_law::<Rational>(p, SEED, 10_000))
    .collect();
    laws.push(lambek_law::<Rational>(SEED, 10_000));
    from_laws(&laws)
}

fn two_path() -> Verdict {
    from_laws(&[two_path_law(10, SEED, 2_200), ftc_roundtrip_law(10, SEED, 10_000)])
}

fn holder() -> Verdict {
    let two = Exponent::integer(2);
    let three = Exponent::integer(3);
    let three_halves = Exponent::new(Rational::new(3, 2)).expect("valid");
    from_laws(&[
        holder_law(&two, &two, SEED, 10_000),
        holder_law(&three, &three_halves, SEED, 10_000),
        holder_equality_law(SEED, 10_000),
    ])
}

fn power_means() -> Verdict {
    let one = Exponent::one();
    let pairs = [
        (one.clone(), Exponent::integer(2)),
        (Exponent::integer(2), Exponent::integer(4)),
        (one, Exponent::Infinite),
    ];
    let laws: Vec<LawOutcome> = pairs.iter().map(|(p, r)| power_mean_law::<Rational>(p, r, SEED, 10_000)).collect();
    from_laws(&laws)
}

fn cantor() -> Verdict {
    from_laws(&[cantor_density_law(10, SEED, 100)])
}

fn sequences() -> Verdict {
    let shipped = shipped_seq_targets().len();
    let mut v = from_laws(&sequences_laws(SEED, 10_000));
    if shipped != 5 {
        v.passed = false;
    }
    v.detail.push_str(&format!("; {shipped} shipped targets"));
    v
}

fn psi_suite() -> Verdict {
    let mut laws = Vec::new();
    for t in shipped_measure_targets::<Rational>(SEED) {
        let name = t.target.name();
        for mut l in verify_psi(t.target.as_ref(), t.category, 1_000, SEED).laws {
            l.law = format!("{name}/{}", l.law);
            laws.push(l);
        }
        for mut l in verify_axioms(t.target.as_ref(), t.category, 500, SEED, false).laws {
            l.law = format!("{name}/{}", l.law);
            laws.push(l);
        }
    }
    from_laws(&laws)
}

fn integration_on_spaces() -> Verdict {
    let laws: Vec<LawOutcome> = verify_integration::<Rational>(1_000, SEED)
        .into_iter()
        .filter(|l| l.law != "indicator-orthogonality")
        .collect();
    from_laws(&laws)
}

fn hilbert() -> Verdict {
    let mut laws: Vec<LawOutcome> = verify_integration::<Rational>(1_000, SEED)
        .into_iter()
        .filter(|l| l.law == "indicator-orthogonality")
        .collect();
    for t in shipped_measure_targets::<Rational>(SEED) {
        if t.category != Category::H {
            continue;
        }
        let name = t.target.name();
        let report = verify_psi(t.target.as_ref(), t.category, 1_000, SEED);
        for l in report.laws {
            if l.law == "orthogonality" || l.law == "pythagoras" {
                laws.push(LawOutcome { law: format!("{name}/{}", l.law), ..l });
            }
        }
        if let Some(l) = verify_axioms(t.target.as_ref(), Category::H, 1_000, SEED, false).law("IV_H") {
            laws.push(LawOutcome { law: format!("{name}/IV_H"), ..l.clone() });
        }
    }
    from_laws(&laws)
}

fn negatives() -> Verdict {
    let laws = negative_controls(SEED);
    let mut v = from_laws(&laws);
    for l in &laws {
        if let Some(c) = &l.counterexample {
            v.detail.push_str(&format!("\n    {} witness: {c}", l.law));
        }
    }
    v
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("integration agreement", integration_agreement),
        ("functional equation", functional_equation),
        ("gamma isometry and Lambek roundtrip", gamma_isometry),
        ("two-path indefinite integral", two_path),
        ("Hoelder inequality", holder),
        ("power-mean monotonicity", power_means),
        ("Cantor density", cantor),
        ("sequence universality", sequences),
        ("psi suite", psi_suite),
        ("integration on measure spaces", integration_on_spaces),
        ("Hilbert orthogonality", hilbert),
        ("negative controls", negatives),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        println!("{} {:>2} {name}: {} [{secs:.1} s]", if v.passed { "PASS" } else { "FAIL" }, k + 1, v.detail);
        if !v.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
