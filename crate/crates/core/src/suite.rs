//! Every randomized law of the crate, grouped by module, and the aggregate
//! run report.

use std::collections::BTreeMap;
use std::time::Instant;

use proptest::collection::vec;
use proptest::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicStep;
use crate::gen::{self, arb_rational, arb_scalar, arb_step};
use crate::instances::{
    cantor_project, gamma_hom, hom_operator_norm, indefinite_integral, kappa_target, left_endpoint_target,
    lipschitz_cylinder, mean_target, pairing, recover_function,
};
use crate::linalg::Matrix;
use crate::measures::{
    shipped_measure_targets, verify_axioms, verify_category_laws, verify_integration, verify_psi, Category, DoubledUnit,
    SquaredMass,
};
use crate::norm::{direct_sum_norm, PNormValue, Weighting};
use crate::report::{check_fixed, check_law, LawOutcome};
use crate::scalar::{ComplexRational, Exponent, Rational, Scalar};
use crate::sequences::{seq_fold, seq_norm, seq_prepend, seq_table, seq_universal, shipped_seq_targets, FiniteSeq};
use crate::universal::{
    adamek_chain, apply_universal, compile_theta, contraction_law, mean_equation_holds, tabulate_by_fold,
    uniqueness_probe, value_le, verify_morphism, AlgebraTarget, ChainKind, MorphismTable, NormSpec, CONTRACTION_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Relative tolerance for norms that need a root.
pub const FLOAT_TOL: f64 = 1e-12;

/// Largest level of generated steps in the dyadic laws.
const STEP_LEVEL: u32 = 6;

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn prefixed(prefix: &str, laws: Vec<LawOutcome>) -> Vec<LawOutcome> {
    laws.into_iter()
        .map(|mut l| {
            l.law = format!("{prefix}/{}", l.law);
            l
        })
        .collect()
}

pub fn test_exponents() -> Vec<Exponent> {
    vec![
        Exponent::one(),
        Exponent::integer(2),
        Exponent::integer(3),
        Exponent::new(Rational::new(3, 2)).expect("valid"),
        Exponent::Infinite,
    ]
}

fn norm_sum(a: &PNormValue, b: &PNormValue) -> PNormValue {
    match (a.value.exact(), b.value.exact()) {
        (Some(x), Some(y)) => PNormValue::exact(a.p.clone(), x + y),
        _ => PNormValue::approx(a.p.clone(), a.to_f64() + b.to_f64()),
    }
}

/// `‖γ(f, g)‖_p` against the averaged direct sum, for one exponent.
pub fn gamma_isometry_law<S: Scalar>(p: &Exponent, seed: u64, trials: u32) -> LawOutcome {
    let law = format!("gamma-isometry-p{p}");
    check_law(&law, seed, trials, (arb_step::<S>(STEP_LEVEL), arb_step::<S>(STEP_LEVEL)), |(f, g)| {
        let h = DyadicStep::juxtapose(f, g).map_err(err)?;
        let lhs = h.p_norm(p);
        let rhs = direct_sum_norm(&f.p_norm(p), &g.p_norm(p), Weighting::Averaged).map_err(err)?;
        expect(lhs.close_to(&rhs, FLOAT_TOL), || format!("|gamma(f, g)| = {} but the direct sum is {}", lhs.to_f64(), rhs.to_f64()))
    })
}

/// `split ∘ γ = id` and `γ ∘ split = id`.
pub fn lambek_law<S: Scalar>(seed: u64, trials: u32) -> LawOutcome {
    check_law("lambek-roundtrip", seed, trials, (arb_step::<S>(STEP_LEVEL), arb_step::<S>(STEP_LEVEL)), |(f, g)| {
        let h = DyadicStep::juxtapose(f, g).map_err(err)?;
        let (l, r) = h.split();
        expect(&l == f && &r == g, || format!("split(gamma(f, g)) = ({l:?}, {r:?})"))?;
        let back = DyadicStep::juxtapose(&l, &r).map_err(err)?;
        expect(back == h && back.canonicalize() == h.canonicalize(), || "gamma(split h) differs from h".into())
    })
}

/// `‖f‖_p ≤ ‖f‖_r` for `p < r` on the probability space `[0, 1]`.
pub fn power_mean_law<S: Scalar>(p: &Exponent, r: &Exponent, seed: u64, trials: u32) -> LawOutcome {
    let law = format!("power-mean-p{p}-r{r}");
    check_law(&law, seed, trials, arb_step::<S>(STEP_LEVEL + 2), |f| {
        let (a, b) = (f.p_norm(p), f.p_norm(r));
        expect(a.le(&b, FLOAT_TOL), || format!("|f|_{p} = {} > |f|_{r} = {}", a.to_f64(), b.to_f64()))
    })
}

pub fn dyadic_laws<S: Scalar>(seed: u64, trials: u32) -> Vec<LawOutcome> {
    let mut laws: Vec<LawOutcome> = test_exponents().iter().map(|p| gamma_isometry_law::<S>(p, seed, trials)).collect();
    laws.push(lambek_law::<S>(seed, trials));
    laws.push(check_law("refine-invariance", seed, trials, (arb_step::<S>(STEP_LEVEL), 0u32..4), |(f, m)| {
        let g = f.refine(f.level() + m).map_err(err)?;
        expect(g.integrate_exact() == f.integrate_exact(), || "refinement changed the integral".into())?;
        for p in test_exponents() {
            // Exact whenever the norm is; otherwise only the final rounding may differ.
            expect(g.p_norm(&p).close_to(&f.p_norm(&p), FLOAT_TOL), || format!("refinement changed the {p}-norm"))?;
        }
        expect(g.canonicalize() == f.canonicalize(), || "refinement changed the canonical form".into())
    }));
    let one = Exponent::one();
    let pairs = [(one.clone(), Exponent::integer(2)), (Exponent::integer(2), Exponent::integer(4)), (one.clone(), Exponent::Infinite)];
    for (p, r) in &pairs {
        laws.push(power_mean_law::<S>(p, r, seed, trials));
    }
    laws.push(check_law("triangle", seed, trials, (arb_step::<S>(STEP_LEVEL), arb_step::<S>(STEP_LEVEL)), |(f, g)| {
        for p in test_exponents() {
            let lhs = f.add(g).p_norm(&p);
            let rhs = norm_sum(&f.p_norm(&p), &g.p_norm(&p));
            expect(lhs.le(&rhs, FLOAT_TOL * rhs.to_f64().max(1.0)), || format!("|f + g|_{p} = {} > {}", lhs.to_f64(), rhs.to_f64()))?;
        }
        Ok(())
    }));
    laws.push(check_law("homogeneity", seed, trials, (arb_step::<S>(STEP_LEVEL), arb_scalar::<S>()), |(f, c)| {
        for p in test_exponents() {
            let lhs = f.scale(c).p_norm(&p);
            let base = f.p_norm(&p);
            let rhs = match (base.value.exact(), c.modulus_exact()) {
                (Some(n), Some(m)) => PNormValue::exact(p.clone(), n * &m),
                _ => PNormValue::approx(p.clone(), base.to_f64() * c.modulus_f64()),
            };
            expect(lhs.close_to(&rhs, FLOAT_TOL), || format!("|c f|_{p} = {} but |c| |f| = {}", lhs.to_f64(), rhs.to_f64()))?;
        }
        Ok(())
    }));
    laws.push(check_law("integral-bound", seed, trials, arb_step::<S>(STEP_LEVEL), |f| {
        let i = f.integrate_exact();
        let n = f.p_norm(&Exponent::one());
        let ok = match n.value.exact() {
            Some(n) => i.modulus_sq() <= n * n,
            None => i.modulus_f64() <= n.to_f64() * (1.0 + FLOAT_TOL),
        };
        expect(ok, || format!("|int f| = {} > |f|_1 = {}", i.modulus_f64(), n.to_f64()))
    }));
    laws
}

/// The integration functional agrees exactly with the compiled mean target.
pub fn integration_agreement_law(table: &MorphismTable<Rational>, max_level: u32, seed: u64, trials: u32) -> LawOutcome {
    check_law("integration-agreement", seed, trials, arb_step::<Rational>(max_level), |f| {
        let theta = apply_universal(table, f).map_err(err)?;
        expect(theta[0] == f.integrate_exact(), || format!("theta(f) = {}, integral = {}", theta[0], f.integrate_exact()))
    })
}

/// `θ(f) = ½(θ(L) + θ(R))` on sampled steps.
pub fn mean_equation_law(table: &MorphismTable<Rational>, max_level: u32, seed: u64, trials: u32) -> LawOutcome {
    check_law("mean-equation", seed, trials, arb_step::<Rational>(max_level), |f| {
        expect(mean_equation_holds(table, f).map_err(err)?, || "theta(f) differs from the mean of its halves".into())
    })
}

/// Searches sampled steps for one where `table` breaks the mean equation.
pub fn mean_equation_witness(table: &MorphismTable<Rational>, max_level: u32, seed: u64, trials: u32) -> Option<DyadicStep<Rational>> {
    let mut rng = gen::rng(seed, "mean-equation-witness");
    (0..trials)
        .map(|_| gen::random_step::<Rational>(&mut rng, max_level))
        .find(|f| !mean_equation_holds(table, f).unwrap_or(true))
}

pub fn universal_laws(seed: u64, trials: u32) -> Vec<LawOutcome> {
    const LEVEL: u32 = 8;
    let mut laws = Vec::new();
    let targets: Vec<AlgebraTarget<Rational>> =
        vec![mean_target(), left_endpoint_target(), kappa_target(3).expect("small resolution")];
    for t in &targets {
        let table = compile_theta(t, LEVEL).expect("level within cap");
        match verify_morphism(&table, trials, seed) {
            Ok(r) => laws.extend(prefixed(t.name(), r.laws)),
            Err(e) => laws.push(LawOutcome::fail(&format!("{}/verify", t.name()), 0, String::new(), e.to_string())),
        }
        laws.push(check_fixed(&format!("{}/fold-agreement", t.name()), || {
            let folded = tabulate_by_fold(t, 6).map_err(err)?;
            expect(uniqueness_probe(t, &folded).map_err(err)?, || "fold tabulation differs from the compiled table".into())
        }));
    }
    let mean = compile_theta(&targets[0], LEVEL).expect("level within cap");
    laws.push(integration_agreement_law(&mean, LEVEL, seed, trials));
    laws.push(mean_equation_law(&mean, LEVEL, seed, trials));
    let left = compile_theta(&targets[1], LEVEL).expect("level within cap");
    let witness = if trials == 0 { None } else { mean_equation_witness(&left, LEVEL, seed, trials) };
    laws.push(match (trials, witness) {
        (0, _) => LawOutcome::pass("mean-equation-discriminates", 0).with_note("vacuous: zero cases requested"),
        (_, Some(w)) => LawOutcome::pass("mean-equation-discriminates", trials).with_note(format!("left-endpoint witness {w:?}")),
        (_, None) => LawOutcome::fail("mean-equation-discriminates", trials, String::new(), "left-endpoint target satisfied the mean equation on every sample".into()),
    });
    for p in [Exponent::one(), Exponent::integer(2), Exponent::Infinite] {
        for kind in [ChainKind::DoubleWithPNorm(p.clone()), ChainKind::PrependScalar(p.clone())] {
            let name = match &kind {
                ChainKind::DoubleWithPNorm(p) => format!("adamek-double-p{p}"),
                ChainKind::PrependScalar(p) => format!("adamek-prepend-p{p}"),
            };
            laws.push(check_fixed(&name, || {
                let r = adamek_chain(kind, 5).map_err(err)?;
                expect(r.passed, || format!("{r:?}"))
            }));
        }
    }
    laws
}

/// Cumulative sums and the κ-target morphism agree at every node, for every
/// resolution up to `max_resolution`: exhaustively on the level-`N` basis, and
/// on sampled coarser steps.
pub fn two_path_law(max_resolution: u32, seed: u64, trials: u32) -> LawOutcome {
    let per_level = trials.div_ceil(max_resolution + 1).max(u32::from(trials > 0));
    let mut outcomes = Vec::new();
    for n in 0..=max_resolution {
        let target = match kappa_target::<Rational>(n) {
            Ok(t) => t,
            Err(e) => return LawOutcome::fail("two-path", trials, String::new(), e.to_string()),
        };
        let table = compile_theta(&target, n).expect("level within cap");
        let basis = check_fixed("two-path", || {
            let d = 1usize << n;
            let h = Rational::one().mul_pow2(-(n as i32));
            let m = &table.levels[n as usize];
            for k in 0..d {
                for j in 0..d {
                    let want = if j <= k { h.clone() } else { Rational::zero() };
                    expect(*m.get(k, j) == want, || format!("node {} of the basis step {j} at level {n}: {}", k + 1, m.get(k, j)))?;
                }
            }
            Ok(())
        });
        if !basis.passed {
            return basis;
        }
        outcomes.push(check_law("two-path", seed ^ n as u64, per_level, arb_step::<Rational>(n), |f| {
            let direct = indefinite_integral(f).refine(n).map_err(err)?;
            let via = apply_universal(&table, f).map_err(err)?;
            expect(direct.node_vector() == via.as_slice(), || format!("cumulative sums {:?}, kappa morphism {via:?}", direct.node_vector()))
        }));
    }
    outcomes.into_iter().find(|o| !o.passed).unwrap_or_else(|| LawOutcome::pass("two-path", per_level * (max_resolution + 1)))
}

pub fn ftc_roundtrip_law(max_level: u32, seed: u64, trials: u32) -> LawOutcome {
    check_law("ftc-roundtrip", seed, trials, arb_step::<Rational>(max_level), |f| {
        let back = recover_function(&indefinite_integral(f));
        expect(back.level() == f.level() && back.coeffs() == f.coeffs(), || format!("recovered {back:?}"))
    })
}

pub fn holder_law(p: &Exponent, q: &Exponent, seed: u64, trials: u32) -> LawOutcome {
    let law = format!("holder-p{p}-q{q}");
    check_law(&law, seed, trials, (arb_step::<Rational>(STEP_LEVEL), arb_step::<Rational>(STEP_LEVEL)), |(f, g)| {
        let lhs = pairing(f, g, p, q).map_err(err)?.modulus_f64();
        let rhs = f.p_norm(p).to_f64() * g.p_norm(q).to_f64();
        expect(lhs <= rhs + CONTRACTION_TOL, || format!("|<f, g>| = {lhs} > {rhs}"))
    })
}

/// `⟨f, f⟩ = ‖f‖₂²`: Hölder with equality at `p = q = 2`.
pub fn holder_equality_law(seed: u64, trials: u32) -> LawOutcome {
    let two = Exponent::integer(2);
    check_law("holder-equality", seed, trials, arb_step::<Rational>(STEP_LEVEL), |f| {
        let lhs = pairing(f, f, &two, &two).map_err(err)?.to_f64().abs();
        let n = f.p_norm(&two).to_f64();
        expect((lhs - n * n).abs() <= CONTRACTION_TOL, || format!("<f, f> = {lhs}, |f|_2^2 = {}", n * n))
    })
}

/// Random Lipschitz cylinder functions stay within `L·2^{-n}` of their projections.
pub fn cantor_density_law(max_level: u32, seed: u64, trials: u32) -> LawOutcome {
    let inputs = (any::<u64>(), 0..=max_level, (1i64..=8, 1i64..=4));
    check_law("cantor-density", seed, trials, inputs, |(s, level, (ln, ld))| {
        let l = Rational::new(*ln, *ld);
        let mut rng = gen::rng(*s, "lipschitz");
        let f = lipschitz_cylinder(&mut rng, *level, &l).map_err(err)?;
        for n in 0..=*level {
            let d = f.sup_distance(&cantor_project(&f, n as i64).map_err(err)?);
            let bound = l.mul_pow2(-(n as i32));
            let ok = match d.value.exact() {
                Some(x) => *x <= bound,
                None => d.to_f64() <= bound.to_f64() + CONTRACTION_TOL,
            };
            expect(ok, || format!("sup distance {} at n = {n} exceeds L 2^-n = {bound}", d.to_f64()))?;
        }
        Ok(())
    })
}

pub fn instances_laws(seed: u64, trials: u32) -> Vec<LawOutcome> {
    let two = Exponent::integer(2);
    let three = Exponent::integer(3);
    let three_halves = Exponent::new(Rational::new(3, 2)).expect("valid");
    let mut laws = vec![
        two_path_law(8, seed, trials),
        ftc_roundtrip_law(10, seed, trials),
        holder_law(&two, &two, seed, trials),
        holder_law(&three, &three_halves, seed, trials),
        holder_equality_law(seed, trials),
        cantor_density_law(8, seed, trials),
    ];
    let quad = (arb_step::<Rational>(4), arb_step::<Rational>(4), arb_step::<Rational>(4), arb_step::<Rational>(4));
    laws.push(check_law("product-splits", seed, trials, quad, |(f1, f2, g1, g2)| {
        let lhs = DyadicStep::juxtapose(f1, f2).map_err(err)?.pointwise_mul(&DyadicStep::juxtapose(g1, g2).map_err(err)?);
        let rhs = DyadicStep::juxtapose(&f1.pointwise_mul(g1), &f2.pointwise_mul(g2)).map_err(err)?;
        expect(lhs == rhs, || "the product does not split over gamma".into())
    }));
    let ops = (0u32..=2, 0usize..3).prop_flat_map(|(level, qi)| {
        let n = 1usize << level;
        (Just(level), Just(qi), vec(arb_rational(), n * n), vec(arb_rational(), n * n))
    });
    laws.push(check_law("gamma-contraction", seed, trials.min(200), ops, |(level, qi, a, b)| {
        let q = [Exponent::integer(2), Exponent::integer(3), Exponent::Infinite][*qi].clone();
        let n = 1usize << level;
        let to_matrix = |v: &[Rational]| Matrix::from_rows(v.chunks(n).map(|r| r.to_vec()).collect()).expect("square");
        let (phi1, phi2) = (to_matrix(a), to_matrix(b));
        let g = gamma_hom(&phi1, &phi2, *level).map_err(err)?;
        let n1 = hom_operator_norm(&phi1, *level, &q, 0, seed).map_err(err)?;
        let n2 = hom_operator_norm(&phi2, *level, &q, 0, seed).map_err(err)?;
        let ng = hom_operator_norm(&g, level + 1, &q, 0, seed).map_err(err)?;
        let p = q.conjugate();
        let bound = direct_sum_norm(&PNormValue::approx(p.clone(), n1.value), &PNormValue::approx(p, n2.value), Weighting::Averaged)
            .map_err(err)?;
        expect(ng.value <= bound.to_f64() * (1.0 + CONTRACTION_TOL) + CONTRACTION_TOL, || {
            format!("|Gamma(phi1, phi2)| = {} exceeds {}", ng.value, bound.to_f64())
        })
    }));
    laws
}

fn arb_seq<S: Scalar>(max_len: usize) -> BoxedStrategy<FiniteSeq<S>> {
    vec(arb_scalar::<S>(), 0..=max_len).prop_map(FiniteSeq::new).boxed()
}

pub fn sequences_laws(seed: u64, trials: u32) -> Vec<LawOutcome> {
    let mut laws = Vec::new();
    for t in shipped_seq_targets() {
        let name = t.name().to_string();
        laws.push(check_law(&format!("{name}/morphism-square"), seed, trials, (arb_scalar::<Rational>(), arb_seq::<Rational>(12)), |(c, a)| {
            let lhs = seq_universal(&t, &seq_prepend(c, a));
            let rhs = t.apply_delta(c, &seq_universal(&t, a));
            expect(lhs == rhs, || format!("theta(c : a) = {lhs:?}, delta(c, theta a) = {rhs:?}"))
        }));
        laws.push(check_law(&format!("{name}/fold-oracle"), seed, trials, arb_seq::<Rational>(12), |a| {
            let (x, y) = (seq_universal(&t, a), seq_fold(&t, a));
            expect(x == y, || format!("table gives {x:?}, fold gives {y:?}"))
        }));
        laws.push(check_law(&format!("{name}/contraction"), seed, trials, arb_seq::<Rational>(12), |a| {
            let image = t.norm().value(&seq_universal(&t, a));
            let bound = seq_norm(a, t.p()).value;
            expect(value_le(&image, &bound, CONTRACTION_TOL), || format!("|theta a| = {} > |a|_p = {}", image.to_f64(), bound.to_f64()))
        }));
        laws.push(check_fixed(&format!("{name}/extension-coherence"), || {
            for len in 0..12 {
                let (short, long) = (seq_table(&t, len), seq_table(&t, len + 1));
                expect(long.col_block(0, len) == short, || format!("column {len} changes the earlier columns"))?;
            }
            Ok(())
        }));
    }
    for p in test_exponents() {
        laws.push(check_law(&format!("prepend-isometry-p{p}"), seed, trials, (arb_scalar::<Rational>(), arb_seq::<Rational>(12)), |(c, a)| {
            let lhs = seq_norm(&seq_prepend(c, a), &p);
            let head = seq_norm(&FiniteSeq::new(vec![c.clone()]), &p);
            let rhs = direct_sum_norm(&head, &seq_norm(a, &p), Weighting::Plain).map_err(err)?;
            expect(lhs.close_to(&rhs, FLOAT_TOL), || format!("|c : a| = {} but the plain sum is {}", lhs.to_f64(), rhs.to_f64()))
        }));
    }
    laws
}

pub fn measures_laws<S: Scalar>(seed: u64, trials: u32) -> Vec<LawOutcome> {
    let mut laws = verify_category_laws(trials, seed);
    for t in shipped_measure_targets::<S>(seed) {
        let name = t.target.name();
        laws.extend(prefixed(&name, verify_axioms(t.target.as_ref(), t.category, trials, seed, false).laws));
        laws.extend(prefixed(&name, verify_psi(t.target.as_ref(), t.category, trials, seed).laws));
    }
    laws.extend(verify_integration::<S>(trials, seed));
    laws
}

fn rejected(name: &str, outcome: Option<&LawOutcome>) -> LawOutcome {
    match outcome {
        Some(o) if !o.passed && o.counterexample.is_some() => {
            let mut l = LawOutcome::pass(name, o.cases);
            l.counterexample = o.counterexample.clone();
            l.note = o.note.clone();
            l
        }
        Some(o) => LawOutcome::fail(name, o.cases, String::new(), format!("checker accepted the broken target: {o:?}")),
        None => LawOutcome::fail(name, 0, String::new(), "checker did not run".into()),
    }
}

/// Cases spent looking for a violation in each negative control.
pub const NEGATIVE_CONTROL_CASES: u32 = 256;

/// Each checker must reject a target built to break it, with a shrunk witness.
pub fn negative_controls(seed: u64) -> Vec<LawOutcome> {
    let cases = NEGATIVE_CONTROL_CASES;
    let r = Rational::new;
    let doubling = Matrix::from_rows(vec![vec![r(2, 1), r(0, 1)]]).expect("1x2");
    let gate = match AlgebraTarget::new(1, Exponent::one(), vec![Rational::zero()], doubling.clone(), NormSpec::Sup) {
        Err(e) => LawOutcome::pass("gate-rejects-non-contractive-delta", 1).with_note(e.to_string()),
        Ok(_) => LawOutcome::fail("gate-rejects-non-contractive-delta", 1, String::new(), "delta(x, y) = 2x was admitted".into()),
    };
    let sampled = contraction_law(1, &Exponent::one(), &doubling, &NormSpec::Sup, seed, cases);
    let doubled = verify_axioms::<Rational>(&DoubledUnit { p: Exponent::one() }, Category::B, cases, seed, false);
    let squared = verify_axioms::<Rational>(&SquaredMass, Category::B, cases, seed, false);
    vec![
        gate,
        rejected("rejects-non-contractive-delta", Some(&sampled)),
        rejected("rejects-doubled-unit", doubled.law("III")),
        rejected("rejects-non-additive-unit", squared.law("I")),
    ]
}

/// One group of laws in a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub laws: Vec<LawOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// `suite/law`, stable across runs.
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub seed: u64,
    pub trials: u32,
    pub passed: bool,
    pub counts: Counts,
    pub suites: Vec<SuiteReport>,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
    /// Wall-clock milliseconds per suite; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn from_suites(seed: u64, trials: u32, suites: Vec<SuiteReport>, mut warnings: Vec<String>) -> Self {
        let mut counts = Counts::default();
        let mut failures = Vec::new();
        for s in &suites {
            for l in &s.laws {
                if l.passed {
                    counts.pass += 1;
                } else {
                    counts.fail += 1;
                    failures.push(Failure {
                        anchor: format!("{}/{}", s.suite, l.law),
                        counterexample: l.counterexample.clone(),
                        note: l.note.clone(),
                    });
                }
            }
        }
        if trials == 0 {
            warnings.push("trials = 0: randomized laws passed vacuously".into());
        }
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: Vec::new(),
            seed,
            trials,
            passed: counts.fail == 0,
            counts,
            suites,
            failures,
            warnings,
            timing_ms: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.command.is_empty() {
            out.push_str(&format!("command: {}\n", self.command.join(" ")));
        }
        out.push_str(&format!("seed {} trials {}\n", self.seed, self.trials));
        for s in &self.suites {
            let fails = s.laws.iter().filter(|l| !l.passed).count();
            out.push_str(&format!(
                "{} {:<12} {} laws, {} failed\n",
                if s.passed { "PASS" } else { "FAIL" },
                s.suite,
                s.laws.len(),
                fails
            ));
        }
        for f in &self.failures {
            out.push_str(&format!("  failed {}", f.anchor));
            if let Some(n) = &f.note {
                out.push_str(&format!(": {n}"));
            }
            out.push('\n');
            if let Some(c) = &f.counterexample {
                out.push_str(&format!("    counterexample: {c}\n"));
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        if let Some(t) = &self.timing_ms {
            for (k, v) in t {
                out.push_str(&format!("time {k}: {v:.1} ms\n"));
            }
        }
        out.push_str(&format!(
            "{}: {} passed, {} failed\n",
            if self.passed { "ok" } else { "FAILED" },
            self.counts.pass,
            self.counts.fail
        ));
        out
    }
}

type SuiteFn = Box<dyn Fn() -> Vec<LawOutcome> + Send + Sync>;

/// Runs every suite plus `extra` user targets (JSON `AlgebraTarget`s, which
/// must pass the construction gate before their laws run).
pub fn verify_all(seed: u64, trials: u32, extra: &[serde_json::Value], timing: bool) -> RunReport {
    let mut suites: Vec<(String, SuiteFn)> = vec![
        ("dyadic".into(), Box::new(move || dyadic_laws::<Rational>(seed, trials))),
        ("dyadic-complex".into(), Box::new(move || dyadic_laws::<ComplexRational>(seed, trials))),
        ("universal".into(), Box::new(move || universal_laws(seed, trials))),
        ("instances".into(), Box::new(move || instances_laws(seed, trials))),
        ("sequences".into(), Box::new(move || sequences_laws(seed, trials))),
        ("measures".into(), Box::new(move || measures_laws::<Rational>(seed, trials))),
        ("measures-complex".into(), Box::new(move || measures_laws::<ComplexRational>(seed, trials))),
        ("negative".into(), Box::new(move || negative_controls(seed))),
    ];
    for (k, value) in extra.iter().enumerate() {
        let label = value
            .get("name")
            .and_then(|n| n.as_str())
            .map(str::to_string)
            .unwrap_or_else(|| format!("extra-{k}"));
        let value = value.clone();
        suites.push((
            format!("target:{label}"),
            Box::new(move || match serde_json::from_value::<AlgebraTarget<Rational>>(value.clone()) {
                Err(e) => vec![LawOutcome::fail("construction-gate", 1, String::new(), e.to_string())],
                Ok(t) => {
                    let mut laws = vec![LawOutcome::pass("construction-gate", 1)];
                    let level = 6;
                    match compile_theta(&t, level).and_then(|table| verify_morphism(&table, trials, seed)) {
                        Ok(r) => laws.extend(r.laws),
                        Err(e) => laws.push(LawOutcome::fail("compile", 1, String::new(), e.to_string())),
                    }
                    laws
                }
            }),
        ));
    }
    let results: Vec<(SuiteReport, f64)> = suites
        .par_iter()
        .map(|(name, run)| {
            let start = Instant::now();
            let laws = run();
            let passed = laws.iter().all(|l| l.passed);
            (SuiteReport { suite: name.clone(), passed, laws }, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    let times: BTreeMap<String, f64> = results.iter().map(|(s, t)| (s.suite.clone(), *t)).collect();
    let mut report = RunReport::from_suites(seed, trials, results.into_iter().map(|(s, _)| s).collect(), Vec::new());
    if timing {
        report.timing_ms = Some(times);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = verify_all(42, 8, &[], false);
        assert!(a.passed, "{}", a.to_text());
        let b = verify_all(42, 8, &[], false);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn zero_trials_is_a_vacuous_pass_with_a_warning() {
        let r = verify_all(1, 0, &[], false);
        assert!(r.passed, "{}", r.to_text());
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn broken_extra_target_fails_the_gate() {
        let bad = serde_json::json!({
            "name": "doubling", "dim": 1, "p": "1", "basepoint": ["0"],
            "delta": [["2", "0"]], "norm": {"kind": "sup"}
        });
        let r = verify_all(3, 4, &[bad], false);
        assert!(!r.passed);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].anchor, "target:doubling/construction-gate");
        assert!(r.failures[0].note.as_ref().unwrap().contains("contraction of delta"));
    }
}
