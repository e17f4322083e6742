//! Randomised checks of the target axioms and of the properties of ψ,
//! with shrinking over generated spaces, maps and functions.

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::Index;
use serde::{Deserialize, Serialize};

use super::{
    compose_partial, density_measure, inner_product, integrate_measure, lp_pullback, mass_bound, point_ids, sp_norm,
    Category, Embedding, FiniteMeasureSpace, FunctorTarget, HilbertTensor, Measures, PartialMap, ScalarTarget,
    SimpleFn, SimpleFunctions, psi, check_additivity, check_beck_chevalley, v_sub, within_mass_bound,
};
use crate::gen::{self, arb_scalar};
use crate::linalg::{vec_add, Matrix};
use crate::norm::{direct_sum_norm, NormValue, PNormValue, Weighting};
use crate::report::{check_law, LawOutcome};
use crate::scalar::{Exponent, Rational, Scalar};
use crate::universal::CONTRACTION_TOL;

/// Largest generated space.
pub const MAX_POINTS: usize = 8;
const POOL: usize = 32;

pub fn arb_weight() -> BoxedStrategy<Rational> {
    prop_oneof![
        1 => Just(Rational::zero()),
        4 => (0i64..=16, 1i64..=16).prop_map(|(n, d)| Rational::new(n, d)),
    ]
    .boxed()
}

fn space_from(weights: Vec<Rational>, prefix: &str) -> FiniteMeasureSpace {
    FiniteMeasureSpace::new(point_ids(prefix, weights.len()), weights).expect("generated space")
}

/// 0–8 points, weights `n/d` with `d ≤ 16`, zero weights included.
pub fn arb_space() -> BoxedStrategy<FiniteMeasureSpace> {
    vec(arb_weight(), 0..=MAX_POINTS).prop_map(|w| space_from(w, "x")).boxed()
}

/// A space and a subset `Y`; `Y` and its complement give complementary embeddings.
pub fn arb_split() -> BoxedStrategy<(FiniteMeasureSpace, Vec<usize>)> {
    vec((arb_weight(), any::<bool>()), 0..=MAX_POINTS)
        .prop_map(|v| {
            let part = v.iter().enumerate().filter(|(_, (_, b))| *b).map(|(i, _)| i).collect();
            (space_from(v.into_iter().map(|(w, _)| w).collect(), "x"), part)
        })
        .boxed()
}

/// A space with up to three disjoint labelled subsets; unlabelled points are left out.
pub fn arb_labelled() -> BoxedStrategy<(FiniteMeasureSpace, Vec<Option<usize>>)> {
    vec((arb_weight(), proptest::option::of(0usize..3)), 0..=MAX_POINTS)
        .prop_map(|v| {
            let labels = v.iter().map(|(_, l)| *l).collect();
            (space_from(v.into_iter().map(|(w, _)| w).collect(), "x"), labels)
        })
        .boxed()
}

/// `W ⊆ Y ⊆ X` as embeddings `k: W → Y` and `i: Y → X`.
pub fn arb_nested() -> BoxedStrategy<(Embedding, Embedding)> {
    vec((arb_weight(), 0u8..3), 0..=MAX_POINTS)
        .prop_map(|v| {
            let x = space_from(v.iter().map(|(w, _)| w.clone()).collect(), "x");
            let y: Vec<usize> = (0..v.len()).filter(|&i| v[i].1 >= 1).collect();
            let i = Embedding::inclusion(&x, &y);
            let w: Vec<usize> = y.iter().enumerate().filter(|(_, &p)| v[p].1 == 2).map(|(k, _)| k).collect();
            let k = Embedding::inclusion(i.sub(), &w);
            (k, i)
        })
        .boxed()
}

/// Splits every point of `target` into weighted pieces, adds weight-zero
/// points mapped anywhere, and shuffles the source by `keys`.
fn refine_onto(target: &FiniteMeasureSpace, parts: &[Vec<u32>], extras: &[Index], keys: &[u8], prefix: &str) -> PartialMap {
    let mut pieces: Vec<(Rational, usize)> = Vec::new();
    for y in 0..target.len() {
        let ratios: &[u32] = parts.get(y).map(|v| v.as_slice()).filter(|v| !v.is_empty()).unwrap_or(&[1]);
        let total: i64 = ratios.iter().map(|&r| r as i64).sum();
        for &r in ratios {
            pieces.push((target.weight(y) * &Rational::new(r as i64, total), y));
        }
    }
    if !target.is_empty() {
        pieces.extend(extras.iter().map(|ix| (Rational::zero(), ix.index(target.len()))));
    }
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by_key(|&k| (keys.get(k).copied().unwrap_or(0), k));
    let source = space_from(order.iter().map(|&k| pieces[k].0.clone()).collect(), prefix);
    let pairs = order.iter().enumerate().map(|(a, &k)| (a, pieces[k].1)).collect();
    PartialMap::new(source, target.clone(), pairs).expect("refinement preserves measure")
}

fn arb_parts() -> impl Strategy<Value = Vec<Vec<u32>>> {
    vec(vec(1u32..=4, 1..=3), 0..=MAX_POINTS)
}

/// A total measure-preserving map `X → Y`.
pub fn arb_pres_map() -> BoxedStrategy<PartialMap> {
    (vec(arb_weight(), 0..=6), arb_parts(), vec(any::<Index>(), 0..=2), vec(any::<u8>(), 24))
        .prop_map(|(wy, parts, extras, keys)| refine_onto(&space_from(wy, "y"), &parts, &extras, &keys, "x"))
        .boxed()
}

fn add_unmapped(f: &PartialMap, extra: &[Rational], prefix: &str) -> PartialMap {
    let mut weights = f.source().weights().to_vec();
    weights.extend(extra.iter().cloned());
    let source = space_from(weights, prefix);
    PartialMap::new(source, f.target().clone(), f.pairs().collect()).expect("extra points are unmapped")
}

/// A measure-preserving partial map: a total one plus points left out of the domain.
pub fn arb_partial_map() -> BoxedStrategy<PartialMap> {
    (arb_pres_map(), vec(arb_weight(), 0..=3)).prop_map(|(f, extra)| add_unmapped(&f, &extra, "x")).boxed()
}

/// Composable total maps `s: X → Y`, `t: Y → Z`.
pub fn arb_pres_chain() -> BoxedStrategy<(PartialMap, PartialMap)> {
    (
        vec(arb_weight(), 0..=4),
        arb_parts(),
        vec(vec(1u32..=3, 1..=2), 0..=16),
        vec(any::<Index>(), 0..=2),
        vec(any::<u8>(), 24),
    )
        .prop_map(|(wz, p1, p2, extras, keys)| {
            let t = refine_onto(&space_from(wz, "z"), &p1, &extras, &keys, "y");
            let s = refine_onto(t.source(), &p2, &[], &keys, "x");
            (s, t)
        })
        .boxed()
}

/// Composable partial maps `(A, s): X → Y`, `(B, t): Y → Z`, each with
/// points left out of its domain.
pub fn arb_partial_chain() -> BoxedStrategy<(PartialMap, PartialMap)> {
    (
        vec(arb_weight(), 0..=4),
        arb_parts(),
        vec(arb_weight(), 0..=2),
        vec(vec(1u32..=3, 1..=2), 0..=16),
        vec(arb_weight(), 0..=2),
        vec(any::<u8>(), 24),
    )
        .prop_map(|(wz, p1, extra_y, p2, extra_x, keys)| {
            let t = add_unmapped(&refine_onto(&space_from(wz, "z"), &p1, &[], &keys, "y"), &extra_y, "y");
            let s = add_unmapped(&refine_onto(t.source(), &p2, &[], &keys, "x"), &extra_x, "x");
            (s, t)
        })
        .boxed()
}

/// Three composable partial maps `X → Y → Z → W`.
pub fn arb_partial_triple() -> BoxedStrategy<(PartialMap, PartialMap, PartialMap)> {
    (
        vec(arb_weight(), 0..=3),
        arb_parts(),
        vec(vec(1u32..=2, 1..=2), 0..=12),
        vec(vec(1u32..=2, 1..=2), 0..=16),
        vec(vec(arb_weight(), 0..=1), 3),
        vec(any::<u8>(), 32),
    )
        .prop_map(|(ww, p1, p2, p3, extra, keys)| {
            let h = add_unmapped(&refine_onto(&space_from(ww, "w"), &p1, &[], &keys, "z"), &extra[0], "z");
            let g = add_unmapped(&refine_onto(h.source(), &p2, &[], &keys, "y"), &extra[1], "y");
            let f = add_unmapped(&refine_onto(g.source(), &p3, &[], &keys, "x"), &extra[2], "x");
            (f, g, h)
        })
        .boxed()
}

/// A function on `x` taking values from a pool of 1–3 scalars, so fibres repeat.
pub fn arb_fn_on<S: Scalar>(x: FiniteMeasureSpace) -> BoxedStrategy<SimpleFn<S>> {
    let n = x.len();
    (vec(arb_scalar::<S>(), 1..=3), vec(any::<Index>(), n))
        .prop_map(move |(pool, idx)| {
            SimpleFn::new(x.clone(), idx.iter().map(|i| pool[i.index(pool.len())].clone()).collect()).expect("length")
        })
        .boxed()
}

pub fn arb_simple_fn<S: Scalar>() -> BoxedStrategy<SimpleFn<S>> {
    arb_space().prop_flat_map(arb_fn_on::<S>).boxed()
}

fn take<S: Scalar>(pool: &[S], n: usize) -> Vec<S> {
    (0..n).map(|i| pool[i % pool.len()].clone()).collect()
}

fn p_norm_of<S: Scalar>(target: &dyn FunctorTarget<S>, x: &FiniteMeasureSpace, u: &[S]) -> PNormValue {
    PNormValue { p: target.exponent(), value: target.norm(x, u) }
}

fn act_embed_checked<S: Scalar>(target: &dyn FunctorTarget<S>, e: &Embedding, u: &[S]) -> Result<Vec<S>, String> {
    target.act_embed(e).mul_vec(u).map_err(|e| e.to_string())
}

fn act_pres_checked<S: Scalar>(target: &dyn FunctorTarget<S>, s: &PartialMap) -> Result<Matrix<S>, String> {
    target
        .act_pres(s)
        .ok_or_else(|| format!("{} does not act on measure-preserving maps", target.name()))
}

fn psi_checked<S: Scalar>(target: &dyn FunctorTarget<S>, f: &SimpleFn<S>) -> Result<Vec<S>, String> {
    psi(target, f).map_err(|e| e.to_string())
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The laws run for one target, in a fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub target: String,
    pub category: Category,
    pub trials: u32,
    pub seed: u64,
    pub strict: bool,
    pub passed: bool,
    pub laws: Vec<LawOutcome>,
}

impl AxiomReport {
    fn new(target: String, category: Category, trials: u32, seed: u64, strict: bool, laws: Vec<LawOutcome>) -> Self {
        let passed = laws.iter().all(|l| l.passed);
        AxiomReport { target, category, trials, seed, strict, passed, laws }
    }

    pub fn law(&self, name: &str) -> Option<&LawOutcome> {
        self.laws.iter().find(|l| l.law == name)
    }
}

/// Checks (I)–(IV) or (IV_H) and functoriality on generated spaces and maps.
/// `strict` also demands equality in (III) and (IV).
pub fn verify_axioms<S: Scalar>(target: &dyn FunctorTarget<S>, category: Category, trials: u32, seed: u64, strict: bool) -> AxiomReport {
    let mut laws = Vec::new();
    let full = category != Category::Bemb;

    laws.push(check_law("I", seed, trials, arb_split(), |(x, part)| {
        let i = Embedding::inclusion(x, part);
        let j = i.complement();
        let lhs = vec_add(
            &act_embed_checked(target, &i, &target.distinguished(i.sub()))?,
            &act_embed_checked(target, &j, &target.distinguished(j.sub()))?,
        );
        expect(lhs == target.distinguished(x), || format!("F(i)v_Y + F(j)v_Z = {lhs:?}, v_X = {:?}", target.distinguished(x)))
    }));

    if full {
        laws.push(check_law("II", seed, trials, arb_pres_map(), |s| {
            let m = act_pres_checked(target, s)?;
            let lhs = m.mul_vec(&target.distinguished(s.target())).map_err(|e| e.to_string())?;
            expect(lhs == target.distinguished(s.source()), || format!("F(s)v_Y = {lhs:?}"))
        }));
    }

    laws.push(check_law("III", seed, trials, arb_space(), |x| {
        let v = target.distinguished(x);
        expect(within_mass_bound(target, x, &v, &x.total()), || {
            format!("|v_X| = {} exceeds mu(X)^(1/p) = {}", target.norm(x, &v).to_f64(), mass_bound(&x.total(), &target.exponent()).to_f64())
        })
    }));

    let vectors = (arb_split(), vec(arb_scalar::<S>(), POOL), vec(arb_scalar::<S>(), POOL));
    if category == Category::H {
        laws.push(check_law("IV_H", seed, trials, arb_split(), |(x, part)| {
            let i = Embedding::inclusion(x, part);
            let j = i.complement();
            let a = act_embed_checked(target, &i, &target.distinguished(i.sub()))?;
            let b = act_embed_checked(target, &j, &target.distinguished(j.sub()))?;
            let ip = target.inner(x, &a, &b).ok_or_else(|| format!("{} has no inner product", target.name()))?;
            expect(ip.is_zero(), || format!("<F(i)v_Y, F(j)v_Z> = {ip}"))
        }));
    } else {
        laws.push(check_law("IV", seed, trials, vectors.clone(), |((x, part), pu, pw)| {
            let i = Embedding::inclusion(x, part);
            let j = i.complement();
            let u = take(pu, target.dim(i.sub()));
            let w = take(pw, target.dim(j.sub()));
            let sum = vec_add(&act_embed_checked(target, &i, &u)?, &act_embed_checked(target, &j, &w)?);
            let lhs = p_norm_of(target, x, &sum);
            let rhs = direct_sum_norm(&p_norm_of(target, i.sub(), &u), &p_norm_of(target, j.sub(), &w), Weighting::Plain)
                .map_err(|e| e.to_string())?;
            expect(lhs.le(&rhs, CONTRACTION_TOL), || format!("|F(i)u + F(j)w| = {} > {}", lhs.to_f64(), rhs.to_f64()))
        }));
    }

    laws.push(check_law("functoriality-embeddings", seed, trials, arb_nested(), |(k, i)| {
        let composite = target.act_embed(&i.after(k).map_err(|e| e.to_string())?);
        let chained = target.act_embed(i).mul(&target.act_embed(k)).map_err(|e| e.to_string())?;
        expect(composite == chained, || "F(i o k) differs from F(i) F(k)".into())?;
        let x = i.ambient();
        expect(target.act_embed(&Embedding::identity(x)) == Matrix::identity(target.dim(x)), || "F(id) is not the identity".into())?;
        let as_partial = target.act_partial(&i.to_partial_map());
        match as_partial {
            Some(m) => expect(m == target.act_embed(i), || "the embedding acts differently as a partial map".into()),
            None => Ok(()),
        }
    }));

    if full {
        laws.push(check_law("functoriality-maps", seed, trials, arb_pres_chain(), |(s, t)| {
            let ts = compose_partial(s, t).map_err(|e| e.to_string())?;
            let lhs = act_pres_checked(target, &ts)?;
            let rhs = act_pres_checked(target, s)?.mul(&act_pres_checked(target, t)?).map_err(|e| e.to_string())?;
            expect(lhs == rhs, || "F(t o s) differs from F(s) F(t)".into())?;
            let id = act_pres_checked(target, &PartialMap::identity(s.source()))?;
            expect(id == Matrix::identity(target.dim(s.source())), || "F(id) is not the identity".into())
        }));
        laws.push(check_law("functoriality-partial", seed, trials, arb_partial_chain(), |(f, g)| {
            let gf = compose_partial(f, g).map_err(|e| e.to_string())?;
            let missing = || format!("{} does not act on partial maps", target.name());
            let lhs = target.act_partial(&gf).ok_or_else(missing)?;
            let rhs = target
                .act_partial(f)
                .ok_or_else(missing)?
                .mul(&target.act_partial(g).ok_or_else(missing)?)
                .map_err(|e| e.to_string())?;
            expect(lhs == rhs, || "F(g o f) differs from F(f) F(g)".into())
        }));
    }

    if strict {
        laws.push(check_law("III-equality", seed, trials, arb_space(), |x| {
            let v = p_norm_of(target, x, &target.distinguished(x));
            let bound = PNormValue { p: target.exponent(), value: mass_bound(&x.total(), &target.exponent()) };
            expect(v.close_to(&bound, CONTRACTION_TOL), || format!("|v_X| = {} but mu(X)^(1/p) = {}", v.to_f64(), bound.to_f64()))
        }));
        if category != Category::H {
            laws.push(check_law("IV-equality", seed, trials, vectors, |((x, part), pu, pw)| {
                let i = Embedding::inclusion(x, part);
                let j = i.complement();
                let u = take(pu, target.dim(i.sub()));
                let w = take(pw, target.dim(j.sub()));
                let sum = vec_add(&act_embed_checked(target, &i, &u)?, &act_embed_checked(target, &j, &w)?);
                let lhs = p_norm_of(target, x, &sum);
                let rhs = direct_sum_norm(&p_norm_of(target, i.sub(), &u), &p_norm_of(target, j.sub(), &w), Weighting::Plain)
                    .map_err(|e| e.to_string())?;
                expect(lhs.close_to(&rhs, CONTRACTION_TOL), || format!("|F(i)u + F(j)w| = {} < {}", lhs.to_f64(), rhs.to_f64()))
            }));
        }
    }

    AxiomReport::new(target.name(), category, trials, seed, strict, laws)
}

/// `‖v‖ ≤ ‖f‖_p`, compared through squares for Hilbert-valued targets.
fn psi_norm_le<S: Scalar>(target: &dyn FunctorTarget<S>, x: &FiniteMeasureSpace, v: &[S], f: &SimpleFn<S>) -> bool {
    let p = target.exponent();
    if p == Exponent::integer(2) {
        if let Some(sq) = target.norm_sq(x, v) {
            let bound: Rational = f.values().iter().zip(x.weights()).map(|(c, w)| &c.modulus_sq() * w).sum();
            return sq <= bound;
        }
    }
    p_norm_of(target, x, v).le(&sp_norm(f, &p), CONTRACTION_TOL)
}

/// Linearity, naturality, the norm bounds, Beck–Chevalley, additivity, and
/// for Hilbert-valued targets orthogonality and the Pythagorean identity.
pub fn verify_psi<S: Scalar>(target: &dyn FunctorTarget<S>, category: Category, trials: u32, seed: u64) -> AxiomReport {
    let mut laws = Vec::new();
    let full = category != Category::Bemb;

    laws.push(check_law("psi-unit", seed, trials, arb_space(), |x| {
        let v = psi_checked(target, &SimpleFn::ones(x))?;
        expect(v == target.distinguished(x), || format!("psi(I) = {v:?}"))
    }));

    let pair = arb_space().prop_flat_map(|x| (arb_fn_on::<S>(x.clone()), arb_fn_on::<S>(x), arb_scalar::<S>()));
    laws.push(check_law("psi-linearity", seed, trials, pair, |(f, g, c)| {
        let sum = psi_checked(target, &f.add(g).map_err(|e| e.to_string())?)?;
        let parts = vec_add(&psi_checked(target, f)?, &psi_checked(target, g)?);
        expect(sum == parts, || "psi(f + g) differs from psi(f) + psi(g)".into())?;
        let scaled = psi_checked(target, &f.scale(c))?;
        let expected: Vec<S> = psi_checked(target, f)?.iter().map(|e| c.mul_ref(e)).collect();
        expect(scaled == expected, || "psi(c f) differs from c psi(f)".into())
    }));

    let split_fn = arb_split().prop_flat_map(|(x, part)| {
        let y = x.subspace(&part);
        (Just(x), Just(part), arb_fn_on::<S>(y))
    });
    laws.push(check_law("psi-natural-embeddings", seed, trials, split_fn, |(x, part, g)| {
        let i = Embedding::inclusion(x, part);
        let lhs = act_embed_checked(target, &i, &psi_checked(target, g)?)?;
        let rhs = psi_checked(target, &g.extend(&i).map_err(|e| e.to_string())?)?;
        expect(lhs == rhs, || format!("F(i) psi_Y(g) = {lhs:?}, psi_X(g^X) = {rhs:?}"))
    }));

    if full {
        let pres_fn = arb_partial_map().prop_flat_map(|s| {
            let y = s.target().clone();
            (Just(s), arb_fn_on::<S>(y))
        });
        laws.push(check_law("psi-natural-maps", seed, trials, pres_fn, |(s, g)| {
            let m = target
                .act_partial(s)
                .ok_or_else(|| format!("{} does not act on partial maps", target.name()))?;
            let lhs = m.mul_vec(&psi_checked(target, g)?).map_err(|e| e.to_string())?;
            let rhs = psi_checked(target, &lp_pullback(s, g).map_err(|e| e.to_string())?)?;
            expect(lhs == rhs, || format!("F(s) psi_Y(g) = {lhs:?}, psi_X(g o s) = {rhs:?}"))
        }));
    }

    laws.push(check_law("psi-norm-bound", seed, trials, arb_simple_fn::<S>(), |f| {
        let v = psi_checked(target, f)?;
        expect(psi_norm_le(target, f.space(), &v, f), || {
            format!("|psi(f)| = {} > |f|_p = {}", target.norm(f.space(), &v).to_f64(), sp_norm(f, &target.exponent()).to_f64())
        })
    }));

    laws.push(check_law("subspace-bound", seed, trials, arb_split(), |(x, part)| {
        let v = v_sub(target, x, part);
        let m = x.measure(part);
        expect(within_mass_bound(target, x, &v, &m), || format!("|v^X_Y| = {} exceeds the bound for mu(Y) = {m}", target.norm(x, &v).to_f64()))?;
        if m.is_zero() {
            let n = target.norm(x, &v);
            expect(n.to_f64() == 0.0, || format!("Y is null but |v^X_Y| = {}", n.to_f64()))?;
        }
        Ok(())
    }));

    if target.act_pres(&PartialMap::identity(&FiniteMeasureSpace::empty())).is_some() {
        let bc = (arb_pres_map(), vec(any::<bool>(), MAX_POINTS));
        laws.push(check_law("beck-chevalley", seed, trials, bc, |(s, mask)| {
            let b: Vec<usize> = (0..s.target().len()).filter(|&y| mask[y % mask.len()]).collect();
            let ok = check_beck_chevalley(target, s, &b).map_err(|e| e.to_string())?;
            expect(ok, || format!("F(i) F(s') differs from F(s) F(j) for B = {b:?}"))
        }));
    }

    laws.push(check_law("additivity", seed, trials, arb_labelled(), |(x, labels)| {
        let classes = super::label_classes(labels);
        expect(check_additivity(target, x, &classes).map_err(|e| e.to_string())?, || format!("v^X is not additive on {classes:?}"))?;
        let empty = v_sub(target, x, &[]);
        expect(empty.iter().all(|e| e.is_zero()), || format!("v^X of the empty set is {empty:?}"))
    }));

    if target.inner(&FiniteMeasureSpace::empty(), &[], &[]).is_some() {
        laws.push(check_law("orthogonality", seed, trials, arb_labelled(), |(x, labels)| {
            let classes = super::label_classes(labels);
            for a in 0..classes.len() {
                for b in a + 1..classes.len() {
                    let ip = target.inner(x, &v_sub(target, x, &classes[a]), &v_sub(target, x, &classes[b])).expect("inner");
                    expect(ip.is_zero(), || format!("<v^X_Y, v^X_Z> = {ip} for disjoint Y, Z"))?;
                }
            }
            Ok(())
        }));
        laws.push(check_law("pythagoras", seed, trials, arb_simple_fn::<S>(), |f| {
            let x = f.space();
            let whole = target.norm_sq(x, &psi_checked(target, f)?).expect("inner");
            let mut parts = Rational::zero();
            for (c, fibre) in f.fibres() {
                parts += &(&c.modulus_sq() * &target.norm_sq(x, &v_sub(target, x, &fibre)).expect("inner"));
            }
            expect((whole.to_f64() - parts.to_f64()).abs() <= CONTRACTION_TOL, || format!("|psi(f)|^2 = {whole}, sum over fibres = {parts}"))
        }));
    }

    AxiomReport::new(target.name(), category, trials, seed, false, laws)
}

/// Compares a natural family against ψ on generated functions.
pub fn check_uniqueness<S: Scalar>(
    target: &dyn FunctorTarget<S>,
    family: &dyn Fn(&SimpleFn<S>) -> Vec<S>,
    trials: u32,
    seed: u64,
) -> LawOutcome {
    check_law("uniqueness", seed, trials, arb_simple_fn::<S>(), |f| {
        let (a, b) = (family(f), psi_checked(target, f)?);
        expect(a == b, || format!("family gives {a:?}, psi gives {b:?}"))
    })
}

fn norms_agree(a: &NormValue, b: &NormValue) -> bool {
    match (a, b) {
        (NormValue::Exact(x), NormValue::Exact(y)) => x == y,
        _ => crate::norm::rel_close(a.to_f64(), b.to_f64(), 1e-12),
    }
}

/// Integration and density measures: change of variables, extension by
/// zero, agreement with ψ into `(𝔽, t)`, the total-variation isometry, and
/// orthogonality of disjoint indicators.
pub fn verify_integration<S: Scalar>(trials: u32, seed: u64) -> Vec<LawOutcome> {
    let mut laws = Vec::new();

    laws.push(check_law("integral-is-psi", seed, trials, arb_simple_fn::<S>(), |f| {
        let psi_t = psi_checked(&ScalarTarget as &dyn FunctorTarget<S>, f)?;
        expect(psi_t[0] == integrate_measure(f), || format!("psi gives {}, the integral is {}", psi_t[0], integrate_measure(f)))
    }));

    let map_fn = arb_partial_map().prop_flat_map(|s| {
        let y = s.target().clone();
        (Just(s), arb_fn_on::<S>(y))
    });
    laws.push(check_law("change-of-variables", seed, trials, map_fn, |(s, g)| {
        let pulled = lp_pullback(s, g).map_err(|e| e.to_string())?;
        let (a, b) = (integrate_measure(g), integrate_measure(&pulled));
        expect(a == b, || format!("int_Y g = {a}, int_X g o s = {b}"))
    }));

    let split_fn = arb_split().prop_flat_map(|(x, part)| {
        let y = x.subspace(&part);
        (Just(x), Just(part), arb_fn_on::<S>(y))
    });
    laws.push(check_law("extension-by-zero", seed, trials, split_fn.clone(), |(x, part, g)| {
        let i = Embedding::inclusion(x, part);
        let ext = g.extend(&i).map_err(|e| e.to_string())?;
        let (a, b) = (integrate_measure(&ext), integrate_measure(g));
        expect(a == b, || format!("int_X g^X = {a}, int_Y g = {b}"))
    }));

    laws.push(check_law("density-naturality", seed, trials, split_fn, |(x, part, g)| {
        let i = Embedding::inclusion(x, part);
        let lhs = density_measure(&g.extend(&i).map_err(|e| e.to_string())?);
        let rhs = density_measure(g).extend(&i).map_err(|e| e.to_string())?;
        expect(lhs == rhs, || "density of the extension differs from the extended density".into())
    }));

    laws.push(check_law("tv-isometry", seed, trials, arb_simple_fn::<S>(), |f| {
        let tv = density_measure(f).total_variation();
        let l1 = sp_norm(f, &Exponent::one()).value;
        expect(norms_agree(&tv, &l1), || format!("|f mu|_TV = {}, |f|_1 = {}", tv.to_f64(), l1.to_f64()))
    }));

    laws.push(check_law("indicator-orthogonality", seed, trials, arb_labelled(), |(x, labels)| {
        let classes = super::label_classes(labels);
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                let ip: S = inner_product(&SimpleFn::indicator(x, &classes[a]), &SimpleFn::indicator(x, &classes[b]))
                    .map_err(|e| e.to_string())?;
                expect(ip.is_zero(), || format!("<I_Y, I_Z> = {ip}"))?;
            }
        }
        let ones: SimpleFn<S> = SimpleFn::ones(x);
        let total = inner_product(&ones, &ones).map_err(|e| e.to_string())?;
        expect(total == S::from_rational(x.total()), || format!("<I, I> = {total}"))
    }));

    laws
}

/// Associativity and unit laws of partial-map composition, and measure
/// preservation of composites.
pub fn verify_category_laws(trials: u32, seed: u64) -> Vec<LawOutcome> {
    let assoc = check_law("associativity", seed, trials, arb_partial_triple(), |(f, g, h)| {
        let left = compose_partial(&compose_partial(f, g).map_err(|e| e.to_string())?, h).map_err(|e| e.to_string())?;
        let right = compose_partial(f, &compose_partial(g, h).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        expect(left == right, || format!("(h g) f = {left:?}, h (g f) = {right:?}"))?;
        expect(left.is_measure_preserving(), || "composite is not measure-preserving".into())
    });
    let unit = check_law("unit", seed, trials, arb_partial_map(), |f| {
        let a = compose_partial(&PartialMap::identity(f.source()), f).map_err(|e| e.to_string())?;
        let b = compose_partial(f, &PartialMap::identity(f.target())).map_err(|e| e.to_string())?;
        expect(&a == f && &b == f, || "identity is not a unit".into())
    });
    let domains = check_law("composite-domain", seed, trials, arb_partial_chain(), |(f, g)| {
        let gf = compose_partial(f, g).map_err(|e| e.to_string())?;
        let expected = f.preimage(g.domain());
        expect(gf.domain() == expected.as_slice(), || format!("domain {:?}, preimage {expected:?}", gf.domain()))
    });
    vec![assoc, unit, domains]
}

/// A target together with the category it is checked in.
pub struct CategorisedTarget<S: Scalar> {
    pub target: Box<dyn FunctorTarget<S>>,
    pub category: Category,
}

/// `(𝔽, t)`, `(S^p, I)` for several `p`, `(M, μ)`, and a random Hilbert target.
pub fn shipped_measure_targets<S: Scalar>(seed: u64) -> Vec<CategorisedTarget<S>> {
    let mut rng = gen::rng(seed, "hilbert-target");
    let sp = |p: Exponent| Box::new(SimpleFunctions { p }) as Box<dyn FunctorTarget<S>>;
    vec![
        CategorisedTarget { target: Box::new(ScalarTarget), category: Category::B },
        CategorisedTarget { target: sp(Exponent::one()), category: Category::B },
        CategorisedTarget { target: sp(Exponent::integer(2)), category: Category::H },
        CategorisedTarget { target: sp(Exponent::integer(3)), category: Category::B },
        CategorisedTarget { target: sp(Exponent::Infinite), category: Category::B },
        CategorisedTarget { target: Box::new(Measures), category: Category::Bemb },
        CategorisedTarget { target: Box::new(HilbertTensor::<S>::random(&mut rng, 2)), category: Category::H },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{DoubledUnit, SquaredMass};
    use proptest::strategy::ValueTree;

    #[test]
    fn generated_maps_are_measure_preserving() {
        let mut runner = crate::report::runner(1, "gen", 64);
        for _ in 0..64 {
            let f = arb_partial_map().new_tree(&mut runner).unwrap().current();
            assert!(f.is_measure_preserving());
            let (s, t) = arb_partial_chain().new_tree(&mut runner).unwrap().current();
            assert!(compose_partial(&s, &t).unwrap().is_measure_preserving());
        }
    }

    #[test]
    fn shipped_targets_pass() {
        for t in shipped_measure_targets::<Rational>(3) {
            let r = verify_axioms(t.target.as_ref(), t.category, 40, 9, false);
            assert!(r.passed, "{r:#?}");
            let r = verify_psi(t.target.as_ref(), t.category, 40, 9);
            assert!(r.passed, "{r:#?}");
        }
    }

    #[test]
    fn simple_functions_attain_equality() {
        for p in [Exponent::one(), Exponent::integer(2), Exponent::Infinite] {
            let r = verify_axioms::<Rational>(&SimpleFunctions { p }, Category::B, 40, 2, true);
            assert!(r.passed, "{r:#?}");
        }
        let r = verify_axioms::<Rational>(&ScalarTarget, Category::B, 40, 2, false);
        assert!(r.passed);
    }

    #[test]
    fn negative_controls_are_caught_with_small_witnesses() {
        let r = verify_axioms::<Rational>(&DoubledUnit { p: Exponent::one() }, Category::B, 100, 4, false);
        let iii = r.law("III").unwrap();
        assert!(!iii.passed);
        assert!(iii.counterexample.as_ref().unwrap().len() < 40, "{iii:?}");
        let r = verify_axioms::<Rational>(&SquaredMass, Category::B, 100, 4, false);
        assert!(!r.law("I").unwrap().passed);
    }

    #[test]
    fn integration_laws_hold() {
        for l in verify_integration::<Rational>(50, 11) {
            assert!(l.passed, "{l:?}");
        }
        for l in verify_integration::<crate::scalar::ComplexRational>(30, 11) {
            assert!(l.passed, "{l:?}");
        }
    }

    #[test]
    fn uniqueness_against_a_hand_written_family() {
        let family = |f: &SimpleFn<Rational>| vec![integrate_measure(f)];
        assert!(check_uniqueness(&ScalarTarget, &family, 50, 1).passed);
        let wrong = |f: &SimpleFn<Rational>| vec![f.values().iter().cloned().sum()];
        assert!(!check_uniqueness(&ScalarTarget, &wrong, 50, 1).passed);
    }
}
