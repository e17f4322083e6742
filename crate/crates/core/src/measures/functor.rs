//! Targets `(F, v)`: a finite-dimensional space `F(X)` per measure space,
//! linear actions of embeddings and measure-preserving maps, and a
//! distinguished `v_X ∈ F(X)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{mass_bound, sp_norm, Embedding, FiniteMeasureSpace, PartialMap, SimpleFn};
use crate::error::{Error, Result};
use crate::gen;
use crate::linalg::{vec_add, Matrix};
use crate::norm::{weighted_p_norm, NormValue};
use crate::scalar::{Exponent, Rational, Scalar};
use crate::universal::{value_le, CONTRACTION_TOL};

/// Which maps a target must be functorial on, and which norm axiom applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Embeddings only; axioms (I), (III), (IV).
    Bemb,
    /// All measure-preserving partial maps; axioms (I)–(IV).
    B,
    /// Hilbert-valued, all maps; axioms (I)–(III) and (IV_H).
    H,
}

impl FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Bemb" | "bemb" => Ok(Category::Bemb),
            "B" | "b" => Ok(Category::B),
            "H" | "h" => Ok(Category::H),
            other => Err(Error::Parse(format!("unknown category {other:?} (expected Bemb, B or H)"))),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Bemb => "Bemb",
            Category::B => "B",
            Category::H => "H",
        })
    }
}

pub trait FunctorTarget<S: Scalar>: Send + Sync {
    fn name(&self) -> String;

    fn exponent(&self) -> Exponent;

    fn dim(&self, x: &FiniteMeasureSpace) -> usize;

    /// `v_X`.
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S>;

    /// `F(i): F(Y) → F(X)` for an embedding `i: Y → X`.
    fn act_embed(&self, e: &Embedding) -> Matrix<S>;

    /// `F(s): F(Y) → F(X)` for a total measure-preserving `s: X → Y`;
    /// `None` for targets defined on embeddings only.
    fn act_pres(&self, s: &PartialMap) -> Option<Matrix<S>>;

    fn norm(&self, x: &FiniteMeasureSpace, u: &[S]) -> NormValue;

    /// Inner product, for Hilbert-valued targets.
    fn inner(&self, _x: &FiniteMeasureSpace, _u: &[S], _w: &[S]) -> Option<S> {
        None
    }

    /// `‖u‖²` exactly, when an inner product is available.
    fn norm_sq(&self, x: &FiniteMeasureSpace, u: &[S]) -> Option<Rational> {
        self.inner(x, u, u).map(|s| s.real_part())
    }

    /// `F(A, s) = F(i_A) ∘ F(s|_A)` via the canonical factorisation.
    fn act_partial(&self, f: &PartialMap) -> Option<Matrix<S>> {
        let (inc, rest) = f.factor();
        let pres = self.act_pres(&rest)?;
        Some(self.act_embed(&inc).mul(&pres).expect("composable"))
    }
}

fn kron_identity<S: Scalar>(m: &Matrix<S>, k: usize) -> Matrix<S> {
    let mut out = Matrix::zeros(m.rows() * k, m.cols() * k);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m.get(i, j).is_zero() {
                for a in 0..k {
                    out.set(i * k + a, j * k + a, m.get(i, j).clone());
                }
            }
        }
    }
    out
}

fn modulus_value<S: Scalar>(x: &S) -> NormValue {
    match x.modulus_exact() {
        Some(r) => NormValue::Exact(r),
        None => NormValue::Approx(x.modulus_f64()),
    }
}

/// `(𝔽, t)` with `t_X = μ(X)`: the target of integration, `p = 1`.
#[derive(Clone, Debug, Default)]
pub struct ScalarTarget;

impl<S: Scalar> FunctorTarget<S> for ScalarTarget {
    fn name(&self) -> String {
        "scalar-total-mass".into()
    }
    fn exponent(&self) -> Exponent {
        Exponent::one()
    }
    fn dim(&self, _: &FiniteMeasureSpace) -> usize {
        1
    }
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S> {
        vec![S::from_rational(x.total())]
    }
    fn act_embed(&self, _: &Embedding) -> Matrix<S> {
        Matrix::identity(1)
    }
    fn act_pres(&self, _: &PartialMap) -> Option<Matrix<S>> {
        Some(Matrix::identity(1))
    }
    fn norm(&self, _: &FiniteMeasureSpace, u: &[S]) -> NormValue {
        modulus_value(&u[0])
    }
}

/// `(S^p, I)`: simple functions up to null sets, with the constant 1.
#[derive(Clone, Debug)]
pub struct SimpleFunctions {
    pub p: Exponent,
}

impl<S: Scalar> FunctorTarget<S> for SimpleFunctions {
    fn name(&self) -> String {
        format!("simple-functions-p{}", self.p)
    }
    fn exponent(&self) -> Exponent {
        self.p.clone()
    }
    fn dim(&self, x: &FiniteMeasureSpace) -> usize {
        x.len()
    }
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S> {
        vec![S::one(); x.len()]
    }
    fn act_embed(&self, e: &Embedding) -> Matrix<S> {
        e.extension_matrix()
    }
    fn act_pres(&self, s: &PartialMap) -> Option<Matrix<S>> {
        Some(s.pullback_matrix())
    }
    fn norm(&self, x: &FiniteMeasureSpace, u: &[S]) -> NormValue {
        sp_norm(&SimpleFn::new(x.clone(), u.to_vec()).expect("dimension"), &self.p).value
    }
    fn inner(&self, x: &FiniteMeasureSpace, u: &[S], w: &[S]) -> Option<S> {
        if self.p != Exponent::integer(2) {
            return None;
        }
        let f = SimpleFn::new(x.clone(), u.to_vec()).expect("dimension");
        let g = SimpleFn::new(x.clone(), w.to_vec()).expect("dimension");
        super::inner_product(&f, &g).ok()
    }
}

/// `(M, μ)`: measures with the total-variation norm, on embeddings, `p = 1`.
#[derive(Clone, Debug, Default)]
pub struct Measures;

impl<S: Scalar> FunctorTarget<S> for Measures {
    fn name(&self) -> String {
        "measures".into()
    }
    fn exponent(&self) -> Exponent {
        Exponent::one()
    }
    fn dim(&self, x: &FiniteMeasureSpace) -> usize {
        x.len()
    }
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S> {
        x.weights().iter().cloned().map(S::from_rational).collect()
    }
    fn act_embed(&self, e: &Embedding) -> Matrix<S> {
        e.extension_matrix()
    }
    fn act_pres(&self, _: &PartialMap) -> Option<Matrix<S>> {
        None
    }
    fn norm(&self, _: &FiniteMeasureSpace, u: &[S]) -> NormValue {
        let one = Rational::one();
        weighted_p_norm(u.iter().map(|m| (m, &one)), &Exponent::one()).value
    }
}

/// `𝔽^k ⊗ S²`: `k`-vector-valued functions with a Gram matrix `G`, and
/// distinguished element the constant function `u` with `⟨u, u⟩_G ≤ 1`.
#[derive(Clone, Debug)]
pub struct HilbertTensor<S: Scalar = Rational> {
    k: usize,
    gram: Matrix<S>,
    u: Vec<S>,
}

impl<S: Scalar> HilbertTensor<S> {
    pub fn new(gram: Matrix<S>, u: Vec<S>) -> Result<Self> {
        let k = u.len();
        if gram.shape() != (k, k) || k == 0 {
            return Err(Error::Shape("Gram matrix must be k x k for a nonempty u".into()));
        }
        let t = HilbertTensor { k, gram, u };
        let q = t.gram_form(&t.u, &t.u).real_part();
        if q > Rational::one() {
            return Err(Error::Axiom { axiom: "III".into(), detail: format!("<u, u> = {q} exceeds 1") });
        }
        Ok(t)
    }

    /// `G = BᴴB + I` for a random `B`, and a random `u` scaled into the unit ball.
    pub fn random(rng: &mut impl Rng, k: usize) -> Self {
        let b: Vec<Vec<S>> = (0..k).map(|_| (0..k).map(|_| gen::random_scalar::<S>(rng).mul_pow2(-3)).collect()).collect();
        let mut gram = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = if i == j { S::one() } else { S::zero() };
                for row in &b {
                    acc = acc.add_ref(&row[j].conj().mul_ref(&row[i]));
                }
                gram.set(i, j, acc);
            }
        }
        let raw: Vec<S> = gen::random_vec(rng, k);
        let probe = HilbertTensor { k, gram: gram.clone(), u: raw.clone() };
        let q = probe.gram_form(&raw, &raw).real_part();
        let mut m = q.to_f64().sqrt().ceil().max(1.0) as i64;
        while Rational::from(m * m) < q {
            m += 1;
        }
        let c = Rational::new(1, m);
        let u = raw.iter().map(|x| x.scale_rational(&c)).collect();
        HilbertTensor::new(gram, u).expect("scaled into the unit ball")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Σ_ij a_i G_ij conj(b_j)`.
    #[allow(clippy::needless_range_loop)]
    fn gram_form(&self, a: &[S], b: &[S]) -> S {
        let mut acc = S::zero();
        for i in 0..self.k {
            for j in 0..self.k {
                acc = acc.add_ref(&a[i].mul_ref(self.gram.get(i, j)).mul_ref(&b[j].conj()));
            }
        }
        acc
    }
}

impl<S: Scalar> FunctorTarget<S> for HilbertTensor<S> {
    fn name(&self) -> String {
        format!("hilbert-tensor-k{}", self.k)
    }
    fn exponent(&self) -> Exponent {
        Exponent::integer(2)
    }
    fn dim(&self, x: &FiniteMeasureSpace) -> usize {
        self.k * x.len()
    }
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S> {
        (0..x.len()).flat_map(|_| self.u.iter().cloned()).collect()
    }
    fn act_embed(&self, e: &Embedding) -> Matrix<S> {
        kron_identity(&e.extension_matrix(), self.k)
    }
    fn act_pres(&self, s: &PartialMap) -> Option<Matrix<S>> {
        Some(kron_identity(&s.pullback_matrix(), self.k))
    }
    fn norm(&self, x: &FiniteMeasureSpace, u: &[S]) -> NormValue {
        let sq = self.norm_sq(x, u).expect("inner product");
        match sq.sqrt_exact() {
            Some(r) => NormValue::Exact(r),
            None => NormValue::Approx(sq.to_f64().max(0.0).sqrt()),
        }
    }
    fn inner(&self, x: &FiniteMeasureSpace, u: &[S], w: &[S]) -> Option<S> {
        let mut acc = S::zero();
        for (i, wt) in x.weights().iter().enumerate() {
            let r = i * self.k..(i + 1) * self.k;
            acc = acc.add_ref(&self.gram_form(&u[r.clone()], &w[r]).scale_rational(wt));
        }
        Some(acc)
    }
}

/// Negative control: `(S^p, 2I)`, which breaks the unit bound.
#[derive(Clone, Debug)]
pub struct DoubledUnit {
    pub p: Exponent,
}

impl<S: Scalar> FunctorTarget<S> for DoubledUnit {
    fn name(&self) -> String {
        format!("doubled-unit-p{}", self.p)
    }
    fn exponent(&self) -> Exponent {
        self.p.clone()
    }
    fn dim(&self, x: &FiniteMeasureSpace) -> usize {
        x.len()
    }
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S> {
        vec![S::one().add_ref(&S::one()); x.len()]
    }
    fn act_embed(&self, e: &Embedding) -> Matrix<S> {
        e.extension_matrix()
    }
    fn act_pres(&self, s: &PartialMap) -> Option<Matrix<S>> {
        Some(s.pullback_matrix())
    }
    fn norm(&self, x: &FiniteMeasureSpace, u: &[S]) -> NormValue {
        <SimpleFunctions as FunctorTarget<S>>::norm(&SimpleFunctions { p: self.p.clone() }, x, u)
    }
}

/// Negative control: `(𝔽, μ(X)²)`, which is not additive.
#[derive(Clone, Debug, Default)]
pub struct SquaredMass;

impl<S: Scalar> FunctorTarget<S> for SquaredMass {
    fn name(&self) -> String {
        "squared-mass".into()
    }
    fn exponent(&self) -> Exponent {
        Exponent::one()
    }
    fn dim(&self, _: &FiniteMeasureSpace) -> usize {
        1
    }
    fn distinguished(&self, x: &FiniteMeasureSpace) -> Vec<S> {
        let t = x.total();
        vec![S::from_rational(&t * &t)]
    }
    fn act_embed(&self, _: &Embedding) -> Matrix<S> {
        Matrix::identity(1)
    }
    fn act_pres(&self, _: &PartialMap) -> Option<Matrix<S>> {
        Some(Matrix::identity(1))
    }
    fn norm(&self, _: &FiniteMeasureSpace, u: &[S]) -> NormValue {
        modulus_value(&u[0])
    }
}

/// JSON description of a target, for loading from files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub enum TargetSpec<S: Scalar = Rational> {
    Scalar,
    SimpleFunctions { p: Exponent },
    Measures,
    HilbertTensor { gram: Matrix<S>, u: Vec<S> },
    DoubledUnit { p: Exponent },
    SquaredMass,
}

impl<S: Scalar> TargetSpec<S> {
    pub fn build(&self) -> Result<Box<dyn FunctorTarget<S>>> {
        Ok(match self {
            TargetSpec::Scalar => Box::new(ScalarTarget),
            TargetSpec::SimpleFunctions { p } => Box::new(SimpleFunctions { p: p.clone() }),
            TargetSpec::Measures => Box::new(Measures),
            TargetSpec::HilbertTensor { gram, u } => Box::new(HilbertTensor::new(gram.clone(), u.clone())?),
            TargetSpec::DoubledUnit { p } => Box::new(DoubledUnit { p: p.clone() }),
            TargetSpec::SquaredMass => Box::new(SquaredMass),
        })
    }

    /// The largest category the target is meant to live in.
    pub fn category(&self) -> Category {
        match self {
            TargetSpec::Measures => Category::Bemb,
            TargetSpec::HilbertTensor { .. } => Category::H,
            TargetSpec::SimpleFunctions { p } if *p == Exponent::integer(2) => Category::H,
            _ => Category::B,
        }
    }
}

/// `v^X_Y = F(i)(v_Y)` for the inclusion of `subset`.
pub fn v_sub<S: Scalar>(target: &dyn FunctorTarget<S>, x: &FiniteMeasureSpace, subset: &[usize]) -> Vec<S> {
    let inc = Embedding::inclusion(x, subset);
    target
        .act_embed(&inc)
        .mul_vec(&target.distinguished(inc.sub()))
        .expect("action matches dimensions")
}

/// `‖v‖ ≤ μ^{1/p}` (up to the float tolerance).
pub fn within_mass_bound<S: Scalar>(target: &dyn FunctorTarget<S>, x: &FiniteMeasureSpace, v: &[S], mass: &Rational) -> bool {
    let p = target.exponent();
    if p == Exponent::integer(2) {
        if let Some(sq) = target.norm_sq(x, v) {
            return sq <= *mass;
        }
    }
    value_le(&target.norm(x, v), &mass_bound(mass, &p), CONTRACTION_TOL)
}

/// `ψ_X(f) = Σ_c c · v^X_{f⁻¹(c)}`, after checking (I) on the fibres of `f`
/// and (III) on `X`.
pub fn psi<S: Scalar>(target: &dyn FunctorTarget<S>, f: &SimpleFn<S>) -> Result<Vec<S>> {
    let x = f.space();
    let d = target.dim(x);
    let mut acc = vec![S::zero(); d];
    let mut parts = vec![S::zero(); d];
    for (c, fibre) in f.fibres() {
        let v = v_sub(target, x, &fibre);
        acc = vec_add(&acc, &v.iter().map(|e| c.mul_ref(e)).collect::<Vec<_>>());
        parts = vec_add(&parts, &v);
    }
    let vx = target.distinguished(x);
    if parts != vx {
        return Err(Error::Axiom {
            axiom: "I".into(),
            detail: format!("{}: v_X differs from the sum of v over the fibres of f", target.name()),
        });
    }
    if !within_mass_bound(target, x, &vx, &x.total()) {
        return Err(Error::Axiom {
            axiom: "III".into(),
            detail: format!("{}: |v_X| = {} exceeds the mass bound", target.name(), target.norm(x, &vx).to_f64()),
        });
    }
    Ok(acc)
}

/// `F(i) ∘ F(s') = F(s) ∘ F(j)` on `F(B)`, for `s: X → Y` and `B ⊆ Y`.
pub fn check_beck_chevalley<S: Scalar>(target: &dyn FunctorTarget<S>, s: &PartialMap, b: &[usize]) -> Result<bool> {
    if !s.is_total() || !s.is_measure_preserving() {
        return Err(Error::InvalidMap("expected a total measure-preserving map".into()));
    }
    let mut b: Vec<usize> = b.to_vec();
    b.sort_unstable();
    b.dedup();
    if b.iter().any(|&y| y >= s.target().len()) {
        return Err(Error::InvalidMap("subset index out of range".into()));
    }
    let pre = s.preimage(&b);
    let i = Embedding::inclusion(s.source(), &pre);
    let j = Embedding::inclusion(s.target(), &b);
    let pairs = pre
        .iter()
        .enumerate()
        .map(|(k, &x)| (k, b.binary_search(&s.apply(x).expect("total")).expect("in B")))
        .collect();
    let restricted = PartialMap::new(i.sub().clone(), j.sub().clone(), pairs)?;
    let unsupported = || Error::Unsupported("the action of measure-preserving maps".into());
    let lhs = target.act_embed(&i).mul(&target.act_pres(&restricted).ok_or_else(unsupported)?)?;
    let rhs = target.act_pres(s).ok_or_else(unsupported)?.mul(&target.act_embed(&j))?;
    Ok(lhs == rhs)
}

/// `v^X_{Y_1 ∪ … ∪ Y_n} = Σ_r v^X_{Y_r}` for pairwise disjoint subsets.
pub fn check_additivity<S: Scalar>(target: &dyn FunctorTarget<S>, x: &FiniteMeasureSpace, subsets: &[Vec<usize>]) -> Result<bool> {
    let mut union = Vec::new();
    let mut seen = HashSet::new();
    for y in subsets {
        for &i in y {
            if i >= x.len() {
                return Err(Error::InvalidSpace(format!("point index {i} out of range")));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidSpace("subsets are not pairwise disjoint".into()));
            }
            union.push(i);
        }
    }
    let mut sum = vec![S::zero(); target.dim(x)];
    for y in subsets {
        sum = vec_add(&sum, &v_sub(target, x, y));
    }
    Ok(v_sub(target, x, &union) == sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn halves() -> FiniteMeasureSpace {
        FiniteMeasureSpace::from_pairs(&[("x1", r(1, 2)), ("x2", r(1, 2))]).unwrap()
    }

    #[test]
    fn psi_examples() {
        let x = halves();
        let f = SimpleFn::new(x.clone(), vec![r(3, 1), r(5, 1)]).unwrap();
        assert_eq!(psi(&ScalarTarget, &f).unwrap(), vec![r(4, 1)]);
        let sp = SimpleFunctions { p: Exponent::integer(2) };
        assert_eq!(psi(&sp, &f).unwrap(), f.values());
        for t in [&ScalarTarget as &dyn FunctorTarget<Rational>, &sp, &Measures] {
            assert_eq!(psi(t, &SimpleFn::ones(&x)).unwrap(), t.distinguished(&x));
        }
    }

    #[test]
    fn psi_names_the_failed_axiom() {
        let x = halves();
        let f = SimpleFn::new(x.clone(), vec![r(1, 1), r(2, 1)]).unwrap();
        match psi(&DoubledUnit { p: Exponent::one() }, &f) {
            Err(Error::Axiom { axiom, .. }) => assert_eq!(axiom, "III"),
            other => panic!("{other:?}"),
        }
        match psi::<Rational>(&SquaredMass, &f) {
            Err(Error::Axiom { axiom, .. }) => assert_eq!(axiom, "I"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn beck_chevalley_examples() {
        let x = FiniteMeasureSpace::from_pairs(&[("a", r(1, 4)), ("b", r(1, 4)), ("c", r(1, 2))]).unwrap();
        let y = FiniteMeasureSpace::from_pairs(&[("p", r(1, 2)), ("q", r(1, 2))]).unwrap();
        let s = PartialMap::new(x, y, vec![(0, 0), (1, 0), (2, 1)]).unwrap();
        let sp = SimpleFunctions { p: Exponent::one() };
        for b in [vec![], vec![0], vec![1], vec![0, 1]] {
            assert!(check_beck_chevalley::<Rational>(&sp, &s, &b).unwrap());
            assert!(check_beck_chevalley::<Rational>(&ScalarTarget, &s, &b).unwrap());
        }
        assert!(check_beck_chevalley::<Rational>(&Measures, &s, &[0]).is_err());
    }

    #[test]
    fn additivity_examples() {
        let x = FiniteMeasureSpace::from_pairs(&[("a", r(1, 4)), ("b", r(0, 1)), ("c", r(1, 2))]).unwrap();
        let sp = SimpleFunctions { p: Exponent::integer(3) };
        assert!(check_additivity::<Rational>(&sp, &x, &[]).unwrap());
        assert_eq!(v_sub::<Rational>(&ScalarTarget, &x, &[]), vec![r(0, 1)]);
        assert!(check_additivity::<Rational>(&ScalarTarget, &x, &[vec![0], vec![1], vec![2]]).unwrap());
        assert!(check_additivity::<Rational>(&Measures, &x, &[vec![0, 2]]).unwrap());
        assert!(!check_additivity::<Rational>(&SquaredMass, &x, &[vec![0], vec![2]]).unwrap());
        assert!(check_additivity::<Rational>(&sp, &x, &[vec![0], vec![0]]).is_err());
    }

    #[test]
    fn target_specs_round_trip() {
        let spec: TargetSpec = serde_json::from_str(r#"{"kind":"simple_functions","p":"2"}"#).unwrap();
        assert_eq!(spec.category(), Category::H);
        assert_eq!(serde_json::from_str::<TargetSpec>(&serde_json::to_string(&spec).unwrap()).unwrap(), spec);
        let h: TargetSpec = serde_json::from_str(r#"{"kind":"hilbert_tensor","gram":[["2","0"],["0","1"]],"u":["1/2","1/2"]}"#).unwrap();
        assert_eq!(h.build().unwrap().name(), "hilbert-tensor-k2");
        let too_big: TargetSpec = serde_json::from_str(r#"{"kind":"hilbert_tensor","gram":[["1"]],"u":["2"]}"#).unwrap();
        assert!(too_big.build().is_err());
    }

    #[test]
    fn random_hilbert_target_is_in_the_unit_ball() {
        let mut rng = gen::rng(5, "hilbert");
        for k in 1..4 {
            let h: HilbertTensor = HilbertTensor::random(&mut rng, k);
            let x = FiniteMeasureSpace::from_pairs(&[("a", r(1, 1))]).unwrap();
            assert!(h.norm_sq(&x, &h.distinguished(&x)).unwrap() <= Rational::one());
        }
    }
}
