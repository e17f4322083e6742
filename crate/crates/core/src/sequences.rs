//! Finitely supported sequences and the universal map out of `ℓ^p` (or `c₀`
//! for `p = ∞`) into targets `(V, δ: 𝔽 ⊕ V → V)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen;
use crate::linalg::Matrix;
use crate::norm::{weighted_p_norm, PNormValue};
use crate::scalar::{Exponent, Rational, Scalar};
use crate::universal::{Certificate, CertMethod, NormSpec, CONTRACTION_TOL, DEFAULT_CERT_SAMPLES, DEFAULT_CERT_SEED};

/// `(a_0, …, a_n, 0, 0, …)`, stored without trailing zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSeq<S>", bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct FiniteSeq<S: Scalar = Rational> {
    coeffs: Vec<S>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
struct RawSeq<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> From<RawSeq<S>> for FiniteSeq<S> {
    fn from(raw: RawSeq<S>) -> Self {
        FiniteSeq::new(raw.coeffs)
    }
}

impl<S: Scalar> FiniteSeq<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(S::is_zero) {
            coeffs.pop();
        }
        FiniteSeq { coeffs }
    }

    pub fn empty() -> Self {
        FiniteSeq { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Head and tail; the empty sequence splits as `(0, ())`.
    pub fn uncons(&self) -> (S, FiniteSeq<S>) {
        match self.coeffs.split_first() {
            Some((h, t)) => (h.clone(), FiniteSeq::new(t.to_vec())),
            None => (S::zero(), FiniteSeq::empty()),
        }
    }
}

pub fn seq_prepend<S: Scalar>(c: &S, a: &FiniteSeq<S>) -> FiniteSeq<S> {
    let mut coeffs = Vec::with_capacity(a.len() + 1);
    coeffs.push(c.clone());
    coeffs.extend_from_slice(&a.coeffs);
    FiniteSeq::new(coeffs)
}

/// `(Σ |a_k|^p)^{1/p}`, or `max |a_k|` for `p = ∞`.
pub fn seq_norm<S: Scalar>(a: &FiniteSeq<S>, p: &Exponent) -> PNormValue {
    let one = Rational::one();
    weighted_p_norm(a.coeffs.iter().map(|c| (c, &one)), p)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
struct RawSeqTarget<S> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dim: usize,
    p: Exponent,
    delta: Matrix<S>,
    norm: NormSpec<S>,
}

/// A target `(V, δ)` with `δ: 𝔽 ⊕_p V → V` stored as a `d × (1 + d)` matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawSeqTarget<S>", into = "RawSeqTarget<S>", bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct SeqTarget<S: Scalar = Rational> {
    name: Option<String>,
    dim: usize,
    p: Exponent,
    delta: Matrix<S>,
    norm: NormSpec<S>,
    certificate: Certificate,
}

impl<S: Scalar> TryFrom<RawSeqTarget<S>> for SeqTarget<S> {
    type Error = Error;
    fn try_from(raw: RawSeqTarget<S>) -> Result<Self> {
        let t = SeqTarget::new(raw.dim, raw.p, raw.delta, raw.norm)?;
        Ok(match raw.name {
            Some(n) => t.named(n),
            None => t,
        })
    }
}

impl<S: Scalar> From<SeqTarget<S>> for RawSeqTarget<S> {
    fn from(t: SeqTarget<S>) -> Self {
        RawSeqTarget { name: t.name, dim: t.dim, p: t.p, delta: t.delta, norm: t.norm }
    }
}

fn plain_pair_norm(p: &Exponent, a: f64, b: f64) -> f64 {
    match p {
        Exponent::Infinite => a.max(b),
        Exponent::Finite(q) => {
            let q = q.to_f64();
            (a.powf(q) + b.powf(q)).powf(1.0 / q)
        }
    }
}

impl<S: Scalar> SeqTarget<S> {
    pub fn new(dim: usize, p: Exponent, delta: Matrix<S>, norm: NormSpec<S>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("target dimension must be at least 1".into()));
        }
        if delta.shape() != (dim, dim + 1) {
            return Err(Error::Shape(format!("delta is {}x{}, expected {dim}x{}", delta.rows(), delta.cols(), dim + 1)));
        }
        norm.validate(dim)?;
        let certificate = certify(dim, &p, &delta, &norm);
        if !certificate.contraction {
            return Err(Error::Axiom {
                axiom: "contraction of delta".into(),
                detail: format!("operator norm estimate {} exceeds 1", certificate.operator_norm),
            });
        }
        Ok(SeqTarget { name: None, dim, p, delta, norm, certificate })
    }

    /// `δ(c, x) = αc + βx` on the scalars.
    pub fn scalar(p: Exponent, alpha: S, beta: S) -> Result<Self> {
        SeqTarget::new(1, p, Matrix::from_rows(vec![vec![alpha, beta]])?, NormSpec::Sup)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("seq-target")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> &Exponent {
        &self.p
    }

    pub fn delta(&self) -> &Matrix<S> {
        &self.delta
    }

    pub fn norm(&self) -> &NormSpec<S> {
        &self.norm
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `δ(c, x)`.
    pub fn apply_delta(&self, c: &S, x: &[S]) -> Vec<S> {
        let mut cx = Vec::with_capacity(self.dim + 1);
        cx.push(c.clone());
        cx.extend_from_slice(x);
        self.delta.mul_vec(&cx).expect("shape checked at construction")
    }
}

fn certify<S: Scalar>(dim: usize, p: &Exponent, delta: &Matrix<S>, norm: &NormSpec<S>) -> Certificate {
    let exact = |contraction: bool, value: f64| Certificate { method: CertMethod::Exact, operator_norm: value, samples: 0, contraction };
    if dim == 1 {
        // Dual-norm bound: ‖δ‖ = ‖(α, β)‖_q with q conjugate to p.
        let (a, b) = (delta.get(0, 0), delta.get(0, 1));
        match (p, a.modulus_exact(), b.modulus_exact()) {
            (Exponent::Infinite, Some(x), Some(y)) => {
                let s = &x + &y;
                return exact(s <= Rational::one(), s.to_f64());
            }
            (_, Some(x), Some(y)) if p.is_one() => {
                let m = x.max(y);
                return exact(m <= Rational::one(), m.to_f64());
            }
            _ => {}
        }
        if let Exponent::Finite(q) = p {
            if *q == Rational::from(2) {
                let s = &a.modulus_sq() + &b.modulus_sq();
                return exact(s <= Rational::one(), s.to_f64().sqrt());
            }
            let qf = p.conjugate().to_f64();
            let v = (a.modulus_f64().powf(qf) + b.modulus_f64().powf(qf)).powf(1.0 / qf);
            return Certificate { method: CertMethod::ClosedForm, operator_norm: v, samples: 0, contraction: v <= 1.0 + 1e-12 };
        }
    }
    if matches!(norm, NormSpec::Sup) {
        let moduli: Option<Vec<Vec<Rational>>> =
            (0..dim).map(|i| delta.row(i).iter().map(S::modulus_exact).collect()).collect();
        if let Some(m) = moduli {
            let value = if p.is_infinite() {
                m.iter().map(|row| row.iter().cloned().sum::<Rational>()).max()
            } else if p.is_one() {
                m.iter().map(|row| row[0].clone().max(row[1..].iter().cloned().sum())).max()
            } else {
                None
            };
            if let Some(v) = value {
                return exact(v <= Rational::one(), v.to_f64());
            }
        }
    }
    let mut rng = gen::rng(DEFAULT_CERT_SEED, "seq-contraction");
    let mut worst: f64 = 0.0;
    let zero = vec![S::zero(); dim];
    let mut consider = |c: &S, x: &[S]| {
        let den = plain_pair_norm(p, c.modulus_f64(), norm.eval(x));
        if den > 0.0 {
            let mut cx = vec![c.clone()];
            cx.extend_from_slice(x);
            worst = worst.max(norm.eval(&delta.mul_vec(&cx).expect("shape")) / den);
        }
    };
    consider(&S::one(), &zero);
    for i in 0..dim {
        let mut e = zero.clone();
        e[i] = S::one();
        consider(&S::zero(), &e);
    }
    for _ in 0..DEFAULT_CERT_SAMPLES {
        let c: S = if rng.gen_bool(0.25) { S::zero() } else { gen::random_scalar(&mut rng) };
        let x: Vec<S> = if rng.gen_bool(0.25) { zero.clone() } else { gen::random_vec(&mut rng, dim) };
        consider(&c, &x);
    }
    Certificate {
        method: CertMethod::Sampled,
        operator_norm: worst,
        samples: DEFAULT_CERT_SAMPLES + dim + 1,
        contraction: worst <= 1.0 + CONTRACTION_TOL,
    }
}

/// Columns `θ(e_0), …, θ(e_n)`: `θ(e_0) = δ(1, 0)` and `θ(e_{k+1}) = Δ_V θ(e_k)`.
pub fn seq_table<S: Scalar>(target: &SeqTarget<S>, len: usize) -> Matrix<S> {
    let d = target.dim;
    let tail = target.delta.col_block(1, d);
    let mut m = Matrix::zeros(d, len);
    let mut col = target.delta.col(0);
    for k in 0..len {
        for (i, x) in col.iter().enumerate() {
            m.set(i, k, x.clone());
        }
        if k + 1 < len {
            col = tail.mul_vec(&col).expect("square");
        }
    }
    m
}

/// `θ(a)` from the tabulated columns; `θ(∅) = 0`.
pub fn seq_universal<S: Scalar>(target: &SeqTarget<S>, a: &FiniteSeq<S>) -> Vec<S> {
    if a.is_empty() {
        return vec![S::zero(); target.dim];
    }
    seq_table(target, a.len()).mul_vec(a.coeffs()).expect("table width matches")
}

/// `δ(a_0, δ(a_1, …, δ(a_n, 0)))`.
pub fn seq_fold<S: Scalar>(target: &SeqTarget<S>, a: &FiniteSeq<S>) -> Vec<S> {
    a.coeffs()
        .iter()
        .rev()
        .fold(vec![S::zero(); target.dim], |acc, c| target.apply_delta(c, &acc))
}

/// Scalar targets covering `p ∈ {1, 2, ∞}`.
pub fn shipped_seq_targets() -> Vec<SeqTarget<Rational>> {
    let r = Rational::new;
    let two = Exponent::integer(2);
    let t = |p: Exponent, a: Rational, b: Rational, name: &str| SeqTarget::scalar(p, a, b).expect("shipped target").named(name);
    vec![
        t(two.clone(), r(1, 1), r(0, 1), "head"),
        t(Exponent::one(), r(1, 2), r(1, 2), "half-half-l1"),
        t(two, r(3, 5), r(4, 5), "three-four-fifths-l2"),
        t(Exponent::Infinite, r(1, 2), r(1, 2), "half-half-c0"),
        t(Exponent::one(), r(1, 1), r(1, 1), "sum-l1"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormValue;

    fn s(v: &[i64]) -> FiniteSeq {
        FiniteSeq::new(v.iter().map(|&x| Rational::from(x)).collect())
    }

    #[test]
    fn prepend_and_norm_examples() {
        assert_eq!(seq_prepend(&Rational::from(5), &FiniteSeq::empty()), s(&[5]));
        assert_eq!(seq_prepend(&Rational::from(1), &s(&[2, 3])), s(&[1, 2, 3]));
        assert_eq!(seq_norm(&s(&[3, 4]), &Exponent::integer(2)).to_f64(), 5.0);
        assert_eq!(seq_norm(&FiniteSeq::<Rational>::empty(), &Exponent::integer(3)).to_f64(), 0.0);
        assert_eq!(seq_norm(&s(&[1, 1, 1]), &Exponent::Infinite).value, NormValue::Exact(Rational::one()));
        assert_eq!(s(&[1, 0, 0]), s(&[1]));
    }

    #[test]
    fn universal_examples() {
        let ts = shipped_seq_targets();
        let a = s(&[4, -1, 3]);
        assert_eq!(seq_universal(&ts[0], &a), vec![Rational::from(4)]);
        // ½·4 + ¼·(−1) + ⅛·3
        assert_eq!(seq_universal(&ts[1], &a), vec![Rational::new(17, 8)]);
        assert_eq!(seq_universal(&ts[4], &a), vec![Rational::from(6)]);
        for t in &ts {
            assert_eq!(seq_universal(t, &a), seq_fold(t, &a));
            assert_eq!(seq_universal(t, &FiniteSeq::empty()), vec![Rational::zero()]);
            let c = Rational::new(-7, 3);
            assert_eq!(seq_universal(t, &seq_prepend(&c, &a)), t.apply_delta(&c, &seq_universal(t, &a)));
        }
    }

    #[test]
    fn non_contractions_rejected() {
        let r = Rational::new;
        assert!(SeqTarget::scalar(Exponent::integer(2), r(4, 5), r(4, 5)).is_err());
        assert!(SeqTarget::scalar(Exponent::Infinite, r(1, 1), r(1, 1)).is_err());
        assert!(SeqTarget::scalar(Exponent::one(), r(1, 1), r(1, 1)).is_ok());
    }

    #[test]
    fn json_shapes() {
        let a: FiniteSeq = serde_json::from_str(r#"{"coeffs": ["1/2", 3, 0]}"#).unwrap();
        assert_eq!(a.len(), 2);
        let t: SeqTarget = serde_json::from_str(r#"{"dim": 1, "p": "inf", "delta": [["1/2", "1/2"]], "norm": {"kind": "sup"}}"#).unwrap();
        assert_eq!(t.certificate().method, CertMethod::Exact);
    }
}
