//! Targets `(V, v, δ)` and the universal morphism out of the dyadic steps.
//!
//! `θ` is tabulated level by level: `levels[0]` is the basepoint column and
//! `levels[n+1] = [Δ₁·levels[n] | Δ₂·levels[n]]` where `δ = [Δ₁ Δ₂]`.

use proptest::collection::vec as pvec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{check_cap, DyadicStep};
use crate::error::{Error, Result};
use crate::gen::{self, arb_scalar, arb_step};
use crate::linalg::{dot, rank, vec_add, Matrix};
use crate::norm::{direct_sum_norm, weighted_p_norm, NormValue, PNormValue, Weighting};
use crate::report::{check_fixed, check_law, LawOutcome};
use crate::scalar::{Exponent, Rational, Scalar};

/// Tolerance on sampled operator-norm ratios.
pub const CONTRACTION_TOL: f64 = 1e-9;
pub const DEFAULT_CERT_SAMPLES: usize = 10_000;
pub const DEFAULT_CERT_SEED: u64 = 0x5eed;

/// The norm carried by a finite-dimensional target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub enum NormSpec<S = Rational> {
    /// `(Σ w_i |x_i|^p)^{1/p}`; weights must be positive.
    Weighted { p: Exponent, weights: Vec<Rational> },
    Euclidean,
    Sup,
    /// `max_k |φ_k · x|` over a finite table of functionals spanning the dual.
    Table { functionals: Vec<Vec<S>> },
}

impl<S: Scalar> NormSpec<S> {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            NormSpec::Weighted { weights, .. } => {
                if weights.len() != dim {
                    return Err(Error::Shape(format!("{} weights for dimension {dim}", weights.len())));
                }
                if weights.iter().any(|w| w.signum() <= 0) {
                    return Err(Error::Axiom { axiom: "norm".into(), detail: "weights must be positive".into() });
                }
            }
            NormSpec::Table { functionals } => {
                if functionals.iter().any(|f| f.len() != dim) {
                    return Err(Error::Shape(format!("table functionals must have length {dim}")));
                }
                if rank(functionals) != dim {
                    return Err(Error::Axiom {
                        axiom: "norm".into(),
                        detail: "table functionals do not separate points".into(),
                    });
                }
            }
            NormSpec::Euclidean | NormSpec::Sup => {}
        }
        Ok(())
    }

    /// The norm of `x`, exact whenever the data allow it.
    pub fn value(&self, x: &[S]) -> NormValue {
        match self {
            NormSpec::Weighted { p, weights } => weighted_p_norm(x.iter().zip(weights), p).value,
            NormSpec::Sup => max_modulus(x.iter()),
            NormSpec::Euclidean => {
                let s: Rational = x.iter().map(S::modulus_sq).sum();
                match s.sqrt_exact() {
                    Some(r) => NormValue::Exact(r),
                    None => NormValue::Approx(s.to_f64().sqrt()),
                }
            }
            NormSpec::Table { functionals } => {
                let images: Vec<S> = functionals.iter().map(|f| dot(f, x)).collect();
                max_modulus(images.iter())
            }
        }
    }

    pub fn eval(&self, x: &[S]) -> f64 {
        self.value(x).to_f64()
    }

    /// `‖x‖ ≤ 1`, exactly where possible.
    pub fn within_unit_ball(&self, x: &[S]) -> bool {
        if let NormSpec::Euclidean = self {
            return x.iter().map(S::modulus_sq).sum::<Rational>() <= Rational::one();
        }
        match self.value(x) {
            NormValue::Exact(r) => r <= Rational::one(),
            NormValue::Approx(v) => v <= 1.0 + 1e-12,
        }
    }
}

fn max_modulus<'a, S: Scalar>(xs: impl Iterator<Item = &'a S> + Clone) -> NormValue {
    match xs.clone().map(S::modulus_exact).collect::<Option<Vec<_>>>() {
        Some(v) => NormValue::Exact(v.into_iter().max().unwrap_or_else(Rational::zero)),
        None => NormValue::Approx(xs.map(S::modulus_f64).fold(0.0, f64::max)),
    }
}

/// `a ≤ b + tol`, exact when both sides are exact.
pub fn value_le(a: &NormValue, b: &NormValue, tol: f64) -> bool {
    match (a, b) {
        (NormValue::Exact(x), NormValue::Exact(y)) => x <= y,
        _ => a.to_f64() <= b.to_f64() + tol,
    }
}

/// What a target must satisfy besides the basepoint axioms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Admission {
    /// `‖δ‖ ≤ 1`: the target lives in the category proper.
    #[default]
    Contraction,
    /// Only boundedness; the operator-norm estimate is still reported.
    Bounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMethod {
    /// Closed-form operator norm over exact data.
    Exact,
    /// Closed-form operator norm evaluated in floating point.
    ClosedForm,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub method: CertMethod,
    /// Operator norm of `δ` (or the largest sampled ratio).
    pub operator_norm: f64,
    pub samples: usize,
    pub contraction: bool,
}

#[derive(Clone, Debug)]
pub struct TargetOptions {
    pub samples: usize,
    pub seed: u64,
    pub admission: Admission,
}

impl Default for TargetOptions {
    fn default() -> Self {
        TargetOptions { samples: DEFAULT_CERT_SAMPLES, seed: DEFAULT_CERT_SEED, admission: Admission::Contraction }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
struct RawTarget<S> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dim: usize,
    p: Exponent,
    basepoint: Vec<S>,
    delta: Matrix<S>,
    norm: NormSpec<S>,
    #[serde(default)]
    admission: Admission,
}

/// A validated target object: a normed space with a unit-ball basepoint `v`
/// and a structure map `δ: V ⊕_p V → V` with `δ(v, v) = v`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawTarget<S>", into = "RawTarget<S>", bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct AlgebraTarget<S: Scalar = Rational> {
    name: Option<String>,
    dim: usize,
    p: Exponent,
    basepoint: Vec<S>,
    delta: Matrix<S>,
    norm: NormSpec<S>,
    admission: Admission,
    certificate: Certificate,
}

impl<S: Scalar> PartialEq for AlgebraTarget<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.p == other.p
            && self.basepoint == other.basepoint
            && self.delta == other.delta
            && self.norm == other.norm
    }
}

impl<S: Scalar> TryFrom<RawTarget<S>> for AlgebraTarget<S> {
    type Error = Error;
    fn try_from(raw: RawTarget<S>) -> Result<Self> {
        let options = TargetOptions { admission: raw.admission, ..TargetOptions::default() };
        let t = AlgebraTarget::with_options(raw.dim, raw.p, raw.basepoint, raw.delta, raw.norm, options)?;
        Ok(match raw.name {
            Some(n) => t.named(n),
            None => t,
        })
    }
}

impl<S: Scalar> From<AlgebraTarget<S>> for RawTarget<S> {
    fn from(t: AlgebraTarget<S>) -> Self {
        RawTarget {
            name: t.name,
            dim: t.dim,
            p: t.p,
            basepoint: t.basepoint,
            delta: t.delta,
            norm: t.norm,
            admission: t.admission,
        }
    }
}

impl<S: Scalar> AlgebraTarget<S> {
    pub fn new(dim: usize, p: Exponent, basepoint: Vec<S>, delta: Matrix<S>, norm: NormSpec<S>) -> Result<Self> {
        Self::with_options(dim, p, basepoint, delta, norm, TargetOptions::default())
    }

    pub fn with_options(
        dim: usize,
        p: Exponent,
        basepoint: Vec<S>,
        delta: Matrix<S>,
        norm: NormSpec<S>,
        options: TargetOptions,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("target dimension must be at least 1".into()));
        }
        if basepoint.len() != dim {
            return Err(Error::Shape(format!("basepoint has length {}, expected {dim}", basepoint.len())));
        }
        if delta.shape() != (dim, 2 * dim) {
            return Err(Error::Shape(format!(
                "delta is {}x{}, expected {dim}x{}",
                delta.rows(),
                delta.cols(),
                2 * dim
            )));
        }
        norm.validate(dim)?;
        if !norm.within_unit_ball(&basepoint) {
            return Err(Error::Axiom {
                axiom: "basepoint norm at most 1".into(),
                detail: format!("norm of basepoint is {}", norm.eval(&basepoint)),
            });
        }
        let vv: Vec<S> = basepoint.iter().chain(&basepoint).cloned().collect();
        if delta.mul_vec(&vv)? != basepoint {
            return Err(Error::Axiom {
                axiom: "delta(v, v) = v".into(),
                detail: "structure map does not fix the doubled basepoint".into(),
            });
        }
        let certificate = certify(dim, &p, &delta, &norm, &options);
        if options.admission == Admission::Contraction && !certificate.contraction {
            let law = contraction_law(dim, &p, &delta, &norm, options.seed, options.samples.min(2_000) as u32);
            let witness = law
                .counterexample
                .map(|c| format!("; witness {c}"))
                .unwrap_or_default();
            return Err(Error::Axiom {
                axiom: "contraction of delta".into(),
                detail: format!("operator norm estimate {} exceeds 1{witness}", certificate.operator_norm),
            });
        }
        Ok(AlgebraTarget { name: None, dim, p, basepoint, delta, norm, admission: options.admission, certificate })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("target")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> &Exponent {
        &self.p
    }

    pub fn basepoint(&self) -> &[S] {
        &self.basepoint
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

    pub fn admission(&self) -> Admission {
        self.admission
    }

    /// `δ(x, y)`.
    pub fn apply_delta(&self, x: &[S], y: &[S]) -> Vec<S> {
        let xy: Vec<S> = x.iter().chain(y).cloned().collect();
        self.delta.mul_vec(&xy).expect("shape checked at construction")
    }
}

/// Norm of `(x, y)` in the averaged `p`-sum, in floating point.
fn pair_norm(p: &Exponent, a: f64, b: f64) -> f64 {
    match p {
        Exponent::Infinite => a.max(b),
        Exponent::Finite(q) => {
            let q = q.to_f64();
            (0.5 * (a.powf(q) + b.powf(q))).powf(1.0 / q)
        }
    }
}

fn ratio<S: Scalar>(p: &Exponent, delta: &Matrix<S>, norm: &NormSpec<S>, x: &[S], y: &[S]) -> f64 {
    let den = pair_norm(p, norm.eval(x), norm.eval(y));
    if den == 0.0 {
        return 0.0;
    }
    let xy: Vec<S> = x.iter().chain(y).cloned().collect();
    norm.eval(&delta.mul_vec(&xy).expect("shape checked")) / den
}

/// Closed-form operator norms where they exist: `(contraction, ‖δ‖)`.
fn closed_form<S: Scalar>(dim: usize, p: &Exponent, delta: &Matrix<S>, norm: &NormSpec<S>) -> Option<(CertMethod, bool, f64)> {
    let moduli: Option<Vec<Rational>> = (0..dim)
        .flat_map(|i| delta.row(i).iter().map(S::modulus_exact))
        .collect();
    if dim == 1 {
        // Any norm on a line is a multiple of |x|, which cancels.
        let (a, b) = (delta.get(0, 0), delta.get(0, 1));
        let (a2, b2) = (a.modulus_sq(), b.modulus_sq());
        return Some(match p {
            Exponent::Infinite => match &moduli {
                Some(m) => {
                    let s = &m[0] + &m[1];
                    (CertMethod::Exact, s <= Rational::one(), s.to_f64())
                }
                None => {
                    let s = a.modulus_f64() + b.modulus_f64();
                    (CertMethod::ClosedForm, s <= 1.0 + 1e-12, s)
                }
            },
            _ if p.is_one() => {
                let m = a2.max(b2);
                (CertMethod::Exact, m.mul_pow2(2) <= Rational::one(), 2.0 * m.to_f64().sqrt())
            }
            Exponent::Finite(q) if *q == Rational::from(2) => {
                let s = (&a2 + &b2).mul_pow2(1);
                (CertMethod::Exact, s <= Rational::one(), s.to_f64().sqrt())
            }
            Exponent::Finite(q) => {
                let pf = q.to_f64();
                let qf = pf / (pf - 1.0);
                let v = 2f64.powf(1.0 / pf) * (a.modulus_f64().powf(qf) + b.modulus_f64().powf(qf)).powf(1.0 / qf);
                (CertMethod::ClosedForm, v <= 1.0 + 1e-12, v)
            }
        });
    }
    let m = moduli?;
    let at = |i: usize, j: usize| &m[i * 2 * dim + j];
    let sup_like = match norm {
        NormSpec::Sup => true,
        NormSpec::Weighted { p: inner, .. } => inner.is_infinite(),
        _ => false,
    };
    if sup_like {
        let row_sum = |i: usize, range: std::ops::Range<usize>| range.map(|j| at(i, j).clone()).sum::<Rational>();
        let value = if p.is_infinite() {
            (0..dim).map(|i| row_sum(i, 0..2 * dim)).max()?
        } else if p.is_one() {
            (0..dim)
                .map(|i| row_sum(i, 0..dim).max(row_sum(i, dim..2 * dim)))
                .max()?
                .mul_pow2(1)
        } else {
            return None;
        };
        return Some((CertMethod::Exact, value <= Rational::one(), value.to_f64()));
    }
    if let NormSpec::Weighted { p: inner, weights } = norm {
        if inner.is_one() && p.is_one() {
            let block = |offset: usize| {
                (0..dim)
                    .map(|j| {
                        let s: Rational = (0..dim).map(|i| &weights[i] * at(i, offset + j)).sum();
                        &s / &weights[j]
                    })
                    .max()
                    .expect("dim >= 1")
            };
            let value = block(0).max(block(dim)).mul_pow2(1);
            return Some((CertMethod::Exact, value <= Rational::one(), value.to_f64()));
        }
    }
    None
}

fn certify<S: Scalar>(dim: usize, p: &Exponent, delta: &Matrix<S>, norm: &NormSpec<S>, options: &TargetOptions) -> Certificate {
    if let Some((method, contraction, operator_norm)) = closed_form(dim, p, delta, norm) {
        return Certificate { method, operator_norm, samples: 0, contraction };
    }
    let mut rng = gen::rng(options.seed, "contraction");
    let mut worst: f64 = 0.0;
    let zero = vec![S::zero(); dim];
    for i in 0..dim {
        let mut e = zero.clone();
        e[i] = S::one();
        worst = worst.max(ratio(p, delta, norm, &e, &zero));
        worst = worst.max(ratio(p, delta, norm, &zero, &e));
    }
    for _ in 0..options.samples {
        let mut x: Vec<S> = gen::random_vec(&mut rng, dim);
        let mut y: Vec<S> = gen::random_vec(&mut rng, dim);
        match rng.gen_range(0..4) {
            0 => x = zero.clone(),
            1 => y = zero.clone(),
            _ => {}
        }
        worst = worst.max(ratio(p, delta, norm, &x, &y));
    }
    Certificate {
        method: CertMethod::Sampled,
        operator_norm: worst,
        samples: options.samples + 2 * dim,
        contraction: worst <= 1.0 + CONTRACTION_TOL,
    }
}

/// Sampled contraction check with shrinking; used to produce witnesses.
pub fn contraction_law<S: Scalar>(
    dim: usize,
    p: &Exponent,
    delta: &Matrix<S>,
    norm: &NormSpec<S>,
    seed: u64,
    cases: u32,
) -> LawOutcome {
    let strategy = (pvec(arb_scalar::<S>(), dim), pvec(arb_scalar::<S>(), dim));
    check_law("contraction of delta", seed, cases, strategy, |(x, y)| {
        let r = ratio(p, delta, norm, x, y);
        if r <= 1.0 + CONTRACTION_TOL {
            Ok(())
        } else {
            Err(format!("|delta(x, y)| / |(x, y)| = {r}"))
        }
    })
}

/// The tabulated universal morphism: `levels[n]` is `d × 2^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct MorphismTable<S: Scalar = Rational> {
    pub target: AlgebraTarget<S>,
    pub levels: Vec<Matrix<S>>,
}

impl<S: Scalar> MorphismTable<S> {
    pub fn max_level(&self) -> u32 {
        self.levels.len().saturating_sub(1) as u32
    }

    pub fn check_shapes(&self) -> Result<()> {
        for (n, m) in self.levels.iter().enumerate() {
            if m.shape() != (self.target.dim, 1 << n) {
                return Err(Error::Shape(format!(
                    "level {n} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.target.dim,
                    1usize << n
                )));
            }
        }
        if self.levels.is_empty() {
            return Err(Error::Shape("table has no levels".into()));
        }
        Ok(())
    }
}

pub fn compile_theta<S: Scalar>(target: &AlgebraTarget<S>, max_level: u32) -> Result<MorphismTable<S>> {
    check_cap(max_level)?;
    let d = target.dim;
    let d1 = target.delta.col_block(0, d);
    let d2 = target.delta.col_block(d, d);
    let mut levels = vec![Matrix::column(target.basepoint.clone())];
    for n in 0..max_level as usize {
        let prev = &levels[n];
        let next = d1.mul(prev)?.hstack(&d2.mul(prev)?)?;
        levels.push(next);
    }
    Ok(MorphismTable { target: target.clone(), levels })
}

/// `θ(f)` by structural recursion on `f`: split, recurse, recombine with `δ`.
pub fn fold_apply<S: Scalar>(target: &AlgebraTarget<S>, f: &DyadicStep<S>) -> Vec<S> {
    if f.is_zero() {
        return vec![S::zero(); target.dim];
    }
    if f.level() == 0 {
        let c = &f.coeffs()[0];
        return target.basepoint.iter().map(|v| c.mul_ref(v)).collect();
    }
    let (l, r) = f.split();
    target.apply_delta(&fold_apply(target, &l), &fold_apply(target, &r))
}

/// The table assembled column by column from [`fold_apply`] on unit steps.
pub fn tabulate_by_fold<S: Scalar>(target: &AlgebraTarget<S>, max_level: u32) -> Result<MorphismTable<S>> {
    check_cap(max_level)?;
    let mut levels = Vec::with_capacity(max_level as usize + 1);
    for n in 0..=max_level {
        let width = 1usize << n;
        let mut m = Matrix::zeros(target.dim, width);
        for j in 0..width {
            let mut coeffs = vec![S::zero(); width];
            coeffs[j] = S::one();
            let col = fold_apply(target, &DyadicStep::new(n, coeffs)?);
            for (i, x) in col.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        levels.push(m);
    }
    Ok(MorphismTable { target: target.clone(), levels })
}

pub fn apply_universal<S: Scalar>(table: &MorphismTable<S>, f: &DyadicStep<S>) -> Result<Vec<S>> {
    let max = table.max_level();
    if f.level() > max {
        return Err(Error::LevelOverflow { level: f.level(), max });
    }
    table.levels[f.level() as usize].mul_vec(f.coeffs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismReport {
    pub target: String,
    pub samples: u32,
    pub seed: u64,
    pub passed: bool,
    pub laws: Vec<LawOutcome>,
}

/// `levels[n+1] · R_n = levels[n]`, with `R_n` the refinement matrix.
pub fn extension_coherent<S: Scalar>(table: &MorphismTable<S>) -> std::result::Result<(), String> {
    for n in 0..table.levels.len().saturating_sub(1) {
        let (lo, hi) = (&table.levels[n], &table.levels[n + 1]);
        for i in 0..lo.rows() {
            for j in 0..lo.cols() {
                if hi.get(i, 2 * j).add_ref(hi.get(i, 2 * j + 1)) != *lo.get(i, j) {
                    return Err(format!("level {} does not extend level {n} at ({i}, {j})", n + 1));
                }
            }
        }
    }
    Ok(())
}

pub fn verify_morphism<S: Scalar>(table: &MorphismTable<S>, samples: u32, seed: u64) -> Result<MorphismReport> {
    table.check_shapes()?;
    let target = &table.target;
    let max = table.max_level();
    let sample_level = max.saturating_sub(1).min(10);
    let mut laws = Vec::new();

    laws.push(check_fixed("basepoint", || {
        let got = apply_universal(table, &DyadicStep::unit()).map_err(|e| e.to_string())?;
        if got == target.basepoint {
            Ok(())
        } else {
            Err(format!("theta(I) = {got:?}, basepoint {:?}", target.basepoint))
        }
    }));

    laws.push(check_fixed("extension-coherence", || extension_coherent(table)));

    if max >= 1 {
        let pairs = (arb_step::<S>(sample_level), arb_step::<S>(sample_level));
        laws.push(check_law("structure-square", seed, samples, pairs, |(f, g)| {
            let lhs = apply_universal(table, &DyadicStep::juxtapose(f, g).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let tf = apply_universal(table, f).map_err(|e| e.to_string())?;
            let tg = apply_universal(table, g).map_err(|e| e.to_string())?;
            let rhs = target.apply_delta(&tf, &tg);
            if lhs == rhs {
                Ok(())
            } else {
                Err(format!("theta(gamma(f, g)) = {lhs:?} but delta(theta f, theta g) = {rhs:?}"))
            }
        }));
    }

    laws.push(check_law("contraction-transport", seed, samples, arb_step::<S>(max.min(10)), |f| {
        let image = target.norm.value(&apply_universal(table, f).map_err(|e| e.to_string())?);
        let bound = f.p_norm(&target.p).value;
        if value_le(&image, &bound, CONTRACTION_TOL) || target.admission == Admission::Bounded {
            Ok(())
        } else {
            Err(format!("|theta f| = {} exceeds |f|_p = {}", image.to_f64(), bound.to_f64()))
        }
    }));

    let passed = laws.iter().all(|l| l.passed);
    Ok(MorphismReport { target: target.name().to_string(), samples, seed, passed, laws })
}

/// Exact level-by-level agreement of `candidate` with the compiled table for `target`.
pub fn uniqueness_probe<S: Scalar>(target: &AlgebraTarget<S>, candidate: &MorphismTable<S>) -> Result<bool> {
    if candidate.target.dim != target.dim {
        return Err(Error::Shape(format!(
            "candidate has dimension {}, target {}",
            candidate.target.dim, target.dim
        )));
    }
    let expected = compile_theta(target, candidate.max_level())?;
    for (n, (a, b)) in candidate.levels.iter().zip(&expected.levels).enumerate() {
        if a.shape() != b.shape() {
            return Err(Error::Shape(format!("candidate level {n} has shape {:?}, expected {:?}", a.shape(), b.shape())));
        }
    }
    Ok(candidate.levels == expected.levels)
}

/// `θ(f) = ½(θ(L) + θ(R))` where `(L, R)` is the split of `f`.
pub fn mean_equation_holds<S: Scalar>(table: &MorphismTable<S>, f: &DyadicStep<S>) -> Result<bool> {
    let (l, r) = f.split();
    let lhs = apply_universal(table, f)?;
    let sum = vec_add(&apply_universal(table, &l)?, &apply_universal(table, &r)?);
    let rhs: Vec<S> = sum.iter().map(|x| x.mul_pow2(-1)).collect();
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum ChainKind {
    DoubleWithPNorm(Exponent),
    PrependScalar(Exponent),
}

impl ChainKind {
    pub fn p(&self) -> &Exponent {
        match self {
            ChainKind::DoubleWithPNorm(p) | ChainKind::PrependScalar(p) => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub functor: ChainKind,
    pub stages: u32,
    pub dims: Vec<usize>,
    /// Connecting maps send the all-ones basepoint to the all-ones basepoint.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basepoint_preserved: Option<Vec<bool>>,
    /// Each connecting map is `T` applied to the previous one.
    pub coherent: Vec<bool>,
    /// Connecting and structure maps preserve norms on sampled elements.
    pub isometric: Vec<bool>,
    /// Structure map composed with its inverse is the identity, both ways.
    pub lambek_identity: Vec<bool>,
    pub truncation_level: u32,
    pub passed: bool,
}

const CHAIN_SAMPLES: usize = 32;

fn norms_agree(a: &PNormValue, b: &PNormValue) -> bool {
    a.close_to(b, 1e-12)
}

fn seq_norm(x: &[Rational], p: &Exponent) -> PNormValue {
    let one = Rational::one();
    weighted_p_norm(x.iter().map(|c| (c, &one)), p)
}

fn matrix_from_fn(rows: usize, cols: usize, f: impl Fn(usize) -> Vec<Rational>) -> Matrix<Rational> {
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for (i, x) in f(j).into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m
}

fn unit(len: usize, j: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); len];
    e[j] = Rational::one();
    e
}

/// Builds the first `stages + 1` objects of the initial chain for `kind`
/// and checks its structure exactly where norms are exact.
pub fn adamek_chain(kind: ChainKind, stages: u32) -> Result<ChainReport> {
    check_cap(stages + 1)?;
    let p = kind.p().clone();
    let mut rng = gen::rng(stages as u64, "adamek");
    let double = matches!(kind, ChainKind::DoubleWithPNorm(_));
    let dim = |n: u32| if double { 1usize << n } else { n as usize + 1 };
    let dims: Vec<usize> = (0..=stages).map(dim).collect();
    let mut basepoint = Vec::new();
    let mut coherent = Vec::new();
    let mut isometric = Vec::new();
    let mut lambek = Vec::new();
    let mut prev_connect: Option<Matrix<Rational>> = None;

    for n in 0..stages {
        let (dn, dn1) = (dim(n), dim(n + 1));
        let level_n = |x: Vec<Rational>| DyadicStep::new(n, x).expect("level within cap");
        // The connecting map stage n -> stage n+1.
        let connect = if double {
            matrix_from_fn(dn1, dn, |j| level_n(unit(dn, j)).refine(n + 1).expect("refine").into_coeffs())
        } else {
            matrix_from_fn(dn1, dn, |j| unit(dn1, j))
        };
        // T applied to the previous connecting map; stage 0 -> 1 is the unique map `!`.
        let t_prev = match &prev_connect {
            None if double => Matrix::column(vec![Rational::one(); 2]),
            None => Matrix::from_rows(vec![vec![Rational::one()], vec![Rational::zero()]])?,
            Some(c) if double => Matrix::block_diag(c, c),
            Some(c) => Matrix::block_diag(&Matrix::identity(1), c),
        };
        coherent.push(t_prev == connect);
        if double {
            basepoint.push(connect.mul_vec(&vec![Rational::one(); dn])? == vec![Rational::one(); dn1]);
        }

        // Structure map T(stage n) -> stage n+1 and its inverse, assembled
        // from juxtapose/split (or prepend/uncons) on basis vectors.
        let t_dim = if double { 2 * dn } else { 1 + dn };
        let structure = matrix_from_fn(dn1, t_dim, |j| {
            if double {
                let (x, y) = if j < dn { (unit(dn, j), vec![Rational::zero(); dn]) } else { (vec![Rational::zero(); dn], unit(dn, j - dn)) };
                DyadicStep::juxtapose(&level_n(x), &level_n(y)).expect("juxtapose").into_coeffs()
            } else {
                unit(dn1, j)
            }
        });
        let inverse = matrix_from_fn(t_dim, dn1, |j| {
            if double {
                let (l, r) = DyadicStep::new(n + 1, unit(dn1, j)).expect("level within cap").split();
                let mut v = l.refine(n).expect("same level").into_coeffs();
                v.extend(r.refine(n).expect("same level").into_coeffs());
                v
            } else {
                unit(t_dim, j)
            }
        });
        lambek.push(
            inverse.mul(&structure)? == Matrix::identity(t_dim) && structure.mul(&inverse)? == Matrix::identity(dn1),
        );

        let mut iso = true;
        for _ in 0..CHAIN_SAMPLES {
            let x: Vec<Rational> = gen::random_vec(&mut rng, dn);
            let y: Vec<Rational> = gen::random_vec(&mut rng, if double { dn } else { 1 });
            let image = connect.mul_vec(&x)?;
            let xy: Vec<Rational> = if double { x.iter().chain(&y).cloned().collect() } else { y.iter().chain(&x).cloned().collect() };
            let assembled = structure.mul_vec(&xy)?;
            let ok = if double {
                let fx = level_n(x.clone()).p_norm(&p);
                let fimage = DyadicStep::new(n + 1, image)?.p_norm(&p);
                let fy = level_n(y.clone()).p_norm(&p);
                let pair = direct_sum_norm(&fx, &fy, Weighting::Averaged)?;
                let fassembled = DyadicStep::new(n + 1, assembled)?.p_norm(&p);
                norms_agree(&fx, &fimage) && norms_agree(&pair, &fassembled)
            } else {
                let pair = direct_sum_norm(&seq_norm(&y, &p), &seq_norm(&x, &p), Weighting::Plain)?;
                norms_agree(&seq_norm(&x, &p), &seq_norm(&image, &p)) && norms_agree(&pair, &seq_norm(&assembled, &p))
            };
            iso &= ok;
        }
        isometric.push(iso);
        prev_connect = Some(connect);
    }

    let passed = coherent.iter().chain(&isometric).chain(&lambek).chain(&basepoint).all(|b| *b);
    Ok(ChainReport {
        functor: kind,
        stages,
        dims,
        basepoint_preserved: double.then_some(basepoint),
        coherent,
        isometric,
        lambek_identity: lambek,
        truncation_level: stages,
        passed,
    })
}

/// A general function resolved at a finite level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub step: DyadicStep<Rational>,
    /// `‖f_{n+1} − f_n‖_p` for the midpoint samplings at levels `n+1` and `n`.
    pub increment: f64,
}

/// Samples `f` at the midpoints of the level-`level` intervals.
pub fn truncate_sampler(f: impl Fn(f64) -> f64, level: u32, p: &Exponent) -> Result<Truncation> {
    check_cap(level + 1)?;
    let sample = |n: u32| -> Result<DyadicStep<Rational>> {
        let width = 1usize << n;
        let coeffs = (0..width)
            .map(|i| {
                let x = (i as f64 + 0.5) / width as f64;
                Rational::from_f64(f(x)).ok_or_else(|| Error::Unsupported(format!("finite sample at {x}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DyadicStep::new(n, coeffs)
    };
    let step = sample(level)?;
    let increment = sample(level + 1)?.sub(&step).p_norm(p).to_f64();
    Ok(Truncation { step, increment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::step_from_ints;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn scalar_target(p: Exponent, a: Rational, b: Rational) -> Result<AlgebraTarget> {
        AlgebraTarget::new(1, p, vec![Rational::one()], Matrix::from_rows(vec![vec![a, b]])?, NormSpec::Euclidean)
    }

    fn mean() -> AlgebraTarget {
        scalar_target(Exponent::one(), r(1, 2), r(1, 2)).unwrap()
    }

    fn left() -> AlgebraTarget {
        scalar_target(Exponent::Infinite, r(1, 1), r(0, 1)).unwrap()
    }

    #[test]
    fn mean_levels_are_uniform_weights() {
        let t = compile_theta(&mean(), 6).unwrap();
        for (n, m) in t.levels.iter().enumerate() {
            assert!(m.row(0).iter().all(|x| *x == Rational::one().mul_pow2(-(n as i32))));
        }
        assert_eq!(apply_universal(&t, &step_from_ints(&[1, 0, 2, 5])).unwrap(), vec![r(2, 1)]);
        assert_eq!(apply_universal(&t, &DyadicStep::constant(r(3, 1))).unwrap(), vec![r(3, 1)]);
    }

    #[test]
    fn left_block_levels() {
        let t = compile_theta(&left(), 4).unwrap();
        for m in &t.levels {
            assert_eq!(m.row(0)[0], Rational::one());
            assert!(m.row(0)[1..].iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn overflow_suggests_recompiling() {
        let t = compile_theta(&mean(), 1).unwrap();
        let err = apply_universal(&t, &step_from_ints(&[1, 2, 3, 4])).unwrap_err();
        assert!(err.to_string().contains("--max-level 2"));
    }

    #[test]
    fn non_contraction_rejected_at_construction() {
        // δ(x, y) = 2x with v = 1 already breaks δ(v, v) = v.
        let err = scalar_target(Exponent::one(), r(2, 1), r(0, 1)).unwrap_err();
        assert!(matches!(err, Error::Axiom { ref axiom, .. } if axiom == "delta(v, v) = v"));
        let doubling = Matrix::from_rows(vec![vec![r(2, 1), r(0, 1)]]).unwrap();
        let err = AlgebraTarget::new(1, Exponent::one(), vec![Rational::zero()], doubling, NormSpec::Sup).unwrap_err();
        assert!(matches!(err, Error::Axiom { ref axiom, .. } if axiom == "contraction of delta"));
        let err = scalar_target(Exponent::one(), r(3, 2), r(-1, 2)).unwrap_err();
        match err {
            Error::Axiom { axiom, detail } => {
                assert_eq!(axiom, "contraction of delta");
                assert!(detail.contains("witness"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let bounded = AlgebraTarget::with_options(
            1,
            Exponent::one(),
            vec![Rational::one()],
            Matrix::from_rows(vec![vec![r(3, 2), r(-1, 2)]]).unwrap(),
            NormSpec::Sup,
            TargetOptions { admission: Admission::Bounded, ..TargetOptions::default() },
        )
        .unwrap();
        assert!(!bounded.certificate().contraction);
    }

    #[test]
    fn proj1_is_not_a_p1_contraction() {
        assert!(scalar_target(Exponent::one(), r(1, 1), r(0, 1)).is_err());
    }

    #[test]
    fn verify_passes_for_shipped_scalar_targets() {
        for t in [mean(), left()] {
            let report = verify_morphism(&compile_theta(&t, 6).unwrap(), 200, 3).unwrap();
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn uniqueness() {
        let m = compile_theta(&mean(), 5).unwrap();
        assert!(uniqueness_probe(&mean(), &m).unwrap());
        assert!(uniqueness_probe(&mean(), &tabulate_by_fold(&mean(), 5).unwrap()).unwrap());
        assert!(!uniqueness_probe(&mean(), &compile_theta(&left(), 5).unwrap()).unwrap());
        let wide = AlgebraTarget::new(
            2,
            Exponent::Infinite,
            vec![Rational::one(), Rational::one()],
            Matrix::from_rows(vec![
                vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)],
                vec![r(0, 1), r(0, 1), r(0, 1), r(1, 1)],
            ])
            .unwrap(),
            NormSpec::Sup,
        )
        .unwrap();
        assert!(uniqueness_probe(&mean(), &compile_theta(&wide, 2).unwrap()).is_err());
    }

    #[test]
    fn mean_equation_separates_mean_from_left() {
        let f = step_from_ints(&[1, 0, 2, 5]);
        assert!(mean_equation_holds(&compile_theta(&mean(), 3).unwrap(), &f).unwrap());
        assert!(!mean_equation_holds(&compile_theta(&left(), 3).unwrap(), &f).unwrap());
    }

    #[test]
    fn chain_dimensions() {
        let c = adamek_chain(ChainKind::DoubleWithPNorm(Exponent::one()), 5).unwrap();
        assert_eq!(c.dims, vec![1, 2, 4, 8, 16, 32]);
        assert!(c.passed, "{c:?}");
        let c = adamek_chain(ChainKind::PrependScalar(Exponent::integer(2)), 3).unwrap();
        assert_eq!(c.dims, vec![1, 2, 3, 4]);
        assert!(c.passed, "{c:?}");
        let c = adamek_chain(ChainKind::DoubleWithPNorm(Exponent::one()), 0).unwrap();
        assert_eq!(c.dims, vec![1]);
    }

    #[test]
    fn target_json_roundtrip() {
        let json = r#"{"dim": 1, "p": "1", "basepoint": ["1"], "delta": [["1/2", "1/2"]], "norm": {"kind": "euclidean"}}"#;
        let t: AlgebraTarget = serde_json::from_str(json).unwrap();
        assert_eq!(t, mean());
        let back: AlgebraTarget = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"dim": 1, "p": "1", "basepoint": ["1"], "delta": [["3/2", "-1/2"]], "norm": {"kind": "sup"}}"#;
        assert!(serde_json::from_str::<AlgebraTarget>(bad).is_err());
    }

    #[test]
    fn truncation_of_smooth_function_converges() {
        let a = truncate_sampler(|x| x * x, 4, &Exponent::integer(2)).unwrap();
        let b = truncate_sampler(|x| x * x, 8, &Exponent::integer(2)).unwrap();
        assert_eq!(a.step.level(), 4);
        assert!(b.increment < a.increment / 8.0);
    }
}
