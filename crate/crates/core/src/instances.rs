//! Concrete targets and the maps they induce: integration, the indefinite
//! integral via piecewise-linear functions, inclusions, the Hölder pairing,
//! block operators, and cylinder functions on Cantor space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{check_cap, DyadicStep};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norm::{NormValue, PNormValue};
use crate::scalar::{Exponent, Rational, Scalar};
use crate::universal::{AlgebraTarget, NormSpec};

fn half<S: Scalar>() -> S {
    S::from_rational(Rational::new(1, 2))
}

/// `(𝔽, 1, ½(x + y))` in the `p = 1` category.
pub fn mean_target<S: Scalar>() -> AlgebraTarget<S> {
    let delta = Matrix::from_rows(vec![vec![half(), half()]]).expect("1x2");
    AlgebraTarget::new(1, Exponent::one(), vec![S::one()], delta, NormSpec::Sup)
        .expect("mean target is valid")
        .named("mean")
}

/// `(𝔽, 1, (x, y) ↦ x)`: a contraction only for `p = ∞`, where it evaluates
/// a cylinder function at the all-zeros point.
pub fn left_endpoint_target<S: Scalar>() -> AlgebraTarget<S> {
    let delta = Matrix::from_rows(vec![vec![S::one(), S::zero()]]).expect("1x2");
    AlgebraTarget::new(1, Exponent::Infinite, vec![S::one()], delta, NormSpec::Sup)
        .expect("left-endpoint target is valid")
        .named("left-endpoint")
}

/// Continuous functions vanishing at 0, resolved at the `2^resolution` nodes
/// `j / 2^resolution` for `j ≥ 1`, with basepoint `x ↦ x` and the
/// rescale-and-concatenate structure map.
pub fn kappa_target<S: Scalar>(resolution: u32) -> Result<AlgebraTarget<S>> {
    check_cap(resolution)?;
    let d = 1usize << resolution;
    let h = d / 2;
    let mut delta = Matrix::zeros(d, 2 * d);
    for k in 1..=d {
        if k <= h {
            delta.set(k - 1, 2 * k - 1, half());
        } else {
            delta.set(k - 1, d - 1, half());
            delta.set(k - 1, d + 2 * k - d - 1, half());
        }
    }
    let basepoint = (1..=d as i64).map(|j| S::from_rational(Rational::new(j, d as i64))).collect();
    Ok(AlgebraTarget::new(d, Exponent::one(), basepoint, delta, NormSpec::Sup)?.named(format!("kappa@{resolution}")))
}

/// `∫₀¹ f` by halving: `∫ f = ½(∫ L + ∫ R)` down to constants.
pub fn integrate<S: Scalar>(f: &DyadicStep<S>) -> S {
    fn go<S: Scalar>(c: &[S]) -> S {
        if c.len() == 1 {
            return c[0].clone();
        }
        let (l, r) = c.split_at(c.len() / 2);
        go(l).add_ref(&go(r)).mul_pow2(-1)
    }
    go(f.coeffs())
}

/// A continuous function with `F(0) = 0`, linear between the nodes `i / 2^level`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawPl<S>", bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct PiecewiseLinear<S: Scalar = Rational> {
    level: u32,
    values: Vec<S>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
struct RawPl<S> {
    level: u32,
    values: Vec<S>,
}

impl<S: Scalar> TryFrom<RawPl<S>> for PiecewiseLinear<S> {
    type Error = Error;
    fn try_from(raw: RawPl<S>) -> Result<Self> {
        PiecewiseLinear::new(raw.level, raw.values)
    }
}

impl<S: Scalar> PiecewiseLinear<S> {
    pub fn new(level: u32, values: Vec<S>) -> Result<Self> {
        check_cap(level)?;
        if values.len() != (1usize << level) + 1 {
            return Err(Error::Shape(format!("level {level} needs {} node values, got {}", (1usize << level) + 1, values.len())));
        }
        if !values[0].is_zero() {
            return Err(Error::Shape("node value at 0 must be 0".into()));
        }
        Ok(PiecewiseLinear { level, values })
    }

    pub fn zero() -> Self {
        PiecewiseLinear { level: 0, values: vec![S::zero(), S::zero()] }
    }

    /// `x ↦ x`.
    pub fn identity(level: u32) -> Result<Self> {
        check_cap(level)?;
        let n = 1i64 << level;
        PiecewiseLinear::new(level, (0..=n).map(|i| S::from_rational(Rational::new(i, n))).collect())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Same function on a finer grid: new nodes are midpoint averages.
    pub fn refine(&self, m: u32) -> Result<Self> {
        if m < self.level {
            return Err(Error::CannotCoarsen { from: self.level, to: m });
        }
        check_cap(m)?;
        let mut values = self.values.clone();
        for _ in self.level..m {
            let mut next = Vec::with_capacity(2 * values.len() - 1);
            for w in values.windows(2) {
                next.push(w[0].clone());
                next.push(w[0].add_ref(&w[1]).mul_pow2(-1));
            }
            next.push(values.last().expect("nonempty").clone());
            values = next;
        }
        Ok(PiecewiseLinear { level: m, values })
    }

    /// Max of `|F|`, attained at a node.
    pub fn sup_norm(&self) -> NormValue {
        match self.values.iter().map(S::modulus_exact).collect::<Option<Vec<_>>>() {
            Some(v) => NormValue::Exact(v.into_iter().max().unwrap_or_else(Rational::zero)),
            None => NormValue::Approx(self.values.iter().map(S::modulus_f64).fold(0.0, f64::max)),
        }
    }

    /// Node values `F(j / 2^level)` for `j ≥ 1`, the coordinates of the κ-target.
    pub fn node_vector(&self) -> &[S] {
        &self.values[1..]
    }
}

impl<S: Scalar> PartialEq for PiecewiseLinear<S> {
    fn eq(&self, other: &Self) -> bool {
        let m = self.level.max(other.level);
        match (self.refine(m), other.refine(m)) {
            (Ok(a), Ok(b)) => a.values == b.values,
            _ => false,
        }
    }
}

/// `x ↦ ∫₀ˣ f`: cumulative sums at the nodes.
pub fn indefinite_integral<S: Scalar>(f: &DyadicStep<S>) -> PiecewiseLinear<S> {
    let mut values = Vec::with_capacity(f.coeffs().len() + 1);
    let mut acc = S::zero();
    values.push(acc.clone());
    for c in f.coeffs() {
        acc = acc.add_ref(c);
        values.push(acc.clone());
    }
    let shift = -(f.level() as i32);
    PiecewiseLinear { level: f.level(), values: values.iter().map(|v| v.mul_pow2(shift)).collect() }
}

/// `½F(2x)` on `[0, ½]` and `½(F(1) + G(2x − 1))` on `[½, 1]`.
pub fn kappa<S: Scalar>(f: &PiecewiseLinear<S>, g: &PiecewiseLinear<S>) -> Result<PiecewiseLinear<S>> {
    let m = f.level.max(g.level);
    check_cap(m + 1)?;
    let (f, g) = (f.refine(m)?, g.refine(m)?);
    let f_end = f.values.last().expect("nonempty").clone();
    let mut values: Vec<S> = f.values.iter().map(|v| v.mul_pow2(-1)).collect();
    values.extend(g.values[1..].iter().map(|v| f_end.add_ref(v).mul_pow2(-1)));
    Ok(PiecewiseLinear { level: m + 1, values })
}

/// The slopes of `F`: `c_i = 2^n (F_{i+1} − F_i)`.
pub fn recover_function<S: Scalar>(f: &PiecewiseLinear<S>) -> DyadicStep<S> {
    let coeffs = f.values.windows(2).map(|w| w[1].sub_ref(&w[0]).mul_pow2(f.level as i32)).collect();
    DyadicStep::new(f.level, coeffs).expect("level already checked")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct InclusionCertificate<S: Scalar = Rational> {
    pub step: DyadicStep<S>,
    pub p_norm: PNormValue,
    pub r_norm: PNormValue,
    /// `‖f‖_p ≤ ‖f‖_r`, exact when both norms are.
    pub holds: bool,
}

/// The inclusion `L^r → L^p` for `p ≤ r`, with its norm inequality certified.
pub fn inclusion_map<S: Scalar>(f: &DyadicStep<S>, r: &Exponent, p: &Exponent) -> Result<InclusionCertificate<S>> {
    if exponent_gt(p, r) {
        return Err(Error::WrongInclusion { p: p.to_string(), r: r.to_string() });
    }
    let p_norm = f.p_norm(p);
    let r_norm = f.p_norm(r);
    let holds = p_norm.le(&r_norm, 1e-12 * r_norm.to_f64().max(1.0));
    Ok(InclusionCertificate { step: f.clone(), p_norm, r_norm, holds })
}

fn exponent_gt(a: &Exponent, b: &Exponent) -> bool {
    match (a, b) {
        (Exponent::Infinite, Exponent::Infinite) => false,
        (Exponent::Infinite, _) => true,
        (_, Exponent::Infinite) => false,
        (Exponent::Finite(x), Exponent::Finite(y)) => x > y,
    }
}

/// Checks `1/p + 1/q = 1` exactly with `p, q > 1`.
pub fn check_conjugate(p: &Exponent, q: &Exponent) -> Result<()> {
    let err = || Error::NonConjugate { p: p.to_string(), q: q.to_string() };
    match (p, q) {
        (Exponent::Finite(a), Exponent::Finite(b)) => {
            if *a > Rational::one() && *b > Rational::one() && &a.recip() + &b.recip() == Rational::one() {
                Ok(())
            } else {
                Err(err())
            }
        }
        _ => Err(err()),
    }
}

/// `∫ f·g` for conjugate exponents.
pub fn pairing<S: Scalar>(f: &DyadicStep<S>, g: &DyadicStep<S>, p: &Exponent, q: &Exponent) -> Result<S> {
    check_conjugate(p, q)?;
    Ok(integrate(&f.pointwise_mul(g)))
}

/// `Γ(φ₁, φ₂) = γ ∘ (φ₁ ⊕ φ₂) ∘ γ⁻¹`, which on coefficient data is block-diagonal.
pub fn gamma_hom<S: Scalar>(phi1: &Matrix<S>, phi2: &Matrix<S>, level: u32) -> Result<Matrix<S>> {
    check_cap(level + 1)?;
    let n = 1usize << level;
    for (name, m) in [("phi1", phi1), ("phi2", phi2)] {
        if m.shape() != (n, n) {
            return Err(Error::Shape(format!("{name} is {}x{}, expected {n}x{n} at level {level}", m.rows(), m.cols())));
        }
    }
    Ok(Matrix::block_diag(phi1, phi2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    /// Maximum over all sign vectors.
    Exact,
    /// Largest ratio over random inputs: a lower bound.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    pub method: NormMethod,
}

/// Largest level at which operator norms are computed by sign enumeration.
pub const EXACT_OPERATOR_LEVEL: u32 = 4;

fn lp_of(v: &[f64], p: &Exponent) -> f64 {
    match p {
        Exponent::Infinite => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        Exponent::Finite(q) => {
            let q = q.to_f64();
            v.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
        }
    }
}

/// Operator norm of `φ: E_n` with `‖·‖_q` into `E_n` with `‖·‖_1`.
///
/// `‖φ‖ = 2^{-n/p} max_s ‖φᵀ s‖_{ℓ^p}` over sign vectors `s`, with `p` the
/// conjugate of `q`; above [`EXACT_OPERATOR_LEVEL`] the ratio is sampled.
pub fn hom_operator_norm(phi: &Matrix<Rational>, level: u32, q: &Exponent, samples: usize, seed: u64) -> Result<OperatorNorm> {
    let n = 1usize << level;
    if phi.shape() != (n, n) {
        return Err(Error::Shape(format!("operator is {}x{}, expected {n}x{n}", phi.rows(), phi.cols())));
    }
    let p = q.conjugate();
    let a: Vec<Vec<f64>> = phi.to_rows().iter().map(|r| r.iter().map(Rational::to_f64).collect()).collect();
    if level <= EXACT_OPERATOR_LEVEL {
        let mut best: f64 = 0.0;
        let mut u = vec![0.0; n];
        // s and −s give the same value, so fix s_0 = +1.
        for mask in 0u64..(1u64 << (n - 1)) {
            for (j, uj) in u.iter_mut().enumerate() {
                *uj = (0..n).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -a[i][j] } else { a[i][j] }).sum();
            }
            best = best.max(lp_of(&u, &p));
        }
        let scale = match &p {
            Exponent::Infinite => 1.0,
            Exponent::Finite(pp) => 2f64.powf(-(level as f64) / pp.to_f64()),
        };
        return Ok(OperatorNorm { value: scale * best, method: NormMethod::Exact });
    }
    let mut rng = crate::gen::rng(seed, "hom-operator-norm");
    let w = 2f64.powi(-(level as i32));
    let qnorm = |g: &[f64]| match q {
        Exponent::Infinite => g.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        Exponent::Finite(e) => {
            let e = e.to_f64();
            (w * g.iter().map(|x| x.abs().powf(e)).sum::<f64>()).powf(1.0 / e)
        }
    };
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h: f64 = a.iter().map(|row| row.iter().zip(&g).map(|(x, y)| x * y).sum::<f64>().abs()).sum::<f64>() * w;
        let den = qnorm(&g);
        if den > 0.0 {
            best = best.max(h / den);
        }
    }
    Ok(OperatorNorm { value: best, method: NormMethod::Sampled })
}

/// A function on Cantor space depending on the first `level` bits; bit `x_0`
/// is the most significant bit of the coefficient index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct CylinderFunction<S: Scalar = Rational>(DyadicStep<S>);

impl<S: Scalar> CylinderFunction<S> {
    pub fn new(level: u32, coeffs: Vec<S>) -> Result<Self> {
        Ok(CylinderFunction(DyadicStep::new(level, coeffs)?))
    }

    pub fn from_step(f: DyadicStep<S>) -> Self {
        CylinderFunction(f)
    }

    pub fn level(&self) -> u32 {
        self.0.level()
    }

    pub fn coeffs(&self) -> &[S] {
        self.0.coeffs()
    }

    /// The value at any point whose first bits are `bits` (missing bits read as 0).
    pub fn eval(&self, bits: &[bool]) -> &S {
        let idx = (0..self.level() as usize).fold(0usize, |acc, k| (acc << 1) | bits.get(k).copied().unwrap_or(false) as usize);
        &self.coeffs()[idx]
    }

    pub fn sup_norm(&self) -> PNormValue {
        self.0.p_norm(&Exponent::Infinite)
    }

    /// `sup |f − g|`, read off the node data.
    pub fn sup_distance(&self, other: &Self) -> PNormValue {
        self.0.sub(&other.0).p_norm(&Exponent::Infinite)
    }
}

/// `f ∘ π_n`: every bit after the first `n` is set to 0.
pub fn cantor_project<S: Scalar>(f: &CylinderFunction<S>, n: i64) -> Result<CylinderFunction<S>> {
    if n < 0 {
        return Err(Error::Shape(format!("cannot keep a negative number of bits ({n})")));
    }
    let level = f.level();
    if n as u64 >= level as u64 {
        return Ok(f.clone());
    }
    let block = 1usize << (level - n as u32);
    let coeffs = f
        .coeffs()
        .chunks(block)
        .flat_map(|c| std::iter::repeat_n(c[0].clone(), block))
        .collect();
    CylinderFunction::new(level, coeffs)
}

/// Reads the cylinder data as a step on `[0, 1]` via binary expansion.
pub fn cantor_to_interval<S: Scalar>(f: &CylinderFunction<S>) -> DyadicStep<S> {
    f.0.clone()
}

/// A random `L`-Lipschitz cylinder function for the metric `2^{-k}`, `k` the
/// first differing bit: `f = L Σ_k c_k(x_0..x_k)` with `c_k ∈ [0, 2^{-(k+1)}]`.
pub fn lipschitz_cylinder(rng: &mut impl Rng, level: u32, lipschitz: &Rational) -> Result<CylinderFunction<Rational>> {
    check_cap(level)?;
    let n = 1usize << level;
    let mut acc = vec![Rational::zero(); n];
    for k in 0..level {
        let den = 16i64 << (k + 1);
        let table: Vec<Rational> = (0..1usize << (k + 1)).map(|_| Rational::new(rng.gen_range(0..=16), den)).collect();
        let shift = level - k - 1;
        for (i, a) in acc.iter_mut().enumerate() {
            *a += &table[i >> shift];
        }
    }
    CylinderFunction::new(level, acc.iter().map(|a| a * lipschitz).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::step_from_ints;
    use crate::universal::{apply_universal, compile_theta};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pl(level: u32, v: &[(i64, i64)]) -> PiecewiseLinear {
        PiecewiseLinear::new(level, v.iter().map(|&(n, d)| r(n, d)).collect()).unwrap()
    }

    #[test]
    fn integration_examples() {
        assert_eq!(integrate(&step_from_ints(&[1, 0, 2, 5])), r(2, 1));
        assert_eq!(integrate(&DyadicStep::<Rational>::unit()), r(1, 1));
        let (f, g) = (step_from_ints(&[1, 3]), step_from_ints(&[7]));
        let j = DyadicStep::juxtapose(&f, &g).unwrap();
        assert_eq!(integrate(&j), (integrate(&f) + integrate(&g)).mul_pow2(-1));
    }

    #[test]
    fn indefinite_examples() {
        assert_eq!(indefinite_integral(&DyadicStep::<Rational>::unit()), PiecewiseLinear::identity(3).unwrap());
        let tent = indefinite_integral(&step_from_ints(&[2, -2]));
        assert_eq!(tent.values(), &[r(0, 1), r(1, 1), r(0, 1)]);
        assert_eq!(indefinite_integral(&DyadicStep::<Rational>::zero()), PiecewiseLinear::zero());
        assert_eq!(recover_function(&tent), step_from_ints(&[2, -2]));
        assert_eq!(recover_function(&PiecewiseLinear::<Rational>::identity(2).unwrap()), DyadicStep::unit());
    }

    #[test]
    fn kappa_examples() {
        let i = PiecewiseLinear::<Rational>::identity(0).unwrap();
        assert_eq!(kappa(&i, &i).unwrap(), i);
        assert_eq!(kappa(&PiecewiseLinear::<Rational>::zero(), &PiecewiseLinear::zero()).unwrap(), PiecewiseLinear::zero());
        let tent = pl(1, &[(0, 1), (1, 1), (0, 1)]);
        let k = kappa(&tent, &PiecewiseLinear::zero()).unwrap();
        assert_eq!(k, pl(2, &[(0, 1), (1, 2), (0, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn kappa_target_matches_cumulative_sums() {
        let t = kappa_target::<Rational>(3).unwrap();
        let table = compile_theta(&t, 3).unwrap();
        let f = step_from_ints(&[1, 0, 2, 5]);
        let nodes = apply_universal(&table, &f).unwrap();
        assert_eq!(nodes, indefinite_integral(&f).refine(3).unwrap().node_vector());
    }

    #[test]
    fn inclusion_examples() {
        let c = inclusion_map(&step_from_ints(&[3, 4]), &Exponent::integer(2), &Exponent::one()).unwrap();
        assert!(c.holds);
        assert_eq!(c.p_norm.value, NormValue::Exact(r(7, 2)));
        assert!((c.r_norm.to_f64() - 12.5f64.sqrt()).abs() < 1e-15);
        let err = inclusion_map(&step_from_ints(&[1]), &Exponent::one(), &Exponent::integer(2)).unwrap_err();
        assert!(err.to_string().starts_with("wrong direction: inclusion goes r into p"));
    }

    #[test]
    fn pairing_examples() {
        let two = Exponent::integer(2);
        assert_eq!(pairing(&step_from_ints(&[1, 1]), &step_from_ints(&[1, -1]), &two, &two).unwrap(), r(0, 1));
        let f = step_from_ints(&[3, 4]);
        assert_eq!(pairing(&f, &f, &two, &two).unwrap(), r(25, 2));
        let three = Exponent::integer(3);
        let three_halves = Exponent::new(r(3, 2)).unwrap();
        assert!(pairing(&f, &f, &three, &three_halves).is_ok());
        assert!(matches!(pairing(&f, &f, &three, &two), Err(Error::NonConjugate { .. })));
    }

    #[test]
    fn gamma_examples() {
        let j = Matrix::<Rational>::identity(2);
        assert_eq!(gamma_hom(&j, &j, 1).unwrap(), Matrix::identity(4));
        let z = Matrix::<Rational>::zeros(2, 2);
        assert_eq!(gamma_hom(&z, &z, 1).unwrap(), Matrix::zeros(4, 4));
        let phi = Matrix::from_rows(vec![vec![r(1, 1), r(2, 1)], vec![r(0, 1), r(-1, 1)]]).unwrap();
        let g = gamma_hom(&phi, &z, 1).unwrap();
        let out = g.mul_vec(&[r(1, 1), r(1, 1), r(5, 1), r(6, 1)]).unwrap();
        assert_eq!(out, vec![r(3, 1), r(-1, 1), r(0, 1), r(0, 1)]);
        assert!(gamma_hom(&phi, &Matrix::zeros(1, 1), 1).is_err());
    }

    #[test]
    fn operator_norm_of_identity_inclusion() {
        // ‖g‖_1 ≤ ‖g‖_q on a probability space, with equality on constants.
        for q in [Exponent::integer(2), Exponent::integer(3), Exponent::Infinite, Exponent::one()] {
            let v = hom_operator_norm(&Matrix::identity(4), 2, &q, 0, 0).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12, "{q}: {v:?}");
        }
    }

    #[test]
    fn cantor_examples() {
        let f = CylinderFunction::new(2, vec![r(1, 1), r(2, 1), r(3, 1), r(4, 1)]).unwrap();
        assert_eq!(cantor_project(&f, 1).unwrap().coeffs(), &[r(1, 1), r(1, 1), r(3, 1), r(3, 1)]);
        assert_eq!(cantor_project(&f, 5).unwrap(), f);
        assert!(cantor_project(&f, -1).is_err());
        assert_eq!(*f.eval(&[true, false]), r(3, 1));
        let unit = CylinderFunction::from_step(DyadicStep::<Rational>::unit());
        assert_eq!(cantor_project(&unit, 0).unwrap(), unit);
        let g = cantor_to_interval(&CylinderFunction::new(1, vec![r(1, 1), r(2, 1)]).unwrap());
        assert_eq!(g.p_norm(&Exponent::one()).value, NormValue::Exact(r(3, 2)));
    }

    #[test]
    fn lipschitz_generator_respects_its_constant() {
        let mut rng = crate::gen::rng(1, "test");
        let l = r(3, 1);
        let f = lipschitz_cylinder(&mut rng, 5, &l).unwrap();
        let c = f.coeffs();
        for i in 0..c.len() {
            for j in 0..c.len() {
                if i != j {
                    let k = (i ^ j).leading_zeros() - (usize::BITS - 5);
                    assert!((&c[i] - &c[j]).abs() <= l.mul_pow2(-(k as i32)));
                }
            }
        }
    }
}
