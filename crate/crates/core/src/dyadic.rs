//! Dyadic step functions on `[0, 1]`.
//!
//! A [`DyadicStep`] at level `n` stores its values on the `2^n` open
//! intervals `((i-1)/2^n, i/2^n)`. Two steps are equal when they agree as
//! functions (almost everywhere), whatever their levels; values at the
//! breakpoints are never represented. The same data read as a function of
//! the first `n` bits of a point of Cantor space is a cylinder function, see
//! [`crate::instances::CylinderFunction`].

use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{weighted_p_norm, PNormValue};
use crate::scalar::{Exponent, Rational, Scalar};

pub use crate::norm::{direct_sum_norm, NormValue, Weighting};

/// Default bound on representable levels (`2^24` coefficients).
pub const DEFAULT_LEVEL_CAP: u32 = 24;

static LEVEL_CAP: AtomicU32 = AtomicU32::new(DEFAULT_LEVEL_CAP);

pub fn level_cap() -> u32 {
    LEVEL_CAP.load(Ordering::Relaxed)
}

/// Changes the process-wide level cap.
pub fn set_level_cap(cap: u32) {
    LEVEL_CAP.store(cap.min(40), Ordering::Relaxed);
}

pub fn check_cap(level: u32) -> Result<()> {
    let cap = level_cap();
    if level > cap {
        Err(Error::LevelCap { level, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawStep<S>", bound(deserialize = "S: Scalar"))]
pub struct DyadicStep<S = Rational> {
    level: u32,
    coeffs: Vec<S>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
struct RawStep<S> {
    level: u32,
    coeffs: Vec<S>,
}

impl<S: Scalar> TryFrom<RawStep<S>> for DyadicStep<S> {
    type Error = Error;
    fn try_from(raw: RawStep<S>) -> Result<Self> {
        DyadicStep::new(raw.level, raw.coeffs)
    }
}

impl<S: Scalar> DyadicStep<S> {
    pub fn new(level: u32, coeffs: Vec<S>) -> Result<Self> {
        check_cap(level)?;
        if coeffs.len() != 1usize << level {
            return Err(Error::BadLength { level, got: coeffs.len() });
        }
        Ok(DyadicStep { level, coeffs })
    }

    /// Builds a step from a coefficient list whose length is a power of two.
    pub fn from_coeffs(coeffs: Vec<S>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::BadLength { level: 0, got: n });
        }
        Self::new(n.trailing_zeros(), coeffs)
    }

    pub fn constant(c: S) -> Self {
        DyadicStep { level: 0, coeffs: vec![c] }
    }

    /// The constant function `1`.
    pub fn unit() -> Self {
        Self::constant(S::one())
    }

    pub fn zero() -> Self {
        Self::constant(S::zero())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_zero)
    }

    /// The same function at level `m ≥ level`.
    pub fn refine(&self, m: u32) -> Result<Self> {
        if m < self.level {
            return Err(Error::CannotCoarsen { from: self.level, to: m });
        }
        check_cap(m)?;
        if m == self.level {
            return Ok(self.clone());
        }
        let rep = 1usize << (m - self.level);
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * rep);
        for c in &self.coeffs {
            coeffs.extend(std::iter::repeat_n(c, rep).cloned());
        }
        Ok(DyadicStep { level: m, coeffs })
    }

    fn refined_unchecked(&self, m: u32) -> Self {
        self.refine(m).expect("refining to a level at or below an existing one")
    }

    pub fn is_canonical(&self) -> bool {
        self.level == 0 || self.coeffs.chunks(2).any(|pair| pair[0] != pair[1])
    }

    /// The minimal-level representative.
    pub fn canonicalize(&self) -> Self {
        let mut out = self.clone();
        while !out.is_canonical() {
            out.coeffs = out.coeffs.chunks(2).map(|pair| pair[0].clone()).collect();
            out.level -= 1;
        }
        out
    }

    /// The juxtaposition: `f` compressed onto `[0, ½]`, `g` onto `[½, 1]`.
    pub fn juxtapose(f: &Self, g: &Self) -> Result<Self> {
        let m = f.level.max(g.level);
        check_cap(m + 1)?;
        let mut coeffs = f.refined_unchecked(m).coeffs;
        coeffs.extend(g.refined_unchecked(m).coeffs);
        Ok(DyadicStep { level: m + 1, coeffs })
    }

    /// Inverse of [`DyadicStep::juxtapose`]; level-0 steps are refined to level 1 first.
    pub fn split(&self) -> (Self, Self) {
        let f = if self.level == 0 {
            DyadicStep { level: 1, coeffs: vec![self.coeffs[0].clone(), self.coeffs[0].clone()] }
        } else {
            self.clone()
        };
        let half = f.coeffs.len() / 2;
        let mut left = f.coeffs;
        let right = left.split_off(half);
        let level = f.level - 1;
        (DyadicStep { level, coeffs: left }, DyadicStep { level, coeffs: right })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&S, &S) -> S) -> Self {
        let m = self.level.max(other.level);
        let (a, b) = (self.refined_unchecked(m), other.refined_unchecked(m));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| op(x, y)).collect();
        DyadicStep { level: m, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, S::add_ref)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, S::sub_ref)
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        self.zip_with(other, S::mul_ref)
    }

    pub fn scale(&self, c: &S) -> Self {
        DyadicStep { level: self.level, coeffs: self.coeffs.iter().map(|x| c.mul_ref(x)).collect() }
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        DyadicStep { level: self.level, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// `(Σ_i |c_i|^p 2^{-n})^{1/p}`, or `max_i |c_i|` for `p = ∞`.
    pub fn p_norm(&self, p: &Exponent) -> PNormValue {
        let w = Rational::one().mul_pow2(-(self.level as i32));
        weighted_p_norm(self.coeffs.iter().map(|c| (c, &w)), p)
    }

    /// `Σ_i c_i 2^{-n}`, computed exactly.
    pub fn integrate_exact(&self) -> S {
        let mut acc = S::zero();
        for c in &self.coeffs {
            acc = acc.add_ref(c);
        }
        acc.mul_pow2(-(self.level as i32))
    }
}

impl<S: Scalar> PartialEq for DyadicStep<S> {
    fn eq(&self, other: &Self) -> bool {
        let m = self.level.max(other.level);
        let (a, b) = (self.refined_unchecked(m), other.refined_unchecked(m));
        a.coeffs == b.coeffs
    }
}

/// Elementwise-built steps from small integers, mostly for tests and examples.
pub fn step_from_ints(values: &[i64]) -> DyadicStep<Rational> {
    DyadicStep::from_coeffs(values.iter().map(|&v| Rational::from(v)).collect()).expect("length must be a power of two")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::rel_close;
    use crate::scalar::ComplexRational;

    fn s(v: &[i64]) -> DyadicStep {
        step_from_ints(v)
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn refine_examples() {
        let f = s(&[5]).refine(2).unwrap();
        assert_eq!(f.level(), 2);
        assert_eq!(f.coeffs(), s(&[5, 5, 5, 5]).coeffs());
        assert_eq!(s(&[1, 2]).refine(1).unwrap().coeffs(), s(&[1, 2]).coeffs());
        assert_eq!(s(&[1, 2]).refine(2).unwrap().coeffs(), s(&[1, 1, 2, 2]).coeffs());
        assert_eq!(s(&[1, 2]).refine(0), Err(Error::CannotCoarsen { from: 1, to: 0 }));
    }

    #[test]
    fn canonicalize_examples() {
        let c = s(&[3, 3]).canonicalize();
        assert_eq!((c.level(), c.coeffs()), (0, s(&[3]).coeffs()));
        assert_eq!(s(&[1, 2]).canonicalize().level(), 1);
        // (2,3) blocks the collapse even though (1,1) is a matching pair.
        assert_eq!(s(&[1, 1, 2, 3]).canonicalize().level(), 2);
        let f = s(&[4, 4, 4, 4, 7, 7, 7, 7]).canonicalize();
        assert_eq!(f.coeffs(), s(&[4, 7]).coeffs());
        assert_eq!(f.canonicalize().coeffs(), f.coeffs());
    }

    #[test]
    fn juxtapose_and_split_examples() {
        assert_eq!(DyadicStep::juxtapose(&s(&[2]), &s(&[4])).unwrap().coeffs(), s(&[2, 4]).coeffs());
        let unit = DyadicStep::<Rational>::unit();
        let ii = DyadicStep::juxtapose(&unit, &unit).unwrap().canonicalize();
        assert_eq!((ii.level(), ii.coeffs()), (0, unit.coeffs()));
        let j = DyadicStep::juxtapose(&s(&[1, 2]), &s(&[5])).unwrap();
        assert_eq!((j.level(), j.coeffs()), (2, s(&[1, 2, 5, 5]).coeffs()));

        let (a, b) = s(&[1, 2, 5, 5]).split();
        assert_eq!((a.coeffs(), b.coeffs()), (s(&[1, 2]).coeffs(), s(&[5, 5]).coeffs()));
        let (a, b) = unit.split();
        assert_eq!((a.level(), b.level()), (0, 0));
        assert!(a == unit && b == unit);
        let (a, b) = s(&[7, -3]).split();
        assert_eq!((a.coeffs(), b.coeffs()), (s(&[7]).coeffs(), s(&[-3]).coeffs()));
    }

    #[test]
    fn vector_space_examples() {
        assert_eq!(s(&[1, 2]).add(&s(&[10])).coeffs(), s(&[11, 12]).coeffs());
        assert!(s(&[1, -4, 2, 9]).scale(&Rational::zero()).is_zero());
        assert_eq!(s(&[1, 2]).pointwise_mul(&s(&[3, 4])).coeffs(), s(&[3, 8]).coeffs());
    }

    #[test]
    fn norm_examples() {
        let f = s(&[3, 4]);
        assert!(rel_close(f.p_norm(&Exponent::integer(2)).to_f64(), 12.5f64.sqrt(), 1e-15));
        assert!((f.p_norm(&Exponent::integer(2)).to_f64() - 3.53553).abs() < 1e-5);
        assert_eq!(f.p_norm(&Exponent::Infinite).value, NormValue::Exact(r(4, 1)));
        assert_eq!(f.p_norm(&Exponent::one()).value, NormValue::Exact(r(7, 2)));
        let unit = DyadicStep::<Rational>::unit();
        for p in [Exponent::one(), Exponent::integer(3), "5/2".parse().unwrap(), Exponent::Infinite] {
            assert!(rel_close(unit.p_norm(&p).to_f64(), 1.0, 1e-15));
        }
        assert!(matches!("1/2".parse::<Exponent>(), Err(Error::NotANormExponent(_))));
    }

    #[test]
    fn integration_examples() {
        assert_eq!(s(&[1, 0, 2, 5]).integrate_exact(), r(2, 1));
        assert_eq!(DyadicStep::<Rational>::unit().integrate_exact(), r(1, 1));
        let f = s(&[3, -1, 8, 2]);
        assert_eq!(f.scale(&r(-1, 1)).integrate_exact(), -f.integrate_exact());
    }

    #[test]
    fn equality_is_up_to_refinement() {
        assert_eq!(s(&[1, 2]), s(&[1, 1, 2, 2]));
        assert_ne!(s(&[1, 2]), s(&[1, 2, 2, 2]));
    }

    #[test]
    fn length_and_cap_checks() {
        assert!(matches!(DyadicStep::new(1, vec![Rational::one()]), Err(Error::BadLength { .. })));
        assert!(matches!(DyadicStep::<Rational>::unit().refine(DEFAULT_LEVEL_CAP + 1), Err(Error::LevelCap { .. })));
    }

    #[test]
    fn json_shape() {
        let f: DyadicStep = serde_json::from_str(r#"{"level":1,"coeffs":["1/2","-3"]}"#).unwrap();
        assert_eq!(f.coeffs(), &[r(1, 2), r(-3, 1)]);
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"level":1,"coeffs":["1/2","-3"]}"#);
        assert!(serde_json::from_str::<DyadicStep>(r#"{"level":2,"coeffs":["1"]}"#).is_err());
        let z: DyadicStep<ComplexRational> =
            serde_json::from_str(r#"{"level":0,"coeffs":[{"re":"3","im":"4"}]}"#).unwrap();
        assert_eq!(z.p_norm(&Exponent::one()).value, NormValue::Exact(r(5, 1)));
    }
}
