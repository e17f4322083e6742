//! p-norm values and the weighted / unweighted direct-sum combinations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Exponent, Rational, Scalar};

/// A norm value: exact when the exponent and the data allow it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormValue {
    Exact(Rational),
    Approx(f64),
}

impl NormValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(r) => r.to_f64(),
            NormValue::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            NormValue::Exact(r) => Some(r),
            NormValue::Approx(_) => None,
        }
    }
}

/// `‖·‖_p` of some element, tagged with the exponent it was computed for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PNormValue {
    pub p: Exponent,
    pub value: NormValue,
}

impl PNormValue {
    pub fn exact(p: Exponent, r: Rational) -> Self {
        PNormValue { p, value: NormValue::Exact(r) }
    }

    pub fn approx(p: Exponent, x: f64) -> Self {
        PNormValue { p, value: NormValue::Approx(x) }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Exact comparison when both sides are exact, else `a ≤ b + tol`.
    pub fn le(&self, other: &PNormValue, tol: f64) -> bool {
        match (&self.value, &other.value) {
            (NormValue::Exact(a), NormValue::Exact(b)) => a <= b,
            _ => self.to_f64() <= other.to_f64() + tol,
        }
    }

    /// Exact equality when both are exact, else relative closeness.
    pub fn close_to(&self, other: &PNormValue, rel_tol: f64) -> bool {
        match (&self.value, &other.value) {
            (NormValue::Exact(a), NormValue::Exact(b)) => a == b,
            _ => rel_close(self.to_f64(), other.to_f64(), rel_tol),
        }
    }
}

pub fn rel_close(a: f64, b: f64, rel_tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= rel_tol * scale || (a - b).abs() <= f64::MIN_POSITIVE
}

/// How the two halves of a direct sum are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// `(½(a^p + b^p))^{1/p}`: the sum underlying the juxtaposition map.
    Averaged,
    /// `(a^p + b^p)^{1/p}`: the sum underlying sequence prepending.
    Plain,
}

/// Combines two norms with the same exponent into the norm of the pair.
pub fn direct_sum_norm(a: &PNormValue, b: &PNormValue, weighting: Weighting) -> Result<PNormValue> {
    if a.p != b.p {
        return Err(Error::ExponentMismatch(a.p.to_string(), b.p.to_string()));
    }
    let p = a.p.clone();
    if let (Some(x), Some(y)) = (a.value.exact(), b.value.exact()) {
        if p.is_infinite() {
            return Ok(PNormValue::exact(p, x.max(y).clone()));
        }
        if p.is_one() {
            let s = x + y;
            let v = match weighting {
                Weighting::Averaged => s.mul_pow2(-1),
                Weighting::Plain => s,
            };
            return Ok(PNormValue::exact(p, v));
        }
    }
    let (x, y) = (a.to_f64(), b.to_f64());
    let v = match &p {
        Exponent::Infinite => x.max(y),
        Exponent::Finite(q) => {
            let q = q.to_f64();
            let s = x.powf(q) + y.powf(q);
            let s = match weighting {
                Weighting::Averaged => 0.5 * s,
                Weighting::Plain => s,
            };
            s.powf(1.0 / q)
        }
    };
    Ok(PNormValue::approx(p, v))
}

/// `(Σ w_i |x_i|^p)^{1/p}`, or the max of `|x_i|` over positive weights for `p = ∞`.
///
/// Exact for `p ∈ {1, ∞}` when every modulus is rational. For integer `p`
/// the inner sum is formed exactly whenever possible so only the final root
/// rounds.
pub fn weighted_p_norm<'a, S: Scalar>(
    entries: impl IntoIterator<Item = (&'a S, &'a Rational)>,
    p: &Exponent,
) -> PNormValue {
    let entries: Vec<(&S, &Rational)> = entries.into_iter().collect();
    match p {
        Exponent::Infinite => {
            let live = entries.iter().filter(|(_, w)| w.signum() > 0);
            let exact: Option<Vec<Rational>> = live.clone().map(|(x, _)| x.modulus_exact()).collect();
            match exact {
                Some(v) => PNormValue::exact(p.clone(), v.into_iter().max().unwrap_or_else(Rational::zero)),
                None => PNormValue::approx(
                    p.clone(),
                    live.map(|(x, _)| x.modulus_f64()).fold(0.0, f64::max),
                ),
            }
        }
        Exponent::Finite(q) if q.is_integer() => {
            let k = q.to_f64() as u32;
            let exact = if k.is_multiple_of(2) {
                let half = (k / 2) as i32;
                Some(entries.iter().map(|(x, w)| *w * &x.modulus_sq().pow(half)).sum::<Rational>())
            } else {
                entries
                    .iter()
                    .map(|(x, w)| x.modulus_exact().map(|m| *w * &m.pow(k as i32)))
                    .collect::<Option<Vec<_>>>()
                    .map(|v| v.into_iter().sum::<Rational>())
            };
            match exact {
                Some(s) if k == 1 => PNormValue::exact(p.clone(), s),
                Some(s) => PNormValue::approx(p.clone(), root(&s, k as f64)),
                None => float_norm(&entries, p.clone(), k as f64),
            }
        }
        Exponent::Finite(q) => float_norm(&entries, p.clone(), q.to_f64()),
    }
}

fn root(s: &Rational, k: f64) -> f64 {
    let x = s.to_f64();
    if k == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / k)
    }
}

fn float_norm<S: Scalar>(entries: &[(&S, &Rational)], p: Exponent, q: f64) -> PNormValue {
    let s: f64 = entries.iter().map(|(x, w)| w.to_f64() * x.modulus_f64().powf(q)).sum();
    PNormValue::approx(p, s.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn direct_sums() {
        let p1 = Exponent::one();
        let a = PNormValue::exact(p1.clone(), r(3, 1));
        let b = PNormValue::exact(p1.clone(), r(4, 1));
        assert_eq!(direct_sum_norm(&a, &b, Weighting::Averaged).unwrap().value, NormValue::Exact(r(7, 2)));
        assert_eq!(direct_sum_norm(&a, &b, Weighting::Plain).unwrap().value, NormValue::Exact(r(7, 1)));

        let inf = Exponent::Infinite;
        let a = PNormValue::exact(inf.clone(), r(3, 1));
        let b = PNormValue::exact(inf, r(4, 1));
        assert_eq!(direct_sum_norm(&a, &b, Weighting::Averaged).unwrap().value, NormValue::Exact(r(4, 1)));

        let p2 = Exponent::integer(2);
        let x = PNormValue::approx(p2.clone(), 1.25);
        let same = direct_sum_norm(&x, &x, Weighting::Averaged).unwrap();
        assert!(rel_close(same.to_f64(), 1.25, 1e-15));
        let a = PNormValue::exact(p2.clone(), r(3, 1));
        let b = PNormValue::exact(p2, r(4, 1));
        assert!(rel_close(direct_sum_norm(&a, &b, Weighting::Plain).unwrap().to_f64(), 5.0, 1e-15));
    }

    #[test]
    fn mismatched_exponents_rejected() {
        let a = PNormValue::exact(Exponent::one(), r(1, 1));
        let b = PNormValue::exact(Exponent::Infinite, r(1, 1));
        assert!(matches!(direct_sum_norm(&a, &b, Weighting::Plain), Err(Error::ExponentMismatch(..))));
    }

    #[test]
    fn infinity_norm_ignores_null_points() {
        let xs = [r(0, 1), r(9, 1)];
        let ws = [r(1, 1), r(0, 1)];
        let v = weighted_p_norm(xs.iter().zip(ws.iter()), &Exponent::Infinite);
        assert_eq!(v.value, NormValue::Exact(r(0, 1)));
    }
}
