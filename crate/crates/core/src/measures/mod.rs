//! Finite measure spaces, measure-preserving partial maps between them, and
//! the simple functions and measures they carry.
//!
//! Every subset is measurable, and two functions are equal almost
//! everywhere when they agree off the weight-zero points.

mod functor;
mod verify;

pub use functor::*;
pub use verify::*;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norm::{weighted_p_norm, NormValue, PNormValue};
use crate::scalar::{Exponent, Rational, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteMeasureSpace {
    points: Vec<String>,
    weights: Vec<Rational>,
}

impl fmt::Debug for FiniteMeasureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, w)) in self.points.iter().zip(&self.weights).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}: {w}")?;
        }
        f.write_str("}")
    }
}

impl FiniteMeasureSpace {
    pub fn new(points: Vec<String>, weights: Vec<Rational>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidSpace(format!("{} points but {} weights", points.len(), weights.len())));
        }
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(p) {
                return Err(Error::InvalidSpace(format!("duplicate point {p:?}")));
            }
        }
        if let Some((p, w)) = points.iter().zip(&weights).find(|(_, w)| w.signum() < 0) {
            return Err(Error::InvalidSpace(format!("negative weight {w} at {p:?}")));
        }
        Ok(FiniteMeasureSpace { points, weights })
    }

    pub fn from_pairs(pairs: &[(&str, Rational)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(p, _)| p.to_string()).collect(), pairs.iter().map(|(_, w)| w.clone()).collect())
    }

    pub fn empty() -> Self {
        FiniteMeasureSpace { points: Vec::new(), weights: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p == id)
    }

    pub fn indices_of(&self, ids: &[String]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| self.index_of(id).ok_or_else(|| Error::InvalidMap(format!("unknown point {id:?}"))))
            .collect()
    }

    /// `μ(X)`.
    pub fn total(&self) -> Rational {
        self.weights.iter().cloned().sum()
    }

    pub fn measure(&self, subset: &[usize]) -> Rational {
        subset.iter().map(|&i| self.weights[i].clone()).sum()
    }

    /// The subset with inherited weights, in this space's point order.
    pub fn subspace(&self, subset: &[usize]) -> FiniteMeasureSpace {
        let mut idx = subset.to_vec();
        idx.sort_unstable();
        idx.dedup();
        FiniteMeasureSpace {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            weights: idx.iter().map(|&i| self.weights[i].clone()).collect(),
        }
    }

    /// `μ(X)^{1/p}`, read as 0 or 1 for `p = ∞`.
    pub fn unit_bound(&self, p: &Exponent) -> NormValue {
        mass_bound(&self.total(), p)
    }
}

/// `m^{1/p}`; for `p = ∞` this is 0 when `m = 0` and 1 otherwise.
pub fn mass_bound(m: &Rational, p: &Exponent) -> NormValue {
    match p {
        Exponent::Infinite => NormValue::Exact(if m.is_zero() { Rational::zero() } else { Rational::one() }),
        _ if p.is_one() => NormValue::Exact(m.clone()),
        Exponent::Finite(q) => NormValue::Approx(m.to_f64().powf(1.0 / q.to_f64())),
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    points: Vec<String>,
    weights: BTreeMap<String, Rational>,
}

impl Serialize for FiniteMeasureSpace {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        RawSpace {
            points: self.points.clone(),
            weights: self.points.iter().cloned().zip(self.weights.iter().cloned()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteMeasureSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mut raw = RawSpace::deserialize(deserializer)?;
        let mut weights = Vec::with_capacity(raw.points.len());
        for p in &raw.points {
            let w = raw.weights.remove(p).ok_or_else(|| serde::de::Error::custom(format!("no weight for point {p:?}")))?;
            weights.push(w);
        }
        if let Some(extra) = raw.weights.keys().next() {
            return Err(serde::de::Error::custom(format!("weight given for unknown point {extra:?}")));
        }
        FiniteMeasureSpace::new(raw.points, weights).map_err(serde::de::Error::custom)
    }
}

/// An injection `i: Y → X` with `μ_X(i(y)) = μ_Y(y)` for every point.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    sub: FiniteMeasureSpace,
    ambient: FiniteMeasureSpace,
    image: Vec<usize>,
}

impl Embedding {
    pub fn new(sub: FiniteMeasureSpace, ambient: FiniteMeasureSpace, image: Vec<usize>) -> Result<Self> {
        if image.len() != sub.len() {
            return Err(Error::InvalidMap("embedding must be defined on every point".into()));
        }
        let mut seen = HashSet::new();
        for (y, &x) in image.iter().enumerate() {
            if x >= ambient.len() {
                return Err(Error::InvalidMap(format!("image index {x} out of range")));
            }
            if !seen.insert(x) {
                return Err(Error::InvalidMap("embedding is not injective".into()));
            }
            if sub.weight(y) != ambient.weight(x) {
                return Err(Error::InvalidMap(format!("weight of {:?} is not preserved", sub.points[y])));
            }
        }
        Ok(Embedding { sub, ambient, image })
    }

    /// The inclusion of a subset with inherited weights.
    pub fn inclusion(ambient: &FiniteMeasureSpace, subset: &[usize]) -> Embedding {
        let mut idx = subset.to_vec();
        idx.sort_unstable();
        idx.dedup();
        Embedding { sub: ambient.subspace(&idx), ambient: ambient.clone(), image: idx }
    }

    pub fn identity(x: &FiniteMeasureSpace) -> Embedding {
        Embedding::inclusion(x, &(0..x.len()).collect::<Vec<_>>())
    }

    pub fn sub(&self) -> &FiniteMeasureSpace {
        &self.sub
    }

    pub fn ambient(&self) -> &FiniteMeasureSpace {
        &self.ambient
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ inner`, for `inner: W → Y` and `self: Y → X`.
    pub fn after(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.ambient != self.sub {
            return Err(Error::SpaceMismatch("embeddings are not composable".into()));
        }
        Ok(Embedding {
            sub: inner.sub.clone(),
            ambient: self.ambient.clone(),
            image: inner.image.iter().map(|&w| self.image[w]).collect(),
        })
    }

    /// The inclusion of the complement of the image.
    pub fn complement(&self) -> Embedding {
        let hit: HashSet<usize> = self.image.iter().copied().collect();
        let rest: Vec<usize> = (0..self.ambient.len()).filter(|i| !hit.contains(i)).collect();
        Embedding::inclusion(&self.ambient, &rest)
    }

    /// `(iY, i⁻¹): X → Y`, the form in which an embedding acts on functions.
    pub fn to_partial_map(&self) -> PartialMap {
        let mut pairs: Vec<(usize, usize)> = self.image.iter().enumerate().map(|(y, &x)| (x, y)).collect();
        pairs.sort_unstable();
        PartialMap {
            source: self.ambient.clone(),
            target: self.sub.clone(),
            domain: pairs.iter().map(|p| p.0).collect(),
            map: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Extension by zero, `|X| × |Y|`.
    pub fn extension_matrix<S: Scalar>(&self) -> Matrix<S> {
        let mut m = Matrix::zeros(self.ambient.len(), self.sub.len());
        for (y, &x) in self.image.iter().enumerate() {
            m.set(x, y, S::one());
        }
        m
    }
}

/// `(A, s): X → Y`, a subset `A ⊆ X` with a map `s: A → Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMap {
    source: FiniteMeasureSpace,
    target: FiniteMeasureSpace,
    /// Sorted indices of `A` in the source.
    domain: Vec<usize>,
    /// `s(domain[k])` as an index into the target.
    map: Vec<usize>,
}

/// The JSON form of a partial map; the spaces are supplied separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialMapSpec {
    pub domain: Vec<String>,
    pub map: BTreeMap<String, String>,
}

impl PartialMap {
    /// A well-formed partial map; measure preservation is not checked.
    pub fn from_parts(source: FiniteMeasureSpace, target: FiniteMeasureSpace, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidMap(format!("point {:?} mapped twice", source.points[w[0].0])));
            }
        }
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= source.len() || *b >= target.len()) {
            return Err(Error::InvalidMap(format!("index pair ({a}, {b}) out of range")));
        }
        Ok(PartialMap {
            source,
            target,
            domain: pairs.iter().map(|p| p.0).collect(),
            map: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// A measure-preserving partial map.
    pub fn new(source: FiniteMeasureSpace, target: FiniteMeasureSpace, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let f = Self::from_parts(source, target, pairs)?;
        if !f.is_measure_preserving() {
            return Err(Error::InvalidMap("map is not measure-preserving".into()));
        }
        Ok(f)
    }

    pub fn from_spec(source: &FiniteMeasureSpace, target: &FiniteMeasureSpace, spec: &PartialMapSpec) -> Result<Self> {
        let mut pairs = Vec::with_capacity(spec.domain.len());
        for a in &spec.domain {
            let i = source.index_of(a).ok_or_else(|| Error::InvalidMap(format!("unknown source point {a:?}")))?;
            let b = spec.map.get(a).ok_or_else(|| Error::InvalidMap(format!("no image for {a:?}")))?;
            let j = target.index_of(b).ok_or_else(|| Error::InvalidMap(format!("unknown target point {b:?}")))?;
            pairs.push((i, j));
        }
        if let Some(extra) = spec.map.keys().find(|k| !spec.domain.contains(k)) {
            return Err(Error::InvalidMap(format!("{extra:?} is mapped but not in the domain")));
        }
        Self::from_parts(source.clone(), target.clone(), pairs)
    }

    pub fn to_spec(&self) -> PartialMapSpec {
        PartialMapSpec {
            domain: self.domain.iter().map(|&a| self.source.points[a].clone()).collect(),
            map: self
                .domain
                .iter()
                .zip(&self.map)
                .map(|(&a, &b)| (self.source.points[a].clone(), self.target.points[b].clone()))
                .collect(),
        }
    }

    /// `(X, id)`.
    pub fn identity(x: &FiniteMeasureSpace) -> Self {
        PartialMap { source: x.clone(), target: x.clone(), domain: (0..x.len()).collect(), map: (0..x.len()).collect() }
    }

    pub fn source(&self) -> &FiniteMeasureSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteMeasureSpace {
        &self.target
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.domain.iter().copied().zip(self.map.iter().copied())
    }

    pub fn is_total(&self) -> bool {
        self.domain.len() == self.source.len()
    }

    /// The image of a source point, if it lies in the domain.
    pub fn apply(&self, a: usize) -> Option<usize> {
        self.domain.binary_search(&a).ok().map(|k| self.map[k])
    }

    pub fn is_measure_preserving(&self) -> bool {
        let mut mass = vec![Rational::zero(); self.target.len()];
        for (a, b) in self.pairs() {
            mass[b] += self.source.weight(a);
        }
        mass.iter().zip(self.target.weights()).all(|(m, w)| m == w)
    }

    /// Injective on its domain with weights matched point by point.
    pub fn is_embedding(&self) -> bool {
        let mut seen = HashSet::new();
        self.pairs().all(|(a, b)| seen.insert(b) && self.source.weight(a) == self.target.weight(b))
    }

    /// `s⁻¹B` as sorted source indices.
    pub fn preimage(&self, subset: &[usize]) -> Vec<usize> {
        let b: HashSet<usize> = subset.iter().copied().collect();
        self.pairs().filter(|(_, y)| b.contains(y)).map(|(x, _)| x).collect()
    }

    /// `(A, id_A): X → A` and `(A, s): A → Y`, whose composite is `self`.
    pub fn factor(&self) -> (Embedding, PartialMap) {
        let inc = Embedding::inclusion(&self.source, &self.domain);
        let rest = PartialMap {
            source: inc.sub.clone(),
            target: self.target.clone(),
            domain: (0..self.domain.len()).collect(),
            map: self.map.clone(),
        };
        (inc, rest)
    }

    /// `g ↦ (g ∘ s)` extended by zero, as an `|X| × |Y|` matrix.
    pub fn pullback_matrix<S: Scalar>(&self) -> Matrix<S> {
        let mut m = Matrix::zeros(self.source.len(), self.target.len());
        for (a, b) in self.pairs() {
            m.set(a, b, S::one());
        }
        m
    }
}

/// `X → Y → Z` composed as `(s⁻¹B, t ∘ s)`.
pub fn compose_partial(f: &PartialMap, g: &PartialMap) -> Result<PartialMap> {
    if f.target != g.source {
        return Err(Error::SpaceMismatch("target of the first map is not the source of the second".into()));
    }
    let pairs = f.pairs().filter_map(|(a, b)| g.apply(b).map(|c| (a, c))).collect();
    PartialMap::from_parts(f.source.clone(), g.target.clone(), pairs)
}

pub fn is_embedding(f: &PartialMap) -> bool {
    f.is_embedding()
}

/// A function on the points of a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct SimpleFn<S: Scalar = Rational> {
    space: FiniteMeasureSpace,
    values: Vec<S>,
}

impl<S: Scalar> SimpleFn<S> {
    pub fn new(space: FiniteMeasureSpace, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Shape(format!("{} values for a space of {} points", values.len(), space.len())));
        }
        Ok(SimpleFn { space, values })
    }

    pub fn constant(space: &FiniteMeasureSpace, c: S) -> Self {
        SimpleFn { space: space.clone(), values: vec![c; space.len()] }
    }

    /// `I_X`.
    pub fn ones(space: &FiniteMeasureSpace) -> Self {
        Self::constant(space, S::one())
    }

    pub fn zero(space: &FiniteMeasureSpace) -> Self {
        Self::constant(space, S::zero())
    }

    pub fn indicator(space: &FiniteMeasureSpace, subset: &[usize]) -> Self {
        let mut values = vec![S::zero(); space.len()];
        for &i in subset {
            values[i] = S::one();
        }
        SimpleFn { space: space.clone(), values }
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch("functions live on different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(SimpleFn { space: self.space.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| a.add_ref(b)).collect() })
    }

    pub fn scale(&self, c: &S) -> Self {
        SimpleFn { space: self.space.clone(), values: self.values.iter().map(|v| c.mul_ref(v)).collect() }
    }

    /// Equality off the weight-zero points.
    pub fn ae_eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(self.space.weights())
                .all(|((a, b), w)| w.is_zero() || a == b)
    }

    /// The distinct values with their fibres, in order of first appearance.
    pub fn fibres(&self) -> Vec<(S, Vec<usize>)> {
        let mut out: Vec<(S, Vec<usize>)> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            match out.iter_mut().find(|(c, _)| c == v) {
                Some((_, idx)) => idx.push(i),
                None => out.push((v.clone(), vec![i])),
            }
        }
        out
    }

    /// The restriction to a subset, as a function on the subspace.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        let mut idx = subset.to_vec();
        idx.sort_unstable();
        idx.dedup();
        SimpleFn { space: self.space.subspace(&idx), values: idx.iter().map(|&i| self.values[i].clone()).collect() }
    }

    /// Extension by zero along an embedding of this function's space.
    pub fn extend(&self, e: &Embedding) -> Result<Self> {
        if e.sub != self.space {
            return Err(Error::SpaceMismatch("embedding does not start at this function's space".into()));
        }
        let mut values = vec![S::zero(); e.ambient.len()];
        for (y, &x) in e.image.iter().enumerate() {
            values[x] = self.values[y].clone();
        }
        Ok(SimpleFn { space: e.ambient.clone(), values })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
struct RawFn<S> {
    space: FiniteMeasureSpace,
    values: BTreeMap<String, S>,
}

impl<S: Scalar> Serialize for SimpleFn<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        RawFn { space: self.space.clone(), values: self.space.points.iter().cloned().zip(self.values.iter().cloned()).collect() }
            .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for SimpleFn<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mut raw = RawFn::<S>::deserialize(deserializer)?;
        let mut values = Vec::with_capacity(raw.space.len());
        for p in raw.space.points() {
            values.push(raw.values.remove(p).ok_or_else(|| serde::de::Error::custom(format!("no value at point {p:?}")))?);
        }
        if let Some(extra) = raw.values.keys().next() {
            return Err(serde::de::Error::custom(format!("value given for unknown point {extra:?}")));
        }
        SimpleFn::new(raw.space, values).map_err(serde::de::Error::custom)
    }
}

/// `g ∘ s` on the domain of `f = (A, s)`, extended by zero.
pub fn lp_pullback<S: Scalar>(f: &PartialMap, g: &SimpleFn<S>) -> Result<SimpleFn<S>> {
    if f.target != g.space {
        return Err(Error::SpaceMismatch("function does not live on the target of the map".into()));
    }
    let mut values = vec![S::zero(); f.source.len()];
    for (a, b) in f.pairs() {
        values[a] = g.values[b].clone();
    }
    SimpleFn::new(f.source.clone(), values)
}

/// `(Σ |f(x)|^p μ(x))^{1/p}`, or the max over positive-weight points for `p = ∞`.
pub fn sp_norm<S: Scalar>(f: &SimpleFn<S>, p: &Exponent) -> PNormValue {
    weighted_p_norm(f.values.iter().zip(f.space.weights()), p)
}

/// `Σ f(x) μ(x)`.
pub fn integrate_measure<S: Scalar>(f: &SimpleFn<S>) -> S {
    let mut acc = S::zero();
    for (v, w) in f.values.iter().zip(f.space.weights()) {
        acc = acc.add_ref(&v.scale_rational(w));
    }
    acc
}

/// Point masses on a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure<S: Scalar = Rational> {
    space: FiniteMeasureSpace,
    mass: Vec<S>,
}

impl<S: Scalar> SignedMeasure<S> {
    pub fn new(space: FiniteMeasureSpace, mass: Vec<S>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::Shape(format!("{} masses for a space of {} points", mass.len(), space.len())));
        }
        Ok(SignedMeasure { space, mass })
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    /// `|ν|(X) = Σ |ν(x)|`.
    pub fn total_variation(&self) -> NormValue {
        let one = Rational::one();
        weighted_p_norm(self.mass.iter().map(|m| (m, &one)), &Exponent::one()).value
    }

    /// Pushforward along an embedding: masses extended by zero.
    pub fn extend(&self, e: &Embedding) -> Result<Self> {
        if e.sub != self.space {
            return Err(Error::SpaceMismatch("embedding does not start at this measure's space".into()));
        }
        let mut mass = vec![S::zero(); e.ambient.len()];
        for (y, &x) in e.image.iter().enumerate() {
            mass[x] = self.mass[y].clone();
        }
        Ok(SignedMeasure { space: e.ambient.clone(), mass })
    }
}

impl<S: Scalar> Serialize for SignedMeasure<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        #[serde(bound(serialize = "S: Scalar"))]
        struct Out<'a, S> {
            space: &'a FiniteMeasureSpace,
            mass: BTreeMap<&'a str, &'a S>,
        }
        Out { space: &self.space, mass: self.space.points.iter().map(String::as_str).zip(&self.mass).collect() }.serialize(serializer)
    }
}

/// `fμ`: mass `f(x) μ(x)` at each point.
pub fn density_measure<S: Scalar>(f: &SimpleFn<S>) -> SignedMeasure<S> {
    SignedMeasure {
        space: f.space.clone(),
        mass: f.values.iter().zip(f.space.weights()).map(|(v, w)| v.scale_rational(w)).collect(),
    }
}

/// `Σ f(x) conj(g(x)) μ(x)`.
pub fn inner_product<S: Scalar>(f: &SimpleFn<S>, g: &SimpleFn<S>) -> Result<S> {
    f.check_same(g)?;
    let mut acc = S::zero();
    for ((a, b), w) in f.values.iter().zip(&g.values).zip(f.space.weights()) {
        acc = acc.add_ref(&a.mul_ref(&b.conj()).scale_rational(w));
    }
    Ok(acc)
}

/// Point ids `prefix0, prefix1, …`.
pub fn point_ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Partitions `0..n` by label, dropping unlabelled points.
pub fn label_classes(labels: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            classes.entry(*l).or_default().push(i);
        }
    }
    let mut out: Vec<(usize, Vec<usize>)> = classes.into_iter().collect();
    out.sort();
    out.into_iter().map(|(_, v)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two_halves() -> FiniteMeasureSpace {
        FiniteMeasureSpace::from_pairs(&[("a", r(1, 2)), ("b", r(1, 2))]).unwrap()
    }

    #[test]
    fn composition_examples() {
        let x = two_halves();
        let y = FiniteMeasureSpace::from_pairs(&[("y", r(1, 1))]).unwrap();
        let c = PartialMap::new(x.clone(), y.clone(), vec![(0, 0), (1, 0)]).unwrap();
        assert_eq!(compose_partial(&c, &PartialMap::identity(&y)).unwrap(), c);
        assert_eq!(compose_partial(&PartialMap::identity(&x), &c).unwrap(), c);
        // g misses y1, so the composite's domain drops its preimage.
        let y2 = FiniteMeasureSpace::from_pairs(&[("y0", r(1, 2)), ("y1", r(1, 2))]).unwrap();
        let f = PartialMap::new(x.clone(), y2.clone(), vec![(0, 0), (1, 1)]).unwrap();
        let z = FiniteMeasureSpace::from_pairs(&[("z", r(1, 2))]).unwrap();
        let g = PartialMap::new(y2.clone(), z, vec![(0, 0)]).unwrap();
        let h = compose_partial(&f, &g).unwrap();
        assert_eq!(h.domain(), &[0]);
        assert!(h.is_measure_preserving());
        assert!(compose_partial(&g, &f).is_err());
    }

    #[test]
    fn embedding_examples() {
        let x = FiniteMeasureSpace::from_pairs(&[("a", r(1, 3)), ("b", r(2, 3)), ("c", r(0, 1))]).unwrap();
        let sub = x.subspace(&[0, 2]);
        let inc = PartialMap::from_parts(sub.clone(), x.clone(), vec![(0, 0), (1, 2)]).unwrap();
        assert!(is_embedding(&inc));
        let y = FiniteMeasureSpace::from_pairs(&[("y", r(1, 1))]).unwrap();
        let c = PartialMap::from_parts(two_halves(), y, vec![(0, 0), (1, 0)]).unwrap();
        assert!(!is_embedding(&c));
        let bad = PartialMap::from_parts(sub, x, vec![(0, 1), (1, 2)]).unwrap();
        assert!(!is_embedding(&bad));
    }

    #[test]
    fn pullback_examples() {
        let x = two_halves();
        let y = FiniteMeasureSpace::from_pairs(&[("y", r(1, 2))]).unwrap();
        let f = PartialMap::new(x.clone(), y.clone(), vec![(0, 0)]).unwrap();
        let g = SimpleFn::new(y.clone(), vec![r(7, 1)]).unwrap();
        assert_eq!(lp_pullback(&f, &g).unwrap().values(), &[r(7, 1), r(0, 1)]);
        assert_eq!(lp_pullback(&PartialMap::identity(&y), &g).unwrap(), g);
        let empty = PartialMap::from_parts(x.clone(), y, vec![]).unwrap();
        assert_eq!(lp_pullback(&empty, &g).unwrap(), SimpleFn::zero(&x));
    }

    #[test]
    fn norm_examples() {
        let x = FiniteMeasureSpace::from_pairs(&[("a", r(3, 1)), ("b", r(1, 1))]).unwrap();
        let one = SimpleFn::<Rational>::ones(&x);
        assert_eq!(sp_norm(&one, &Exponent::one()).value, NormValue::Exact(r(4, 1)));
        assert_eq!(sp_norm(&one, &Exponent::Infinite).value, NormValue::Exact(r(1, 1)));
        let null = FiniteMeasureSpace::from_pairs(&[("a", r(1, 1)), ("n", r(0, 1))]).unwrap();
        let f = SimpleFn::new(null.clone(), vec![r(0, 1), r(5, 1)]).unwrap();
        assert_eq!(sp_norm(&f, &Exponent::Infinite).value, NormValue::Exact(r(0, 1)));
        assert!(f.ae_eq(&SimpleFn::zero(&null)));
    }

    #[test]
    fn integration_density_inner() {
        let x = two_halves();
        let f = SimpleFn::new(x.clone(), vec![r(3, 1), r(5, 1)]).unwrap();
        assert_eq!(integrate_measure(&f), r(4, 1));
        assert_eq!(integrate_measure(&SimpleFn::<Rational>::ones(&x)), r(1, 1));
        let g = SimpleFn::new(x.clone(), vec![r(1, 1), r(-1, 1)]).unwrap();
        let m = density_measure(&g);
        assert_eq!(m.mass(), &[r(1, 2), r(-1, 2)]);
        assert_eq!(m.total_variation(), NormValue::Exact(r(1, 1)));
        assert_eq!(density_measure(&SimpleFn::<Rational>::ones(&x)).mass(), x.weights());
        assert_eq!(inner_product(&f, &SimpleFn::ones(&x)).unwrap(), r(4, 1));
        let ia = SimpleFn::<Rational>::indicator(&x, &[0]);
        let ib = SimpleFn::<Rational>::indicator(&x, &[1]);
        assert_eq!(inner_product(&ia, &ib).unwrap(), r(0, 1));
        assert_eq!(inner_product(&SimpleFn::<Rational>::ones(&x), &SimpleFn::ones(&x)).unwrap(), x.total());
        let other = FiniteMeasureSpace::from_pairs(&[("a", r(1, 1))]).unwrap();
        assert!(inner_product(&f, &SimpleFn::ones(&other)).is_err());
    }

    #[test]
    fn json_shapes() {
        let x: FiniteMeasureSpace = serde_json::from_str(r#"{"points": ["a", "b"], "weights": {"a": "1/2", "b": "1/2"}}"#).unwrap();
        assert_eq!(x, two_halves());
        assert!(serde_json::from_str::<FiniteMeasureSpace>(r#"{"points": ["a"], "weights": {"a": "-1"}}"#).is_err());
        let spec: PartialMapSpec = serde_json::from_str(r#"{"domain": ["a"], "map": {"a": "a"}}"#).unwrap();
        let f = PartialMap::from_spec(&x, &x.subspace(&[0]), &spec).unwrap();
        assert_eq!(f.to_spec(), spec);
        let back: SimpleFn = serde_json::from_str(&serde_json::to_string(&SimpleFn::<Rational>::ones(&x)).unwrap()).unwrap();
        assert_eq!(back, SimpleFn::ones(&x));
    }
}
