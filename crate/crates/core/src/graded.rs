//! Poincaré-series bookkeeping: graded dimensions of polynomial, exterior and
//! tensor algebras, Serre's generators for Eilenberg–MacLane spaces, exact
//! series division, and the Wu formula on Stiefel–Whitney classes.
//!
//! Homology and cohomology dimensions are identified throughout; every space
//! here has finite F₂-homology in each degree.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::steenrod::{admissible_monomials, binomial_mod2, AdmissibleMonomial};

/// Dimensions in degrees `0..=max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDims {
    max: u32,
    dims: Vec<u64>,
}

impl GradedDims {
    pub fn zeros(max: u32) -> Self {
        GradedDims {
            max,
            dims: vec![0; max as usize + 1],
        }
    }

    /// The ground field in degree 0.
    pub fn unit(max: u32) -> Self {
        let mut g = Self::zeros(max);
        g.dims[0] = 1;
        g
    }

    /// Pads (or truncates) `dims` to `0..=max`.
    pub fn from_vec(max: u32, mut dims: Vec<u64>) -> Self {
        dims.resize(max as usize + 1, 0);
        GradedDims { max, dims }
    }

    pub fn max(&self) -> u32 {
        self.max
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    /// Dimension in degree `d`; zero beyond the range.
    pub fn get(&self, d: u32) -> u64 {
        self.dims.get(d as usize).copied().unwrap_or(0)
    }

    pub fn set(&mut self, d: u32, value: u64) {
        self.dims[d as usize] = value;
    }

    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }

    pub fn truncate(&self, max: u32) -> GradedDims {
        GradedDims::from_vec(
            max,
            self.dims.iter().copied().take(max as usize + 1).collect(),
        )
    }

    pub fn add(&self, other: &GradedDims) -> GradedDims {
        let max = self.max.min(other.max);
        GradedDims::from_vec(max, (0..=max).map(|d| self.get(d) + other.get(d)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub degree: u32,
    pub label: String,
}

/// A multiset of algebra generators with readable labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorSet(pub Vec<Generator>);

impl GeneratorSet {
    pub fn from_degrees(degrees: &[u32]) -> Self {
        GeneratorSet(
            degrees
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    assert!(d > 0, "generator degrees must be positive");
                    Generator {
                        degree: d,
                        label: format!("x{i}"),
                    }
                })
                .collect(),
        )
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.0.iter().map(|g| g.degree).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: GeneratorSet) {
        self.0.extend(other.0);
    }
}

/// Free graded-commutative polynomial algebra on `gens`: `Π 1/(1 - t^d)`.
pub fn poly_dims(gens: &GeneratorSet, max: u32) -> GradedDims {
    let mut out = GradedDims::unit(max);
    for g in &gens.0 {
        assert!(g.degree > 0, "generator degrees must be positive");
        let d = g.degree as usize;
        for k in d..=max as usize {
            out.dims[k] += out.dims[k - d];
        }
    }
    out
}

/// Exterior algebra with one generator per basis element of `basis`
/// (which must vanish in degree 0): `Π (1 + t^d)^{basis_d}`.
pub fn ext_alg_dims(basis: &GradedDims, max: u32) -> GradedDims {
    assert_eq!(
        basis.get(0),
        0,
        "exterior algebra needs a positively graded space"
    );
    let mut out = GradedDims::unit(max);
    for d in 1..=max.min(basis.max) {
        for _ in 0..basis.get(d) {
            for k in (d as usize..=max as usize).rev() {
                out.dims[k] += out.dims[k - d as usize];
            }
        }
    }
    out
}

/// Graded convolution `a ⊗ b`.
pub fn tensor_dims(a: &GradedDims, b: &GradedDims, max: u32) -> GradedDims {
    let mut out = GradedDims::zeros(max);
    for i in 0..=max {
        let ai = a.get(i);
        if ai == 0 {
            continue;
        }
        for j in 0..=max - i {
            out.dims[(i + j) as usize] += ai * b.get(j);
        }
    }
    out
}

/// Why a claimed Hopf-subalgebra inclusion cannot hold numerically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("series quotient has coefficient {coefficient} in degree {degree}")]
pub struct InconsistencyReport {
    pub degree: u32,
    pub coefficient: i64,
}

/// The unique `q` with `total = sub ⊗ q` through `max`.
pub fn series_quotient(
    total: &GradedDims,
    sub: &GradedDims,
    max: u32,
) -> Result<GradedDims, InconsistencyReport> {
    assert_eq!(sub.get(0), 1, "divisor must be connected");
    assert_eq!(total.get(0), 1, "dividend must be connected");
    let mut q = GradedDims::zeros(max);
    for d in 0..=max {
        let mut c = total.get(d) as i64;
        for j in 1..=d {
            c -= sub.get(j) as i64 * q.get(d - j) as i64;
        }
        if c < 0 {
            return Err(InconsistencyReport {
                degree: d,
                coefficient: c,
            });
        }
        q.dims[d as usize] = c as u64;
    }
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coefficient {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "Z2")]
    Mod2,
}

/// `K(π, n)` with `π = Z` or `Z/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EMSpaceSpec {
    pub coefficient: Coefficient,
    pub n: u32,
}

impl EMSpaceSpec {
    pub fn mod2(n: u32) -> Self {
        assert!(n >= 1);
        EMSpaceSpec {
            coefficient: Coefficient::Mod2,
            n,
        }
    }

    pub fn integral(n: u32) -> Self {
        assert!(n >= 1);
        EMSpaceSpec {
            coefficient: Coefficient::Integers,
            n,
        }
    }
}

impl fmt::Display for EMSpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coefficient {
            Coefficient::Integers => write!(f, "K(Z,{})", self.n),
            Coefficient::Mod2 => write!(f, "K(Z2,{})", self.n),
        }
    }
}

/// Polynomial generators `Sq^I ι_n` of `H^*(K(π, n); F₂)` in degrees `<= max`:
/// `I` admissible of excess `< n`, and for `π = Z` the last entry of `I` is
/// not 1.
pub fn serre_generators(spec: EMSpaceSpec, max: u32) -> GeneratorSet {
    let mut out = Vec::new();
    if spec.n > max {
        return GeneratorSet(out);
    }
    for extra in 0..=max - spec.n {
        for m in admissible_monomials(extra) {
            if m.excess() >= spec.n {
                continue;
            }
            if spec.coefficient == Coefficient::Integers && m.exponents().last() == Some(&1) {
                continue;
            }
            out.push(Generator {
                degree: spec.n + extra,
                label: serre_label(&m, spec.n),
            });
        }
    }
    GeneratorSet(out)
}

fn serre_label(m: &AdmissibleMonomial, n: u32) -> String {
    if m.is_unit() {
        format!("ι{n}")
    } else {
        format!("{m}ι{n}")
    }
}

pub fn em_dims(spec: EMSpaceSpec, max: u32) -> GradedDims {
    poly_dims(&serre_generators(spec, max), max)
}

/// Dimensions of a product of Eilenberg–MacLane spaces (Künneth).
pub fn product_em_dims(factors: &[EMSpaceSpec], max: u32) -> GradedDims {
    let mut gens = GeneratorSet::default();
    for &f in factors {
        gens.extend(serre_generators(f, max));
    }
    poly_dims(&gens, max)
}

/// Factors `K(Z/2, 2^k - 2)`, `k >= 2`, with fundamental degree `<= max`.
pub fn k1_factors(max: u32) -> Vec<EMSpaceSpec> {
    (2..32)
        .map(|k| (1u32 << k) - 2)
        .take_while(|&d| d <= max)
        .map(EMSpaceSpec::mod2)
        .collect()
}

/// Factors `K(Z/2, 4n - 2)` for `n` not a power of two and `K(Z, 4n)` for
/// `n > 1`, with fundamental degree `<= max`.
pub fn k_factors(max: u32) -> Vec<EMSpaceSpec> {
    let mut out = Vec::new();
    for n in 1..=max / 4 + 1 {
        if !n.is_power_of_two() && 4 * n - 2 <= max {
            out.push(EMSpaceSpec::mod2(4 * n - 2));
        }
        if n > 1 && 4 * n <= max {
            out.push(EMSpaceSpec::integral(4 * n));
        }
    }
    out.sort_by_key(|s| (s.n, s.coefficient));
    out
}

/// A monomial `w_{i_1} ... w_{i_k}` (indices sorted, repetition allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SWMonomial(Vec<u32>);

impl SWMonomial {
    pub fn new(mut indices: Vec<u32>) -> Self {
        indices.retain(|&i| i > 0);
        indices.sort_unstable();
        SWMonomial(indices)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    fn times(&self, other: &SWMonomial) -> SWMonomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SWMonomial::new(v)
    }
}

/// A homogeneous polynomial in Stiefel–Whitney classes over F₂.
///
/// With `oriented` set the ring is `H^*(BSO)`, where `w_1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SWPolynomial {
    oriented: bool,
    terms: BTreeSet<SWMonomial>,
}

impl SWPolynomial {
    pub fn zero(oriented: bool) -> Self {
        SWPolynomial {
            oriented,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(oriented: bool) -> Self {
        Self::monomial(oriented, SWMonomial::new(Vec::new()))
    }

    pub fn w(oriented: bool, i: u32) -> Self {
        Self::monomial(oriented, SWMonomial::new(vec![i]))
    }

    pub fn monomial(oriented: bool, m: SWMonomial) -> Self {
        let mut p = Self::zero(oriented);
        p.toggle(m);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    /// Degree of the (homogeneous) polynomial; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().next().map(SWMonomial::degree)
    }

    pub fn terms(&self) -> impl Iterator<Item = &SWMonomial> {
        self.terms.iter()
    }

    fn toggle(&mut self, m: SWMonomial) {
        if self.oriented && m.0.contains(&1) {
            return;
        }
        if let Some(d) = self.degree() {
            assert_eq!(d, m.degree(), "SWPolynomial must be homogeneous");
        }
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &SWPolynomial) -> SWPolynomial {
        let mut out = self.clone();
        for m in &other.terms {
            out.toggle(m.clone());
        }
        out
    }

    pub fn mul(&self, other: &SWPolynomial) -> SWPolynomial {
        let mut out = SWPolynomial::zero(self.oriented || other.oriented);
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.times(b));
            }
        }
        out
    }
}

impl fmt::Display for SWPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|m| {
                if m.0.is_empty() {
                    "1".to_string()
                } else {
                    m.0.iter().map(|i| format!("w{i}")).collect::<String>()
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot parse Stiefel–Whitney polynomial {0:?}")]
pub struct ParseSWError(String);

impl FromStr for SWPolynomial {
    type Err = ParseSWError;

    /// Parses unoriented polynomials like `w1w2 + w3` (`1` and `0` allowed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseSWError(s.to_string());
        let mut out = SWPolynomial::zero(false);
        if s.trim() == "0" {
            return Ok(out);
        }
        for part in s.split('+') {
            let part = part.trim();
            if part == "1" {
                out.toggle(SWMonomial::new(Vec::new()));
                continue;
            }
            let mut idx = Vec::new();
            for piece in part.split('w').skip(1) {
                idx.push(piece.trim().parse::<u32>().map_err(|_| err())?);
            }
            if idx.is_empty() || !part.starts_with('w') {
                return Err(err());
            }
            out.toggle(SWMonomial::new(idx));
        }
        Ok(out)
    }
}

/// `Sq^i w_j` by Wu's formula: `Σ_t binom(j-i+t-1, t) w_{i-t} w_{j+t}`.
fn wu_generator(i: u32, j: u32, oriented: bool) -> SWPolynomial {
    let mut out = SWPolynomial::zero(oriented);
    if i > j {
        return out;
    }
    if i == 0 {
        return SWPolynomial::w(oriented, j);
    }
    for t in 0..=i {
        // t = 0 has coefficient binom(j-i-1, 0) = 1 even when j = i.
        if t == 0 || binomial_mod2(j - i + t - 1, t) {
            out.toggle(SWMonomial::new(vec![i - t, j + t]));
        }
    }
    out
}

fn wu_monomial(i: u32, m: &[u32], oriented: bool) -> SWPolynomial {
    match m.split_first() {
        None => {
            if i == 0 {
                SWPolynomial::one(oriented)
            } else {
                SWPolynomial::zero(oriented)
            }
        }
        Some((&first, rest)) => {
            let mut out = SWPolynomial::zero(oriented);
            for k in 0..=i.min(first) {
                let left = wu_generator(k, first, oriented);
                if left.is_zero() {
                    continue;
                }
                let right = wu_monomial(i - k, rest, oriented);
                out = out.add(&left.mul(&right));
            }
            out
        }
    }
}

/// `Sq^i p`, by Wu's formula on generators and the Cartan formula on products.
pub fn wu_action(i: u32, p: &SWPolynomial) -> SWPolynomial {
    let mut out = SWPolynomial::zero(p.oriented);
    for m in &p.terms {
        out = out.add(&wu_monomial(i, &m.0, p.oriented));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sw(s: &str) -> SWPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn polynomial_counts() {
        let r3 = poly_dims(&GeneratorSet::from_degrees(&[4, 6, 7]), 12);
        assert_eq!(r3.get(10), 1);
        let empty = poly_dims(&GeneratorSet::default(), 5);
        assert_eq!(empty.dims(), &[1, 0, 0, 0, 0, 0]);
        let two_three = poly_dims(&GeneratorSet::from_degrees(&[2, 3]), 11);
        assert_eq!(two_three.get(11), 2);
    }

    #[test]
    fn exterior_single_generator() {
        let mut basis = GradedDims::zeros(6);
        basis.set(3, 1);
        assert_eq!(ext_alg_dims(&basis, 6).dims(), &[1, 0, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn serre_generators_of_small_spaces() {
        let k2 = serre_generators(EMSpaceSpec::mod2(2), 17);
        assert_eq!(k2.degrees(), vec![2, 3, 5, 9, 17]);
        let k8 = serre_generators(EMSpaceSpec::integral(8), 11);
        assert_eq!(k8.degrees(), vec![8, 10, 11]);
        let k4 = serre_generators(EMSpaceSpec::integral(4), 5);
        assert_eq!(k4.degrees(), vec![4]);
        assert_eq!(em_dims(EMSpaceSpec::mod2(10), 11).get(11), 1);
        assert!(em_dims(EMSpaceSpec::mod2(1), 15)
            .dims()
            .iter()
            .all(|&d| d == 1));
    }

    #[test]
    fn factor_lists() {
        assert_eq!(
            k1_factors(13),
            vec![EMSpaceSpec::mod2(2), EMSpaceSpec::mod2(6)]
        );
        assert_eq!(
            k_factors(13),
            vec![
                EMSpaceSpec::integral(8),
                EMSpaceSpec::mod2(10),
                EMSpaceSpec::integral(12)
            ]
        );
    }

    #[test]
    fn tensor_with_unit_and_symmetry() {
        let a = GradedDims::from_vec(6, vec![1, 0, 2, 1, 0, 3, 1]);
        let b = GradedDims::from_vec(6, vec![1, 1, 0, 0, 2, 0, 0]);
        assert_eq!(tensor_dims(&a, &GradedDims::unit(6), 6), a);
        assert_eq!(tensor_dims(&a, &b, 6), tensor_dims(&b, &a, 6));
    }

    #[test]
    fn quotient_reports_negative_coefficient() {
        let total = GradedDims::from_vec(3, vec![1, 0, 1, 0]);
        let sub = GradedDims::from_vec(3, vec![1, 1, 0, 0]);
        let err = series_quotient(&total, &sub, 3).unwrap_err();
        assert_eq!(err.degree, 1);
        assert_eq!(err.coefficient, -1);
    }

    #[test]
    fn wu_examples() {
        assert_eq!(wu_action(1, &sw("w2")), sw("w1w2 + w3"));
        assert_eq!(wu_action(2, &sw("w2")), sw("w2w2"));
        assert_eq!(wu_action(0, &sw("w1w3 + w4")), sw("w1w3 + w4"));
        assert_eq!(wu_action(3, &sw("w2")), SWPolynomial::zero(false));
        assert_eq!(wu_action(2, &sw("w3")), sw("w2w3 + w1w4 + w5"));
    }

    #[test]
    fn oriented_ring_drops_w1() {
        let w2 = SWPolynomial::w(true, 2);
        assert_eq!(wu_action(1, &w2), SWPolynomial::w(true, 3));
    }

    #[test]
    fn graded_dims_json_shape() {
        let g = GradedDims::from_vec(3, vec![1, 0, 2, 1]);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"max":3,"dims":[1,0,2,1]}"#);
        assert_eq!(serde_json::from_str::<GradedDims>(&json).unwrap(), g);
    }
}
