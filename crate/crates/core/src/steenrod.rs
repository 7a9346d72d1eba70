//! The mod-2 Steenrod algebra in the admissible basis.
//!
//! Products are computed by concatenating words and reducing with the Adem
//! relations. The coproduct is the Cartan diagonal and the conjugation is the
//! Hopf antipode. [`FiniteSubalgebra`] materializes `A(n)` (generated by
//! `Sq^1, Sq^2, ..., Sq^{2^n}`) as a finite multiplication table, which is
//! what the resolver works with.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::f2::{F2Vector, Subspace};

/// Largest internal degree any algebra operation accepts.
pub const MAX_DEGREE: u32 = 40;

/// `binom(n, k) mod 2`, by Lucas: odd exactly when the bits of `k` are a
/// subset of the bits of `n`. Every parity in the crate goes through here.
#[inline]
pub fn binomial_mod2(n: u32, k: u32) -> bool {
    n & k == k
}

fn check_degree(degree: u32) {
    assert!(
        degree <= MAX_DEGREE,
        "Steenrod algebra degree {degree} exceeds supported cap {MAX_DEGREE}"
    );
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SteenrodError {
    #[error("sequence {0:?} is not admissible")]
    NotAdmissible(Vec<u32>),
    #[error("exponent 0 is not allowed in a monomial")]
    ZeroExponent,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("mixed degrees {0} and {1} in one element")]
    MixedDegrees(u32, u32),
    #[error("unknown subalgebra {0:?}")]
    UnknownSubalgebra(String),
}

/// `Sq^{i_1} ... Sq^{i_r}` with `i_j >= 2 i_{j+1}`; the empty sequence is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleMonomial(Vec<u32>);

pub fn is_admissible(seq: &[u32]) -> bool {
    seq.iter().all(|&i| i > 0) && seq.windows(2).all(|w| w[0] >= 2 * w[1])
}

impl AdmissibleMonomial {
    pub fn new(exponents: Vec<u32>) -> Result<Self, SteenrodError> {
        if exponents.contains(&0) {
            return Err(SteenrodError::ZeroExponent);
        }
        if !is_admissible(&exponents) {
            return Err(SteenrodError::NotAdmissible(exponents));
        }
        Ok(AdmissibleMonomial(exponents))
    }

    pub fn unit() -> Self {
        AdmissibleMonomial(Vec::new())
    }

    pub fn sq(k: u32) -> Self {
        if k == 0 {
            Self::unit()
        } else {
            AdmissibleMonomial(vec![k])
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Excess `2 i_1 - (i_1 + ... + i_r)`; zero for the unit.
    pub fn excess(&self) -> u32 {
        match self.0.first() {
            None => 0,
            Some(&i1) => 2 * i1 - self.degree(),
        }
    }
}

impl fmt::Display for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "Sq({})", parts.join(","))
    }
}

impl fmt::Debug for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `Sq(i1,...,ir)` as a word (not necessarily admissible).
fn parse_word(s: &str) -> Result<Vec<u32>, SteenrodError> {
    let t = s.trim();
    if t == "1" {
        return Ok(Vec::new());
    }
    let inner = t
        .strip_prefix("Sq(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| SteenrodError::Parse(s.to_string()))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| SteenrodError::Parse(s.to_string()))
        })
        .collect()
}

impl FromStr for AdmissibleMonomial {
    type Err = SteenrodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdmissibleMonomial::new(parse_word(s)?)
    }
}

/// All admissible monomials of degree `d`, in lexicographic order.
pub fn admissible_monomials(degree: u32) -> Vec<AdmissibleMonomial> {
    fn go(remaining: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<AdmissibleMonomial>) {
        if remaining == 0 {
            out.push(AdmissibleMonomial(prefix.clone()));
            return;
        }
        // After choosing i, the rest sums to at most i - 1 (geometric bound).
        for i in 1..=cap.min(remaining) {
            if remaining - i <= i.saturating_sub(1) {
                prefix.push(i);
                go(remaining - i, i / 2, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(degree, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// A homogeneous element of the Steenrod algebra: a set of admissible
/// monomials of one degree, with F₂ coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SteenrodElement {
    degree: u32,
    terms: BTreeSet<AdmissibleMonomial>,
}

impl SteenrodElement {
    pub fn zero(degree: u32) -> Self {
        SteenrodElement {
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn unit() -> Self {
        Self::from(AdmissibleMonomial::unit())
    }

    pub fn sq(k: u32) -> Self {
        Self::from(AdmissibleMonomial::sq(k))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &AdmissibleMonomial> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &AdmissibleMonomial) -> bool {
        self.terms.contains(m)
    }

    /// Adds a monomial (toggles its coefficient).
    pub fn toggle(&mut self, m: AdmissibleMonomial) {
        assert_eq!(m.degree(), self.degree, "degree mismatch");
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &SteenrodElement) {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }

    pub fn sum(&self, other: &SteenrodElement) -> SteenrodElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// Coordinates in the admissible basis of this degree.
    pub fn to_coordinates(&self, basis: &[AdmissibleMonomial]) -> F2Vector {
        F2Vector::from_ones(
            basis.len(),
            self.terms.iter().map(|m| {
                basis
                    .binary_search(m)
                    .expect("monomial missing from admissible basis")
            }),
        )
    }

    pub fn from_coordinates(degree: u32, basis: &[AdmissibleMonomial], v: &F2Vector) -> Self {
        let mut out = Self::zero(degree);
        for i in v.iter_ones() {
            out.toggle(basis[i].clone());
        }
        out
    }
}

impl From<AdmissibleMonomial> for SteenrodElement {
    fn from(m: AdmissibleMonomial) -> Self {
        let mut terms = BTreeSet::new();
        let degree = m.degree();
        terms.insert(m);
        SteenrodElement { degree, terms }
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.degree, self)
    }
}

impl FromStr for SteenrodElement {
    type Err = SteenrodError;

    /// Parses sums like `Sq(3,1) + Sq(4)`; words need not be admissible and
    /// are reduced. `0` parses as the zero element of degree 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "0" {
            return Ok(Self::zero(0));
        }
        let mut out: Option<SteenrodElement> = None;
        for part in t.split('+') {
            let word = parse_word(part)?;
            let reduced = adem_reduce(&word);
            match &mut out {
                None => out = Some(reduced),
                Some(acc) => {
                    if acc.degree != reduced.degree {
                        return Err(SteenrodError::MixedDegrees(acc.degree, reduced.degree));
                    }
                    acc.add_assign(&reduced);
                }
            }
        }
        out.ok_or_else(|| SteenrodError::Parse(s.to_string()))
    }
}

thread_local! {
    static ADEM_MEMO: RefCell<HashMap<Vec<u32>, SteenrodElement>> = RefCell::new(HashMap::new());
    static CHI_MEMO: RefCell<HashMap<u32, SteenrodElement>> = RefCell::new(HashMap::new());
}

/// Reduces `Sq^{w_1} ... Sq^{w_k}` to a sum of admissible monomials.
///
/// Zero entries are dropped as `Sq^0 = 1`.
pub fn adem_reduce(word: &[u32]) -> SteenrodElement {
    let word: Vec<u32> = word.iter().copied().filter(|&i| i > 0).collect();
    let degree: u32 = word.iter().sum();
    check_degree(degree);
    if is_admissible(&word) {
        return SteenrodElement::from(AdmissibleMonomial(word));
    }
    if let Some(hit) = ADEM_MEMO.with(|m| m.borrow().get(&word).cloned()) {
        return hit;
    }
    let j = word
        .windows(2)
        .position(|w| w[0] < 2 * w[1])
        .expect("non-admissible word has a violating pair");
    let (a, b) = (word[j], word[j + 1]);
    let mut result = SteenrodElement::zero(degree);
    // Sq^a Sq^b = sum_k binom(b-1-k, a-2k) Sq^{a+b-k} Sq^k  for a < 2b.
    for k in 0..=a / 2 {
        if binomial_mod2(b - 1 - k, a - 2 * k) {
            let mut next = Vec::with_capacity(word.len());
            next.extend_from_slice(&word[..j]);
            next.push(a + b - k);
            if k > 0 {
                next.push(k);
            }
            next.extend_from_slice(&word[j + 2..]);
            result.add_assign(&adem_reduce(&next));
        }
    }
    ADEM_MEMO.with(|m| m.borrow_mut().insert(word, result.clone()));
    result
}

pub fn product(a: &SteenrodElement, b: &SteenrodElement) -> SteenrodElement {
    let degree = a.degree + b.degree;
    check_degree(degree);
    let mut out = SteenrodElement::zero(degree);
    let mut word = Vec::new();
    for x in &a.terms {
        for y in &b.terms {
            word.clear();
            word.extend_from_slice(&x.0);
            word.extend_from_slice(&y.0);
            out.add_assign(&adem_reduce(&word));
        }
    }
    out
}

/// The Cartan diagonal `Δ(Sq^k) = Σ_{i=0}^{k} Sq^i ⊗ Sq^{k-i}`.
pub fn coproduct(k: u32) -> Vec<(SteenrodElement, SteenrodElement)> {
    check_degree(k);
    (0..=k)
        .map(|i| (SteenrodElement::sq(i), SteenrodElement::sq(k - i)))
        .collect()
}

/// An element of `A ⊗ A`, as a set of pairs of admissible monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorElement {
    terms: BTreeSet<(AdmissibleMonomial, AdmissibleMonomial)>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn toggle(&mut self, left: AdmissibleMonomial, right: AdmissibleMonomial) {
        let key = (left, right);
        if !self.terms.remove(&key) {
            self.terms.insert(key);
        }
    }

    pub fn add_product(&mut self, left: &SteenrodElement, right: &SteenrodElement) {
        for l in left.terms() {
            for r in right.terms() {
                self.toggle(l.clone(), r.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &(AdmissibleMonomial, AdmissibleMonomial)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Product in the tensor-product algebra `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (a, b) in &self.terms {
            for (c, d) in &other.terms {
                let left = product(&a.clone().into(), &c.clone().into());
                let right = product(&b.clone().into(), &d.clone().into());
                out.add_product(&left, &right);
            }
        }
        out
    }

    /// Swaps the two tensor factors.
    pub fn twist(&self) -> TensorElement {
        TensorElement {
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }
}

/// `Δ(x)`, extended multiplicatively from the Cartan diagonal.
pub fn coproduct_element(x: &SteenrodElement) -> TensorElement {
    let mut out = TensorElement::zero();
    for m in x.terms() {
        let mut acc = TensorElement::zero();
        acc.toggle(AdmissibleMonomial::unit(), AdmissibleMonomial::unit());
        for &k in m.exponents() {
            let mut factor = TensorElement::zero();
            for (l, r) in coproduct(k) {
                factor.add_product(&l, &r);
            }
            acc = acc.mul(&factor);
        }
        for (l, r) in acc.terms {
            out.toggle(l, r);
        }
    }
    out
}

fn chi_sq(k: u32) -> SteenrodElement {
    if k == 0 {
        return SteenrodElement::unit();
    }
    if let Some(hit) = CHI_MEMO.with(|m| m.borrow().get(&k).cloned()) {
        return hit;
    }
    // Σ_{i+j=k} Sq^i χ(Sq^j) = 0, so χ(Sq^k) = Σ_{i=1}^{k} Sq^i χ(Sq^{k-i}).
    let mut out = SteenrodElement::zero(k);
    for i in 1..=k {
        out.add_assign(&product(&SteenrodElement::sq(i), &chi_sq(k - i)));
    }
    CHI_MEMO.with(|m| m.borrow_mut().insert(k, out.clone()));
    out
}

/// The conjugation (antipode) χ, an anti-automorphism.
pub fn conjugate(x: &SteenrodElement) -> SteenrodElement {
    check_degree(x.degree);
    let mut out = SteenrodElement::zero(x.degree);
    for m in x.terms() {
        let mut acc = SteenrodElement::unit();
        for &k in m.exponents() {
            acc = product(&chi_sq(k), &acc);
        }
        out.add_assign(&acc);
    }
    out
}

/// Which algebra a module or resolution lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubalgebraId {
    /// `A(n)`, generated by `Sq^1, Sq^2, ..., Sq^{2^n}`.
    Level(u32),
    Full,
}

impl SubalgebraId {
    /// Degrees of the algebra generators `Sq^{2^i}`; `None` for the full algebra,
    /// which has infinitely many.
    pub fn generator_degrees(&self) -> Option<Vec<u32>> {
        match *self {
            SubalgebraId::Level(n) => Some((0..=n).map(|i| 1 << i).collect()),
            SubalgebraId::Full => None,
        }
    }

    pub fn contains_generator(&self, degree: u32) -> bool {
        degree.is_power_of_two()
            && match *self {
                SubalgebraId::Level(n) => degree <= 1 << n,
                SubalgebraId::Full => true,
            }
    }
}

impl fmt::Display for SubalgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubalgebraId::Level(n) => write!(f, "A({n})"),
            SubalgebraId::Full => f.write_str("A"),
        }
    }
}

impl FromStr for SubalgebraId {
    type Err = SteenrodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "A" || t.eq_ignore_ascii_case("full") {
            return Ok(SubalgebraId::Full);
        }
        t.strip_prefix("A(")
            .and_then(|r| r.strip_suffix(')'))
            .or(Some(t))
            .and_then(|n| n.parse::<u32>().ok())
            .map(SubalgebraId::Level)
            .ok_or_else(|| SteenrodError::UnknownSubalgebra(s.to_string()))
    }
}

impl Serialize for SubalgebraId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubalgebraId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Basis of the subalgebra in degree `d`.
///
/// For `A(n)` these are the basis elements chosen by [`FiniteSubalgebra`]:
/// each is a generator times a lower basis element, written out in admissible
/// coordinates. A(n) is not spanned by admissible monomials, so elements may
/// be sums. For the full algebra this is the admissible basis itself.
pub fn subalgebra_basis(id: SubalgebraId, degree: u32) -> Vec<SteenrodElement> {
    check_degree(degree);
    match id {
        SubalgebraId::Full => admissible_monomials(degree)
            .into_iter()
            .map(SteenrodElement::from)
            .collect(),
        SubalgebraId::Level(n) => {
            let alg = FiniteSubalgebra::closure(n, degree);
            alg.basis(degree).to_vec()
        }
    }
}

/// Leading admissible monomials of the echelonized degree-`d` basis of `A(n)`;
/// one per dimension.
pub fn subalgebra_leading_monomials(n: u32, degree: u32) -> Vec<AdmissibleMonomial> {
    let alg = FiniteSubalgebra::closure(n, degree);
    let Some(d) = alg.degrees.get(degree as usize) else {
        return Vec::new();
    };
    d.echelon
        .pivots()
        .iter()
        .map(|&p| d.admissible[p].clone())
        .collect()
}

#[derive(Clone, Debug)]
struct DegreeData {
    /// Admissible monomials of this degree; ambient coordinates.
    admissible: Vec<AdmissibleMonomial>,
    basis: Vec<SteenrodElement>,
    /// `basis[k] = Sq^{2^g} * basis_{d - 2^g}[j]`, stored as `(g, j)`.
    factors: Vec<Option<(u32, usize)>>,
    /// Tracking echelon over the chosen basis elements, for coordinates.
    echelon: Subspace,
}

/// `A(n)` as a finite graded algebra with an explicit multiplication table.
#[derive(Debug)]
pub struct FiniteSubalgebra {
    n: u32,
    degrees: Vec<DegreeData>,
    complete: bool,
    /// `mult[da][i][db][j]` = coordinates of `b_{da,i} · b_{db,j}`.
    mult: Vec<Vec<Vec<Vec<F2Vector>>>>,
    /// `indecomposable[g][k]`: whether basis element k of degree `2^g` has a
    /// nonzero `Sq^{2^g}` component modulo decomposables.
    indecomposable: Vec<Vec<bool>>,
}

impl FiniteSubalgebra {
    /// Builds the degree-by-degree closure of the generators up to `max_degree`.
    fn closure(n: u32, max_degree: u32) -> FiniteSubalgebra {
        check_degree(max_degree);
        let gens: Vec<u32> = (0..=n).map(|i| 1u32 << i).collect();
        let mut degrees: Vec<DegreeData> = Vec::new();
        let mut zero_run = 0u32;
        let mut complete = false;
        for d in 0..=max_degree {
            let admissible = admissible_monomials(d);
            let mut span = Subspace::new(admissible.len());
            let mut echelon = Subspace::tracking(admissible.len());
            let mut basis = Vec::new();
            let mut factors = Vec::new();
            if d == 0 {
                let unit = SteenrodElement::unit();
                let v = unit.to_coordinates(&admissible);
                span.add(&v);
                echelon.add(&v);
                basis.push(unit);
                factors.push(None);
            } else {
                for (g, &gd) in gens.iter().enumerate() {
                    if gd > d {
                        break;
                    }
                    let lower = &degrees[(d - gd) as usize];
                    for (j, y) in lower.basis.iter().enumerate() {
                        let x = product(&SteenrodElement::sq(gd), y);
                        let v = x.to_coordinates(&admissible);
                        if span.add(&v) {
                            echelon.add(&v);
                            basis.push(x);
                            factors.push(Some((g as u32, j)));
                        }
                    }
                }
            }
            zero_run = if basis.is_empty() { zero_run + 1 } else { 0 };
            degrees.push(DegreeData {
                admissible,
                basis,
                factors,
                echelon,
            });
            if zero_run >= 1 << n {
                complete = true;
                break;
            }
        }
        if complete {
            let keep = degrees.len() - (1usize << n);
            degrees.truncate(keep);
        }
        FiniteSubalgebra {
            n,
            degrees,
            complete,
            mult: Vec::new(),
            indecomposable: Vec::new(),
        }
    }

    /// The complete algebra `A(n)` with its multiplication table, cached per `n`.
    ///
    /// Panics if `A(n)` does not fit below [`MAX_DEGREE`] (so `n <= 2`).
    pub fn get(n: u32) -> Arc<FiniteSubalgebra> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<FiniteSubalgebra>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().expect("algebra cache").get(&n) {
            return Arc::clone(hit);
        }
        let built = Arc::new(Self::build_full(n));
        cache
            .lock()
            .expect("algebra cache")
            .entry(n)
            .or_insert(built)
            .clone()
    }

    fn build_full(n: u32) -> FiniteSubalgebra {
        let mut alg = Self::closure(n, MAX_DEGREE);
        assert!(
            alg.complete,
            "A({n}) does not fit below degree {MAX_DEGREE}; only n <= 2 is supported"
        );
        let top = alg.top_degree();
        let mut mult = Vec::with_capacity(top as usize + 1);
        for da in 0..=top {
            let mut by_a = Vec::new();
            for a in &alg.degrees[da as usize].basis {
                let mut by_db = Vec::new();
                for db in 0..=top {
                    let row: Vec<F2Vector> = if da + db > top {
                        alg.degrees[db as usize]
                            .basis
                            .iter()
                            .map(|_| F2Vector::zeros(0))
                            .collect()
                    } else {
                        alg.degrees[db as usize]
                            .basis
                            .iter()
                            .map(|b| {
                                alg.coordinates(&product(a, b))
                                    .expect("closed under products")
                            })
                            .collect()
                    };
                    by_db.push(row);
                }
                by_a.push(by_db);
            }
            mult.push(by_a);
        }
        alg.mult = mult;
        alg.indecomposable = (0..=n)
            .map(|g| {
                let deg = 1u32 << g;
                let sq = AdmissibleMonomial::sq(deg);
                alg.degrees
                    .get(deg as usize)
                    .map(|d| d.basis.iter().map(|b| b.contains(&sq)).collect())
                    .unwrap_or_default()
            })
            .collect();
        alg
    }

    pub fn id(&self) -> SubalgebraId {
        SubalgebraId::Level(self.n)
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    /// Highest degree with a nonzero element.
    pub fn top_degree(&self) -> u32 {
        self.degrees.len() as u32 - 1
    }

    pub fn dimension(&self, degree: u32) -> usize {
        self.degrees
            .get(degree as usize)
            .map_or(0, |d| d.basis.len())
    }

    pub fn total_dimension(&self) -> usize {
        self.degrees.iter().map(|d| d.basis.len()).sum()
    }

    pub fn basis(&self, degree: u32) -> &[SteenrodElement] {
        self.degrees
            .get(degree as usize)
            .map_or(&[], |d| d.basis.as_slice())
    }

    /// The generator factorization of a basis element: `Some((g, j))` means
    /// `b = Sq^{2^g} · b_{d - 2^g, j}`; `None` for the unit.
    pub fn factor(&self, degree: u32, index: usize) -> Option<(u32, usize)> {
        self.degrees[degree as usize].factors[index]
    }

    /// Coordinates of `x` in the chosen basis, or `None` if `x ∉ A(n)`.
    pub fn coordinates(&self, x: &SteenrodElement) -> Option<F2Vector> {
        let d = self.degrees.get(x.degree() as usize)?;
        let v = x.to_coordinates(&d.admissible);
        d.echelon.express(&v)
    }

    pub fn contains(&self, x: &SteenrodElement) -> bool {
        x.is_zero() || self.coordinates(x).is_some()
    }

    /// `b_{da,i} · b_{db,j}` in coordinates of degree `da + db`.
    pub fn multiply_basis(&self, da: u32, i: usize, db: u32, j: usize) -> F2Vector {
        if da + db > self.top_degree() {
            return F2Vector::zeros(0);
        }
        self.mult[da as usize][i][db as usize][j].clone()
    }

    /// Whether basis element `k` in degree `2^g` pairs to 1 with the dual of
    /// the indecomposable `Sq^{2^g}`.
    pub fn indecomposable_coefficient(&self, g: u32, k: usize) -> bool {
        self.indecomposable
            .get(g as usize)
            .and_then(|v| v.get(k).copied())
            .unwrap_or(false)
    }

    pub fn element(&self, degree: u32, coords: &F2Vector) -> SteenrodElement {
        let mut out = SteenrodElement::zero(degree);
        for k in coords.iter_ones() {
            out.add_assign(&self.degrees[degree as usize].basis[k]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> SteenrodElement {
        s.parse().unwrap()
    }

    #[test]
    fn adem_small_cases() {
        assert!(adem_reduce(&[1, 1]).is_zero());
        assert_eq!(adem_reduce(&[1, 2]), el("Sq(3)"));
        assert_eq!(adem_reduce(&[2, 2]), el("Sq(3,1)"));
        assert_eq!(adem_reduce(&[1, 3]).degree(), 4);
        assert!(adem_reduce(&[1, 3]).is_zero());
        // idempotent on admissible input
        assert_eq!(adem_reduce(&[4, 2, 1]), el("Sq(4,2,1)"));
    }

    #[test]
    fn product_examples() {
        let x = el("Sq(5,2)");
        assert_eq!(product(&SteenrodElement::unit(), &x), x);
        assert!(product(&el("Sq(1)"), &el("Sq(1)")).is_zero());
        assert_eq!(product(&el("Sq(2)"), &el("Sq(2)")), el("Sq(3,1)"));
    }

    #[test]
    fn coproduct_examples() {
        let c0 = coproduct(0);
        assert_eq!(c0, vec![(SteenrodElement::unit(), SteenrodElement::unit())]);
        let c1 = coproduct(1);
        assert_eq!(c1.len(), 2);
        assert_eq!(c1[0], (SteenrodElement::unit(), el("Sq(1)")));
        assert_eq!(c1[1], (el("Sq(1)"), SteenrodElement::unit()));
        let c2 = coproduct(2);
        assert_eq!(c2[1], (el("Sq(1)"), el("Sq(1)")));
    }

    #[test]
    fn conjugation_low_degrees() {
        assert_eq!(conjugate(&SteenrodElement::unit()), SteenrodElement::unit());
        assert_eq!(conjugate(&el("Sq(1)")), el("Sq(1)"));
        assert_eq!(conjugate(&el("Sq(2)")), el("Sq(2)"));
        assert_eq!(conjugate(&el("Sq(3)")), el("Sq(2,1)"));
        assert_eq!(conjugate(&el("Sq(4)")), el("Sq(4) + Sq(3,1)"));
    }

    #[test]
    fn display_parse_round_trip() {
        for d in 0..12 {
            for m in admissible_monomials(d) {
                let s = m.to_string();
                assert_eq!(s.parse::<AdmissibleMonomial>().unwrap(), m);
            }
        }
        assert_eq!(
            "Sq()".parse::<AdmissibleMonomial>().unwrap(),
            AdmissibleMonomial::unit()
        );
        assert!("Sq(1,2)".parse::<AdmissibleMonomial>().is_err());
        let e = el("Sq(4) + Sq(3,1)");
        assert_eq!(e.to_string().parse::<SteenrodElement>().unwrap(), e);
    }

    #[test]
    fn admissible_enumeration() {
        let names: Vec<String> = admissible_monomials(6)
            .iter()
            .map(|m| m.to_string())
            .collect();
        assert_eq!(names, vec!["Sq(4,2)", "Sq(5,1)", "Sq(6)"]);
        assert_eq!(admissible_monomials(0), vec![AdmissibleMonomial::unit()]);
    }

    #[test]
    fn lucas_parity_matches_factorials() {
        fn binom(n: u64, k: u64) -> u128 {
            let mut r: u128 = 1;
            for i in 0..k {
                r = r * (n - i) as u128 / (i + 1) as u128;
            }
            r
        }
        for n in 0..=64u32 {
            for k in 0..=n.min(30) {
                assert_eq!(
                    binomial_mod2(n, k),
                    binom(n as u64, k as u64) % 2 == 1,
                    "({n} {k})"
                );
            }
        }
    }

    #[test]
    fn subalgebra_sizes() {
        assert_eq!(FiniteSubalgebra::get(0).total_dimension(), 2);
        assert_eq!(FiniteSubalgebra::get(1).total_dimension(), 8);
        let a2 = FiniteSubalgebra::get(2);
        assert_eq!(a2.total_dimension(), 64);
        assert_eq!(a2.top_degree(), 23);
        assert_eq!(
            subalgebra_basis(SubalgebraId::Level(2), 0),
            vec![SteenrodElement::unit()]
        );
        assert_eq!(subalgebra_basis(SubalgebraId::Level(5), 0).len(), 1);
        assert_eq!(subalgebra_leading_monomials(1, 3).len(), 2);
    }

    #[test]
    fn subalgebra_ids_parse() {
        assert_eq!(
            "A(2)".parse::<SubalgebraId>().unwrap(),
            SubalgebraId::Level(2)
        );
        assert_eq!("A".parse::<SubalgebraId>().unwrap(), SubalgebraId::Full);
        assert!("B(2)".parse::<SubalgebraId>().is_err());
    }

    #[test]
    #[should_panic(expected = "exceeds supported cap")]
    fn degree_cap_is_enforced() {
        adem_reduce(&[30, 11]);
    }
}
