//! Ext charts: named classes at bidegrees with `h0`, `h1`, `h2` products,
//! expression evaluation over those products, and basis-independent
//! comparison of two charts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::f2::{F2Matrix, F2Vector};

/// Flag carried by classes whose value depends on module data above a
/// truncation degree.
pub const TRUNCATION_FLAG: &str = "truncation-sensitive";

/// Tag carried by classes of the `Ext(F₂)` summand of the MPL⟨8⟩ chart,
/// the image of the map from MO⟨8⟩.
pub const MO8_IMAGE_TAG: &str = "mo8-image";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HOp {
    H0,
    H1,
    H2,
}

impl HOp {
    pub const ALL: [HOp; 3] = [HOp::H0, HOp::H1, HOp::H2];

    pub fn from_index(g: u32) -> HOp {
        match g {
            0 => HOp::H0,
            1 => HOp::H1,
            2 => HOp::H2,
            _ => panic!("h{g} is not charted"),
        }
    }

    pub fn index(self) -> u32 {
        self as u32
    }

    /// Internal-degree shift `2^i`.
    pub fn t_shift(self) -> u32 {
        1 << self.index()
    }

    /// Stem shift `2^i - 1`.
    pub fn stem_shift(self) -> u32 {
        self.t_shift() - 1
    }
}

impl fmt::Display for HOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.index())
    }
}

impl FromStr for HOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h0" => Ok(HOp::H0),
            "h1" => Ok(HOp::H1),
            "h2" => Ok(HOp::H2),
            _ => Err(format!("unknown product {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartClass {
    pub name: String,
    pub s: u32,
    pub t: u32,
    #[serde(default)]
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

impl ChartClass {
    pub fn stem(&self) -> u32 {
        self.t - self.s
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChartProduct {
    pub op: HOp,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub max_stem: u32,
    pub max_s: u32,
}

impl Window {
    pub fn contains(&self, stem: u32, s: u32) -> bool {
        stem <= self.max_stem && s <= self.max_s
    }
}

/// A segment drawn between two bidegrees (or a horizontal rule) that has no
/// algebraic meaning in the chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub kind: String,
    pub from: (u32, u32),
    pub to: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

/// Two expressions expected to name the same class; nonzero unless one
/// side is the literal `0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtChart {
    pub classes: Vec<ChartClass>,
    pub products: Vec<ChartProduct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    /// Products whose reference lines are exhaustive (compared by rank);
    /// the others are compared by containment.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complete_products: Vec<HOp>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Relation>,
    /// Stems inside the window that a reference leaves blank without
    /// asserting they are zero; mismatches there are warnings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undrawn_stems: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChartError {
    #[error("unknown class {0:?}")]
    UnknownClass(String),
    #[error("duplicate class name {0:?}")]
    DuplicateClass(String),
    #[error("{op} product from {from} to {to} does not shift bidegree correctly")]
    BadProduct { op: HOp, from: String, to: String },
    #[error("cannot parse expression {0:?}")]
    Parse(String),
    #[error("expression {0:?} mixes bidegrees")]
    Inhomogeneous(String),
    #[error("malformed chart JSON: {0}")]
    Json(String),
}

/// An F₂-combination of chart classes, by index.
pub type ClassSum = BTreeSet<usize>;

fn toggle(set: &mut ClassSum, i: usize) {
    if !set.remove(&i) {
        set.insert(i);
    }
}

impl ExtChart {
    pub fn from_json(text: &str) -> Result<ExtChart, ChartError> {
        let chart: ExtChart =
            serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
        chart.validate()?;
        Ok(chart)
    }

    /// Canonical serialization: classes sorted by `(s, t)`, products sorted.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("chart serializes");
        out.push('\n');
        out
    }

    pub fn canonicalize(&mut self) {
        self.classes.sort_by_key(|c| (c.s, c.t));
        self.products.sort();
        self.products.dedup();
    }

    pub fn validate(&self) -> Result<(), ChartError> {
        let mut seen = BTreeSet::new();
        for c in &self.classes {
            if !seen.insert(c.name.as_str()) {
                return Err(ChartError::DuplicateClass(c.name.clone()));
            }
        }
        for p in &self.products {
            let a = self
                .class(&p.from)
                .ok_or_else(|| ChartError::UnknownClass(p.from.clone()))?;
            let b = self
                .class(&p.to)
                .ok_or_else(|| ChartError::UnknownClass(p.to.clone()))?;
            if b.s != a.s + 1 || b.t != a.t + p.op.t_shift() {
                return Err(ChartError::BadProduct {
                    op: p.op,
                    from: p.from.clone(),
                    to: p.to.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn class(&self, name: &str) -> Option<&ChartClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    /// Class indices at `(stem, s)`, in chart order.
    pub fn at(&self, stem: u32, s: u32) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].s == s && self.classes[i].stem() == stem)
            .collect()
    }

    pub fn dim(&self, stem: u32, s: u32) -> usize {
        self.at(stem, s).len()
    }

    pub fn max_stem(&self) -> u32 {
        self.classes.iter().map(ChartClass::stem).max().unwrap_or(0)
    }

    pub fn max_s(&self) -> u32 {
        self.classes.iter().map(|c| c.s).max().unwrap_or(0)
    }

    /// All `(stem, s)` carrying at least one class.
    pub fn bidegrees(&self) -> BTreeSet<(u32, u32)> {
        self.classes.iter().map(|c| (c.stem(), c.s)).collect()
    }

    /// `op · x` for a sum of classes.
    pub fn multiply(&self, op: HOp, x: &ClassSum) -> ClassSum {
        let mut out = ClassSum::new();
        for p in self.products.iter().filter(|p| p.op == op) {
            let from = self.index_of(&p.from).expect("validated");
            if x.contains(&from) {
                toggle(&mut out, self.index_of(&p.to).expect("validated"));
            }
        }
        out
    }

    /// The matrix of `op` from `(stem, s)` to its target bidegree, as
    /// columns indexed by the source classes.
    pub fn product_matrix(&self, op: HOp, stem: u32, s: u32) -> F2Matrix {
        let src = self.at(stem, s);
        let dst = self.at(stem + op.stem_shift(), s + 1);
        let mut m = F2Matrix::zeros(dst.len(), src.len());
        for (c, &i) in src.iter().enumerate() {
            let img = self.multiply(op, &ClassSum::from([i]));
            for (r, j) in dst.iter().enumerate() {
                if img.contains(j) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn product_rank(&self, op: HOp, stem: u32, s: u32) -> usize {
        self.product_matrix(op, stem, s).rank()
    }

    /// Evaluates a sum of monomials such as `h0^2 p8 + h1 c0`.
    ///
    /// A monomial is a product of `h0`, `h1`, `h2` powers and at most one
    /// class name; without a class name it acts on the class `1`. A bare
    /// class name that happens to be `h0`, `h1` or `h2` denotes that class.
    pub fn evaluate(&self, expr: &str) -> Result<ClassSum, ChartError> {
        let mut total = ClassSum::new();
        for monomial in expr.split('+') {
            for i in self.evaluate_monomial(monomial.trim(), expr)? {
                toggle(&mut total, i);
            }
        }
        Ok(total)
    }

    fn evaluate_monomial(&self, text: &str, whole: &str) -> Result<ClassSum, ChartError> {
        let parse_err = || ChartError::Parse(whole.to_string());
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(parse_err());
        }
        if tokens == ["0"] {
            return Ok(ClassSum::new());
        }
        if tokens.len() == 1 {
            if let Some(i) = self.index_of(tokens[0]) {
                return Ok(ClassSum::from([i]));
            }
        }
        let mut ops = Vec::new();
        let mut base: Option<&str> = None;
        for tok in tokens {
            let (head, power) = match tok.split_once('^') {
                Some((h, p)) => (h, p.parse::<u32>().map_err(|_| parse_err())?),
                None => (tok, 1),
            };
            match head.parse::<HOp>() {
                Ok(op) => {
                    if base.is_some() {
                        return Err(parse_err());
                    }
                    for _ in 0..power {
                        ops.push(op);
                    }
                }
                _ => {
                    if base.is_some() || power != 1 {
                        return Err(parse_err());
                    }
                    base = Some(head);
                }
            }
        }
        let base = base.unwrap_or("1");
        let i = self
            .index_of(base)
            .ok_or_else(|| ChartError::UnknownClass(base.to_string()))?;
        let mut x = ClassSum::from([i]);
        for op in ops {
            x = self.multiply(op, &x);
        }
        Ok(x)
    }

    /// The bidegree `(stem, s)` of a nonzero homogeneous sum.
    pub fn bidegree_of(&self, x: &ClassSum) -> Option<(u32, u32)> {
        let mut it = x
            .iter()
            .map(|&i| (self.classes[i].stem(), self.classes[i].s));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn sum_to_string(&self, x: &ClassSum) -> String {
        if x.is_empty() {
            return "0".into();
        }
        x.iter()
            .map(|&i| self.classes[i].name.as_str())
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// The coordinate vector of a sum inside its bidegree.
    pub fn coordinates(&self, x: &ClassSum, stem: u32, s: u32) -> F2Vector {
        let at = self.at(stem, s);
        F2Vector::from_ones(
            at.len(),
            at.iter()
                .enumerate()
                .filter(|(_, i)| x.contains(i))
                .map(|(p, _)| p),
        )
    }

    /// Direct sum: classes of `other` are appended; names must not collide.
    pub fn direct_sum(&self, other: &ExtChart) -> Result<ExtChart, ChartError> {
        let mut out = self.clone();
        for c in &other.classes {
            if out.class(&c.name).is_some() {
                return Err(ChartError::DuplicateClass(c.name.clone()));
            }
            out.classes.push(c.clone());
        }
        out.products.extend(other.products.iter().cloned());
        out.window = match (self.window, other.window) {
            (Some(a), Some(b)) => Some(Window {
                max_stem: a.max_stem.min(b.max_stem),
                max_s: a.max_s.min(b.max_s),
            }),
            (a, b) => a.or(b),
        };
        out.canonicalize();
        Ok(out)
    }

    /// Restricts to a window, dropping products that leave it.
    pub fn restrict(&self, window: Window) -> ExtChart {
        let classes: Vec<ChartClass> = self
            .classes
            .iter()
            .filter(|c| window.contains(c.stem(), c.s))
            .cloned()
            .collect();
        let names: BTreeSet<&str> = classes.iter().map(|c| c.name.as_str()).collect();
        let products = self
            .products
            .iter()
            .filter(|p| names.contains(p.from.as_str()) && names.contains(p.to.as_str()))
            .cloned()
            .collect();
        ExtChart {
            classes,
            products,
            window: Some(window),
            ..self.clone()
        }
    }

    /// Adds a flag to every class in a stem.
    pub fn flag_stem(&mut self, stem: u32, flag: &str) {
        for c in &mut self.classes {
            if c.stem() == stem && !c.has_flag(flag) {
                c.flags.push(flag.to_string());
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffKind {
    Dimension,
    ProductRank,
    MissingClass,
    Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub kind: DiffKind,
    pub stem: u32,
    pub s: u32,
    pub detail: String,
}

impl fmt::Display for DiffEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) {:?}: {}",
            self.stem, self.s, self.kind, self.detail
        )
    }
}

/// Mismatches between a computed chart and a reference chart. Entries in
/// flagged cells are warnings; the rest are failures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub failures: Vec<DiffEntry>,
    pub warnings: Vec<DiffEntry>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.failures.is_empty() && self.warnings.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn push(&mut self, flagged: bool, entry: DiffEntry) {
        if flagged {
            self.warnings.push(entry);
        } else {
            self.failures.push(entry);
        }
    }
}

fn cell_flagged(a: &ExtChart, b: &ExtChart, stem: u32, s: u32) -> bool {
    if b.undrawn_stems.contains(&stem) {
        return true;
    }
    let flagged = |c: &ExtChart| {
        c.at(stem, s)
            .iter()
            .any(|&i| c.classes[i].has_flag(TRUNCATION_FLAG))
    };
    flagged(a) || flagged(b)
}

/// Basis-independent comparison inside `window`.
///
/// Checks dimensions per bidegree and the rank of each `h_i` map. Products
/// listed in `reference.complete_products` must match in rank; the other
/// products must have at least the reference's rank. Every reference class
/// whose name evaluates as an expression in `computed` must be a nonzero
/// class at the same bidegree, and every reference relation must hold.
pub fn chart_compare(computed: &ExtChart, reference: &ExtChart, window: Window) -> DiffReport {
    let mut report = DiffReport::default();
    let cells: BTreeSet<(u32, u32)> = computed
        .bidegrees()
        .union(&reference.bidegrees())
        .copied()
        .filter(|&(stem, s)| window.contains(stem, s))
        .collect();
    for &(stem, s) in &cells {
        let (dc, dr) = (computed.dim(stem, s), reference.dim(stem, s));
        if dc != dr {
            report.push(
                cell_flagged(computed, reference, stem, s),
                DiffEntry {
                    kind: DiffKind::Dimension,
                    stem,
                    s,
                    detail: format!("computed {dc}, reference {dr}"),
                },
            );
        }
    }
    for &(stem, s) in &cells {
        for op in HOp::ALL {
            let (ts, tt) = (stem + op.stem_shift(), s + 1);
            if !window.contains(ts, tt) {
                continue;
            }
            let rc = computed.product_rank(op, stem, s);
            let rr = reference.product_rank(op, stem, s);
            let complete = reference.complete_products.contains(&op);
            let bad = if complete { rc != rr } else { rc < rr };
            if bad {
                let flagged = cell_flagged(computed, reference, stem, s)
                    || cell_flagged(computed, reference, ts, tt);
                report.push(
                    flagged,
                    DiffEntry {
                        kind: DiffKind::ProductRank,
                        stem,
                        s,
                        detail: format!("{op} rank computed {rc}, reference {rr}"),
                    },
                );
            }
        }
    }
    for c in &reference.classes {
        if !window.contains(c.stem(), c.s) {
            continue;
        }
        let flagged =
            c.has_flag(TRUNCATION_FLAG) || cell_flagged(computed, reference, c.stem(), c.s);
        match computed.evaluate(&c.name) {
            Ok(x) if !x.is_empty() && computed.bidegree_of(&x) == Some((c.stem(), c.s)) => {}
            Ok(x) => report.push(
                flagged,
                DiffEntry {
                    kind: DiffKind::MissingClass,
                    stem: c.stem(),
                    s: c.s,
                    detail: format!("{} evaluates to {}", c.name, computed.sum_to_string(&x)),
                },
            ),
            Err(e) => report.push(
                flagged,
                DiffEntry {
                    kind: DiffKind::MissingClass,
                    stem: c.stem(),
                    s: c.s,
                    detail: format!("{}: {e}", c.name),
                },
            ),
        }
    }
    for rel in &reference.relations {
        let lhs = computed.evaluate(&rel.lhs);
        let rhs = computed.evaluate(&rel.rhs);
        let (stem, s) = lhs
            .as_ref()
            .ok()
            .and_then(|x| computed.bidegree_of(x))
            .unwrap_or((0, 0));
        let zero_allowed = rel.lhs.trim() == "0" || rel.rhs.trim() == "0";
        let ok =
            matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b && (zero_allowed || !a.is_empty()));
        if !ok {
            report.push(
                cell_flagged(computed, reference, stem, s),
                DiffEntry {
                    kind: DiffKind::Relation,
                    stem,
                    s,
                    detail: format!("{} = {} does not hold", rel.lhs, rel.rhs),
                },
            );
        }
    }
    report
}

/// Per-bidegree dimensions, for quick display and tests.
pub fn dims_table(chart: &ExtChart) -> BTreeMap<(u32, u32), usize> {
    let mut out = BTreeMap::new();
    for c in &chart.classes {
        *out.entry((c.stem(), c.s)).or_insert(0) += 1;
    }
    out
}
