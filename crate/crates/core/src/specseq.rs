//! Spectral-sequence pages over a chart: asserted differentials with
//! `h_i`-linear propagation, page turns by degreewise homology, tower
//! readout of abelian groups, the algebraic Atiyah–Hirzebruch spectral
//! sequence of a filtered module, and Atiyah–Hirzebruch `E₂` grids.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chart::{
    ChartClass, ChartError, ChartProduct, ClassSum, DiffEntry, DiffKind, DiffReport, ExtChart, HOp,
};
use crate::f2::{F2Matrix, F2Vector, Subspace};
use crate::module::FPModule;

// ---------------------------------------------------------------------------
// Abelian groups and coefficient tables

/// A finitely generated abelian group `Z^free ⊕ ⨁ Z/n`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroupExpr {
    pub free: u32,
    /// Cyclic orders, each at least 2, kept sorted.
    pub torsion: Vec<u64>,
}

impl AbelianGroupExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn z() -> Self {
        Self::free(1)
    }

    pub fn free(rank: u32) -> Self {
        AbelianGroupExpr {
            free: rank,
            torsion: vec![],
        }
    }

    pub fn cyclic(order: u64) -> Self {
        match order {
            0 => Self::z(),
            1 => Self::zero(),
            n => AbelianGroupExpr {
                free: 0,
                torsion: vec![n],
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = self.torsion.clone();
        torsion.extend(&other.torsion);
        torsion.sort_unstable();
        AbelianGroupExpr {
            free: self.free + other.free,
            torsion,
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::free(self.free * other.free);
        for &m in &self.torsion {
            for _ in 0..other.free {
                out = out.direct_sum(&Self::cyclic(m));
            }
        }
        for &n in &other.torsion {
            for _ in 0..self.free {
                out = out.direct_sum(&Self::cyclic(n));
            }
        }
        for &m in &self.torsion {
            for &n in &other.torsion {
                out = out.direct_sum(&Self::cyclic(gcd(m, n)));
            }
        }
        out
    }

    pub fn tor(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for &m in &self.torsion {
            for &n in &other.torsion {
                out = out.direct_sum(&Self::cyclic(gcd(m, n)));
            }
        }
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for AbelianGroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let n = self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|&&m| m == n).count();
            parts.push(if run == 1 {
                format!("Z{n}")
            } else {
                format!("Z{n}^{run}")
            });
            i += run;
        }
        write!(f, "{}", parts.join("⊕"))
    }
}

impl FromStr for AbelianGroupExpr {
    type Err = String;

    /// Parses `0`, `Z`, `Z^2`, `Z4`, `Z_4`, `Z_2^2` joined by `⊕` or `+`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut out = Self::zero();
        for part in text.split(['⊕', '+']) {
            let part = part.trim();
            if part == "0" {
                continue;
            }
            let (base, power) = match part.split_once('^') {
                Some((b, p)) => (
                    b,
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("bad exponent in {part:?}"))?,
                ),
                None => (part, 1),
            };
            let order = base
                .trim()
                .strip_prefix('Z')
                .ok_or_else(|| format!("bad summand {part:?}"))?
                .trim_start_matches('_');
            let summand = if order.is_empty() {
                Self::z()
            } else {
                let n: u64 = order
                    .parse()
                    .map_err(|_| format!("bad order in {part:?}"))?;
                if n < 2 {
                    return Err(format!("cyclic order must be at least 2 in {part:?}"));
                }
                Self::cyclic(n)
            };
            for _ in 0..power {
                out = out.direct_sum(&summand);
            }
        }
        Ok(out)
    }
}

impl Serialize for AbelianGroupExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AbelianGroupExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub degree: u32,
    pub group: AbelianGroupExpr,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
}

/// Groups indexed by degree over a stated range; degrees without an entry
/// inside the range are explicit gaps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub name: String,
    pub min: u32,
    pub max: u32,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientTable {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("table serializes");
        out.push('\n');
        out
    }

    pub fn get(&self, degree: u32) -> Option<&AbelianGroupExpr> {
        self.entries
            .iter()
            .find(|e| e.degree == degree)
            .map(|e| &e.group)
    }

    pub fn gaps(&self) -> Vec<u32> {
        (self.min..=self.max)
            .filter(|&d| self.get(d).is_none())
            .collect()
    }

    /// Entrywise direct sum of two tables on the same range.
    pub fn direct_sum(&self, other: &CoefficientTable) -> CoefficientTable {
        let mut entries = Vec::new();
        for d in self.min.min(other.min)..=self.max.max(other.max) {
            if let (Some(a), Some(b)) = (self.get(d), other.get(d)) {
                entries.push(CoefficientEntry {
                    degree: d,
                    group: a.direct_sum(b),
                    provenance: format!("{} ⊕ {}", self.name, other.name),
                    qualifier: None,
                });
            }
        }
        CoefficientTable {
            name: format!("{} ⊕ {}", self.name, other.name),
            min: self.min.max(other.min),
            max: self.max.min(other.max),
            entries,
        }
    }
}

/// Integral homology groups by degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedGroups {
    pub groups: BTreeMap<u32, AbelianGroupExpr>,
}

impl GradedGroups {
    /// `Z` in each listed degree.
    pub fn free_in(degrees: &[u32]) -> Self {
        GradedGroups {
            groups: degrees
                .iter()
                .map(|&d| (d, AbelianGroupExpr::z()))
                .collect(),
        }
    }

    pub fn get(&self, degree: u32) -> AbelianGroupExpr {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }
}

/// Where the Thom class of a Thom spectrum sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThomShift {
    /// Spectrum convention: Thom class in degree 0.
    Normalized,
    /// Thom space of a rank-`k` bundle: Thom class in degree `k`.
    Rank(u32),
}

/// Homology of a Thom spectrum from the homology of its base.
pub fn thom_homology(base: &GradedGroups, shift: ThomShift) -> GradedGroups {
    let k = match shift {
        ThomShift::Normalized => 0,
        ThomShift::Rank(k) => k,
    };
    GradedGroups {
        groups: base
            .groups
            .iter()
            .map(|(&d, g)| (d + k, g.clone()))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AhssError {
    #[error("coefficient table {table:?} has no entry in degree {degree}")]
    Gap { table: String, degree: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AhssCell {
    pub p: u32,
    pub q: u32,
    pub group: AbelianGroupExpr,
}

/// `E₂^{p,q} = H_p(X; π_q)` on the line `p + q = total`, by the universal
/// coefficient theorem `H_p ⊗ π_q ⊕ Tor(H_{p-1}, π_q)`.
///
/// A coefficient is looked up only when the homology it pairs with can be
/// nonzero, so gaps elsewhere in the table are harmless.
pub fn ahss_e2(
    homology: &GradedGroups,
    coefficients: &CoefficientTable,
    total: u32,
) -> Result<Vec<AhssCell>, AhssError> {
    let mut out = Vec::new();
    for p in 0..=total {
        let q = total - p;
        let h = homology.get(p);
        let h_prev = if p == 0 {
            AbelianGroupExpr::zero()
        } else {
            homology.get(p - 1)
        };
        if h.is_zero() && h_prev.torsion.is_empty() {
            out.push(AhssCell {
                p,
                q,
                group: AbelianGroupExpr::zero(),
            });
            continue;
        }
        let pi = coefficients.get(q).ok_or_else(|| AhssError::Gap {
            table: coefficients.name.clone(),
            degree: q,
        })?;
        out.push(AhssCell {
            p,
            q,
            group: h.tensor(pi).direct_sum(&h_prev.tor(pi)),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Deduction scripts

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub page: u32,
    pub source: String,
    pub target: String,
    pub provenance: String,
    /// 1-based line in the script file, when loaded from one.
    #[serde(skip)]
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionScript {
    #[serde(default = "default_true")]
    pub propagate: bool,
    #[serde(default, rename = "differential")]
    pub differentials: Vec<Assertion>,
}

fn default_true() -> bool {
    true
}

impl Default for DeductionScript {
    fn default() -> Self {
        DeductionScript {
            propagate: true,
            differentials: vec![],
        }
    }
}

#[derive(Deserialize)]
struct ScriptFile {
    #[serde(default = "default_true")]
    propagate: bool,
    #[serde(default)]
    differential: Vec<toml::Spanned<AssertionFields>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssertionFields {
    page: u32,
    source: String,
    target: String,
    provenance: String,
}

impl DeductionScript {
    pub fn from_toml(text: &str) -> Result<Self, SSError> {
        let file: ScriptFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            SSError::Script {
                line,
                message: e.message().to_string(),
            }
        })?;
        let differentials = file
            .differential
            .into_iter()
            .map(|sp| {
                let line = Some(line_of(text, sp.span().start));
                let a = sp.into_inner();
                if a.provenance.trim().is_empty() {
                    return Err(SSError::Script {
                        line,
                        message: "differential needs a provenance string".into(),
                    });
                }
                Ok(Assertion {
                    page: a.page,
                    source: a.source,
                    target: a.target,
                    provenance: a.provenance,
                    line,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(DeductionScript {
            propagate: file.propagate,
            differentials,
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SSError {
    #[error("{}{message}", at_line(*line))]
    Script {
        line: Option<usize>,
        message: String,
    },
    #[error("{}{source_expr}: {error}", at_line(*line))]
    Expression {
        line: Option<usize>,
        source_expr: String,
        error: ChartError,
    },
    #[error("{}d{page}({source_expr}) = {target}: expected target at {expected}, found {found}", at_line(*line))]
    BadShift {
        line: Option<usize>,
        page: u32,
        source_expr: String,
        target: String,
        expected: String,
        found: String,
    },
    #[error("{}{what} {expr} did not survive to E{page} (died on E{died})", at_line(*line))]
    Died {
        line: Option<usize>,
        what: &'static str,
        expr: String,
        page: u32,
        died: u32,
    },
    #[error("{}page {page} precedes the current page {current}", at_line(*line))]
    PastPage {
        line: Option<usize>,
        page: u32,
        current: u32,
    },
    #[error("d{page} is inconsistent on {key}: {detail}")]
    Inconsistent {
        page: u32,
        key: String,
        detail: String,
    },
    #[error("d{page}∘d{page} ≠ 0: {first} hits {second}, which supports a nonzero d{page}")]
    NotAComplex {
        page: u32,
        first: String,
        second: String,
    },
}

// ---------------------------------------------------------------------------
// Pages

/// How classes are graded and how differentials shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    /// `d_r : (s, t) → (s + r, t + r − 1)`.
    Adams,
    /// `d_r : (s, m, n) → (s + 1, m + r − 1, n − r)`.
    Aahss,
}

/// `(s, stem, n)`; `n` is the module filtration and is zero for Adams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub s: u32,
    pub stem: u32,
    pub n: u32,
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(stem {}, s {}, n {})", self.stem, self.s, self.n)
    }
}

#[derive(Debug, Clone)]
struct Cell {
    classes: Vec<usize>,
    cycles: Subspace,
    boundaries: Subspace,
}

impl Cell {
    fn survives(&self, v: &F2Vector) -> bool {
        self.cycles.contains(v) && !self.boundaries.contains(v)
    }

    /// Representatives of `cycles / boundaries`, reduced against boundaries.
    fn representatives(&self) -> Vec<F2Vector> {
        let mut acc = self.boundaries.clone();
        let mut reps = Vec::new();
        for z in self.cycles.basis() {
            let w = self.boundaries.reduced(z);
            if acc.add(&w) {
                reps.push(w);
            }
        }
        reps
    }

    /// Coordinates of a cycle in `cycles / boundaries` against `reps`.
    fn quotient_coordinates(&self, reps: &[F2Vector], v: &F2Vector) -> Option<F2Vector> {
        let mut t = Subspace::tracking(v.len());
        for b in self.boundaries.basis() {
            t.add(b);
        }
        let nb = self.boundaries.dim();
        for r in reps {
            t.add(r);
        }
        let c = t.express(v)?;
        Some(F2Vector::from_ones(
            reps.len(),
            c.iter_ones().filter(|&i| i >= nb).map(|i| i - nb),
        ))
    }
}

#[derive(Debug, Clone)]
enum Target {
    Class(Key, F2Vector),
    /// Zero on this page.
    Zero,
    /// Lands above the chart's filtration window.
    OutOfWindow,
}

#[derive(Debug, Clone)]
struct Differential {
    key: Key,
    source: F2Vector,
    target: Target,
}

/// One logged step of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub page: u32,
    pub message: String,
}

/// A spectral-sequence page: the start-page chart, the current page number,
/// and for each grading key the current cycles and boundaries in start-page
/// coordinates.
#[derive(Debug, Clone)]
pub struct SSState {
    grading: Grading,
    chart: ExtChart,
    filtration: Vec<u32>,
    page: u32,
    max_s: u32,
    cells: BTreeMap<Key, Cell>,
    history: Vec<(u32, BTreeMap<Key, Cell>)>,
    log: Vec<LogEntry>,
}

impl SSState {
    fn new(grading: Grading, chart: ExtChart, filtration: Vec<u32>, page: u32) -> SSState {
        let mut by_key: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
        for (i, c) in chart.classes.iter().enumerate() {
            by_key
                .entry(Key {
                    s: c.s,
                    stem: c.stem(),
                    n: filtration[i],
                })
                .or_default()
                .push(i);
        }
        let cells = by_key
            .into_iter()
            .map(|(k, classes)| {
                let d = classes.len();
                let mut cycles = Subspace::new(d);
                for i in 0..d {
                    cycles.add(&F2Vector::unit(d, i));
                }
                (
                    k,
                    Cell {
                        classes,
                        cycles,
                        boundaries: Subspace::new(d),
                    },
                )
            })
            .collect();
        let max_s = chart
            .window
            .map(|w| w.max_s)
            .unwrap_or_else(|| chart.max_s());
        SSState {
            grading,
            chart,
            filtration,
            page,
            max_s,
            cells,
            history: vec![],
            log: vec![],
        }
    }

    /// The Adams `E₂` page of a chart.
    pub fn adams(chart: &ExtChart) -> SSState {
        let n = chart.classes.len();
        SSState::new(Grading::Adams, chart.clone(), vec![0; n], 2)
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn page(&self) -> u32 {
        self.page
    }

    pub fn chart(&self) -> &ExtChart {
        &self.chart
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    fn key_of(&self, i: usize) -> Key {
        let c = &self.chart.classes[i];
        Key {
            s: c.s,
            stem: c.stem(),
            n: self.filtration[i],
        }
    }

    fn shift(&self, k: Key, r: u32) -> Option<Key> {
        match self.grading {
            Grading::Adams => Some(Key {
                s: k.s + r,
                stem: k.stem.checked_sub(1)?,
                n: 0,
            }),
            Grading::Aahss => Some(Key {
                s: k.s + 1,
                stem: k.stem.checked_sub(1)?,
                n: k.n.checked_sub(r)?,
            }),
        }
    }

    /// Dimension of the current page at a key.
    pub fn dim_at(&self, k: Key) -> usize {
        self.cells
            .get(&k)
            .map(|c| c.cycles.dim() - c.boundaries.dim())
            .unwrap_or(0)
    }

    /// Current-page dimension summed over filtrations `n`.
    pub fn dim(&self, stem: u32, s: u32) -> usize {
        self.cells
            .keys()
            .filter(|k| k.stem == stem && k.s == s)
            .map(|&k| self.dim_at(k))
            .sum()
    }

    fn to_vector(
        &self,
        x: &ClassSum,
        what: &str,
        line: Option<usize>,
    ) -> Result<Option<(Key, F2Vector)>, SSError> {
        let mut keys = x.iter().map(|&i| self.key_of(i));
        let Some(k) = keys.next() else {
            return Ok(None);
        };
        if keys.any(|k2| k2 != k) {
            return Err(SSError::Expression {
                line,
                source_expr: what.to_string(),
                error: ChartError::Inhomogeneous(what.to_string()),
            });
        }
        let cell = &self.cells[&k];
        let v = F2Vector::from_ones(
            cell.classes.len(),
            cell.classes
                .iter()
                .enumerate()
                .filter(|(_, i)| x.contains(i))
                .map(|(p, _)| p),
        );
        Ok(Some((k, v)))
    }

    fn sum_of(&self, k: Key, v: &F2Vector) -> ClassSum {
        let cell = &self.cells[&k];
        v.iter_ones().map(|p| cell.classes[p]).collect()
    }

    fn describe(&self, k: Key, v: &F2Vector) -> String {
        self.chart.sum_to_string(&self.sum_of(k, v))
    }

    fn died_on(&self, k: Key, v: &F2Vector) -> u32 {
        for (page, cells) in &self.history {
            if !cells[&k].survives(v) {
                return *page;
            }
        }
        self.page
    }

    fn evaluate(&self, expr: &str, line: Option<usize>) -> Result<ClassSum, SSError> {
        self.chart
            .evaluate(expr)
            .map_err(|error| SSError::Expression {
                line,
                source_expr: expr.to_string(),
                error,
            })
    }

    /// Resolves one assertion into a differential on the current page.
    fn resolve(&self, a: &Assertion) -> Result<Differential, SSError> {
        let r = self.page;
        let src = self.evaluate(&a.source, a.line)?;
        let tgt = self.evaluate(&a.target, a.line)?;
        let Some((k, sv)) = self.to_vector(&src, &a.source, a.line)? else {
            return Err(SSError::Script {
                line: a.line,
                message: format!("source {} is zero", a.source),
            });
        };
        let Some((kt, tv)) = self.to_vector(&tgt, &a.target, a.line)? else {
            return Err(SSError::Script {
                line: a.line,
                message: format!("target {} is zero", a.target),
            });
        };
        let expected = self.shift(k, r);
        if expected != Some(kt) {
            return Err(SSError::BadShift {
                line: a.line,
                page: r,
                source_expr: a.source.clone(),
                target: a.target.clone(),
                expected: expected
                    .map(|e| e.to_string())
                    .unwrap_or_else(|| "nowhere".into()),
                found: kt.to_string(),
            });
        }
        for (what, key, v, expr) in [
            ("source", k, &sv, &a.source),
            ("target", kt, &tv, &a.target),
        ] {
            if !self.cells[&key].survives(v) {
                return Err(SSError::Died {
                    line: a.line,
                    what,
                    expr: expr.clone(),
                    page: r,
                    died: self.died_on(key, v),
                });
            }
        }
        Ok(Differential {
            key: k,
            source: sv,
            target: Target::Class(kt, tv),
        })
    }

    fn multiply(&self, op: HOp, k: Key, v: &F2Vector) -> Option<(Key, F2Vector)> {
        let x = self.sum_of(k, v);
        let hx = self.chart.multiply(op, &x);
        self.to_vector(&hx, "", None).ok().flatten()
    }

    /// Closes a set of differentials under `h_i`-multiplication:
    /// `d_r(h·x) = h·d_r(x)` whenever `h·x` survives to this page.
    fn propagate(&mut self, mut ds: Vec<Differential>) -> Vec<Differential> {
        let r = self.page;
        let mut seen: BTreeSet<(Key, Vec<usize>)> = ds
            .iter()
            .map(|d| (d.key, d.source.iter_ones().collect()))
            .collect();
        let mut i = 0;
        while i < ds.len() {
            let d = ds[i].clone();
            i += 1;
            for op in HOp::ALL {
                let Some((hk, hx)) = self.multiply(op, d.key, &d.source) else {
                    continue;
                };
                if !seen.insert((hk, hx.iter_ones().collect())) {
                    continue;
                }
                if !self.cells[&hk].survives(&hx) {
                    continue;
                }
                let src_name = self.describe(hk, &hx);
                let target = match &d.target {
                    Target::OutOfWindow => Target::OutOfWindow,
                    Target::Zero => Target::Zero,
                    Target::Class(tk, tv) => match self.multiply(op, *tk, tv) {
                        Some((k2, y)) if self.cells[&k2].survives(&y) => Target::Class(k2, y),
                        Some(_) => Target::Zero,
                        None => {
                            let out = self.shift(hk, r).is_some_and(|k2| k2.s > self.max_s);
                            if out {
                                Target::OutOfWindow
                            } else {
                                Target::Zero
                            }
                        }
                    },
                };
                let message = match &target {
                    Target::Class(k2, y) => format!(
                        "d{r}({src_name}) = {} by {op}-linearity",
                        self.describe(*k2, y)
                    ),
                    Target::Zero => format!("d{r}({src_name}) = 0 by {op}-linearity"),
                    Target::OutOfWindow => {
                        format!("d{r}({src_name}) leaves the filtration window by {op}-linearity")
                    }
                };
                self.log.push(LogEntry { page: r, message });
                ds.push(Differential {
                    key: hk,
                    source: hx,
                    target,
                });
            }
        }
        ds
    }

    /// Applies the differentials of the current page and turns to the next.
    fn turn(&mut self, ds: Vec<Differential>) -> Result<(), SSError> {
        let r = self.page;
        let mut by_key: BTreeMap<Key, Vec<&Differential>> = BTreeMap::new();
        for d in &ds {
            by_key.entry(d.key).or_default().push(d);
        }
        let mut new_cycles: BTreeMap<Key, Subspace> = BTreeMap::new();
        let mut new_boundaries: BTreeMap<Key, Vec<F2Vector>> = BTreeMap::new();
        for (&k, list) in &by_key {
            let cell = &self.cells[&k];
            let dim = cell.classes.len();
            let tk = self.shift(k, r);
            let tdim = tk
                .and_then(|t| self.cells.get(&t))
                .map(|c| c.classes.len())
                .unwrap_or(0);
            let sinks = list
                .iter()
                .filter(|d| matches!(d.target, Target::OutOfWindow))
                .count();
            // Images live in E_r(target) ⊕ F₂^sinks.
            let reduce_target = |y: &F2Vector| -> F2Vector {
                match tk.and_then(|t| self.cells.get(&t)) {
                    Some(c) => c.boundaries.reduced(y),
                    None => y.clone(),
                }
            };
            let mut basis = Subspace::tracking(dim);
            let mut inserted: Vec<F2Vector> = Vec::new();
            let mut images: Vec<F2Vector> = Vec::new();
            let mut raw_images: Vec<Option<F2Vector>> = Vec::new();
            for b in cell.boundaries.basis() {
                basis.add(b);
                inserted.push(b.clone());
                images.push(F2Vector::zeros(tdim + sinks));
                raw_images.push(None);
            }
            let mut sink = 0;
            for d in list {
                let (img, raw) = match &d.target {
                    Target::Class(_, y) => (
                        reduce_target(y).concat(&F2Vector::zeros(sinks)),
                        Some(y.clone()),
                    ),
                    Target::Zero => (F2Vector::zeros(tdim + sinks), None),
                    Target::OutOfWindow => {
                        sink += 1;
                        (
                            F2Vector::zeros(tdim).concat(&F2Vector::unit(sinks, sink - 1)),
                            None,
                        )
                    }
                };
                if !basis.add(&d.source) {
                    let combo = basis.express(&d.source).expect("in span");
                    let mut implied = F2Vector::zeros(tdim + sinks);
                    for j in combo.iter_ones().filter(|&j| j < images.len()) {
                        implied.add_assign(&images[j]);
                    }
                    if implied != img {
                        return Err(SSError::Inconsistent {
                            page: r,
                            key: k.to_string(),
                            detail: format!(
                                "{} is a combination of other sources with a different image",
                                self.describe(k, &d.source)
                            ),
                        });
                    }
                }
                inserted.push(d.source.clone());
                images.push(img);
                raw_images.push(raw);
            }
            for z in cell.cycles.basis() {
                if basis.add(z) {
                    inserted.push(z.clone());
                    images.push(F2Vector::zeros(tdim + sinks));
                    raw_images.push(None);
                }
            }
            // Cycles of d_r: combinations of inserted vectors with zero image.
            let m = F2Matrix::from_rows(images.clone(), tdim + sinks).transpose();
            let mut z = Subspace::new(dim);
            for combo in m.kernel_basis() {
                let mut v = F2Vector::zeros(dim);
                for j in combo.iter_ones() {
                    v.add_assign(&inserted[j]);
                }
                z.add(&v);
            }
            new_cycles.insert(k, z);
            if let Some(t) = tk.filter(|t| self.cells.contains_key(t)) {
                let entry = new_boundaries.entry(t).or_default();
                for y in raw_images.into_iter().flatten() {
                    entry.push(y);
                }
            }
        }
        let snapshot = self.cells.clone();
        for (k, z) in new_cycles {
            self.cells.get_mut(&k).expect("known key").cycles = z;
        }
        for (k, ys) in new_boundaries {
            let cell = self.cells.get_mut(&k).expect("target key exists");
            for y in ys {
                cell.boundaries.add(&y);
            }
        }
        for d in &ds {
            if let Target::Class(tk, y) = &d.target {
                if !self.cells[tk].cycles.contains(y) {
                    return Err(SSError::NotAComplex {
                        page: r,
                        first: self.describe(d.key, &d.source),
                        second: self.describe(*tk, y),
                    });
                }
            }
        }
        self.history.push((r, snapshot));
        self.page += 1;
        Ok(())
    }

    /// Runs a script: pages advance from the current page through the last
    /// page named in the script; unasserted differentials are zero.
    pub fn run(&mut self, script: &DeductionScript) -> Result<(), SSError> {
        for a in &script.differentials {
            if a.page < self.page {
                return Err(SSError::PastPage {
                    line: a.line,
                    page: a.page,
                    current: self.page,
                });
            }
        }
        let last = script
            .differentials
            .iter()
            .map(|a| a.page)
            .max()
            .unwrap_or(self.page - 1);
        while self.page <= last {
            let r = self.page;
            let mut ds = Vec::new();
            for a in script.differentials.iter().filter(|a| a.page == r) {
                let d = self.resolve(a)?;
                self.log.push(LogEntry {
                    page: r,
                    message: format!("d{r}({}) = {}  [{}]", a.source, a.target, a.provenance),
                });
                ds.push(d);
            }
            if script.propagate {
                ds = self.propagate(ds);
            }
            self.turn(ds)?;
        }
        Ok(())
    }

    /// The current page as a chart: one class per representative of
    /// cycles modulo boundaries, with induced `h_i` products.
    pub fn page_chart(&self) -> ExtChart {
        let mut classes = Vec::new();
        let mut reps: BTreeMap<Key, Vec<(F2Vector, String)>> = BTreeMap::new();
        for (&k, cell) in &self.cells {
            for v in cell.representatives() {
                let name = self.describe(k, &v);
                let t = k.s + k.stem;
                classes.push(ChartClass {
                    name: name.clone(),
                    s: k.s,
                    t,
                    flags: self.flags_of(&self.sum_of(k, &v)),
                    citation: None,
                });
                reps.entry(k).or_default().push((v, name));
            }
        }
        let mut products = Vec::new();
        for (&k, list) in &reps {
            for (v, name) in list {
                for op in HOp::ALL {
                    let Some((k2, y)) = self.multiply(op, k, v) else {
                        continue;
                    };
                    let Some(targets) = reps.get(&k2) else {
                        continue;
                    };
                    let tr: Vec<F2Vector> = targets.iter().map(|(t, _)| t.clone()).collect();
                    if let Some(c) = self.cells[&k2].quotient_coordinates(&tr, &y) {
                        for j in c.iter_ones() {
                            products.push(ChartProduct {
                                op,
                                from: name.clone(),
                                to: targets[j].1.clone(),
                                citation: None,
                            });
                        }
                    }
                }
            }
        }
        let mut chart = ExtChart {
            classes,
            products,
            window: self.chart.window,
            ..ExtChart::default()
        };
        chart.canonicalize();
        chart
    }

    fn flags_of(&self, x: &ClassSum) -> Vec<String> {
        let mut flags: Vec<String> = x
            .iter()
            .flat_map(|&i| self.chart.classes[i].flags.clone())
            .collect();
        flags.sort();
        flags.dedup();
        flags
    }

    /// `h₀` on the current page from filtration `s` to `s + 1` in a stem,
    /// as a matrix in representative coordinates.
    fn h0_matrix(&self, stem: u32, s: u32) -> F2Matrix {
        let k = Key { s, stem, n: 0 };
        let k2 = Key {
            s: s + 1,
            stem,
            n: 0,
        };
        let (Some(c1), Some(c2)) = (self.cells.get(&k), self.cells.get(&k2)) else {
            let rows = self.dim_at(k2);
            let cols = self.dim_at(k);
            return F2Matrix::zeros(rows, cols);
        };
        let r1 = c1.representatives();
        let r2 = c2.representatives();
        let mut m = F2Matrix::zeros(r2.len(), r1.len());
        for (j, v) in r1.iter().enumerate() {
            let Some((kk, y)) = self.multiply(HOp::H0, k, v) else {
                continue;
            };
            debug_assert_eq!(kk, k2);
            if let Some(c) = c2.quotient_coordinates(&r2, &y) {
                for i in c.iter_ones() {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Tower readout of one stem of an Adams page: each maximal `h₀`-chain
    /// of length `k` gives `Z/2^k`; a chain reaching the top filtration of
    /// the window gives `Z`.
    pub fn stem_group(&self, stem: u32) -> StemGroup {
        assert_eq!(
            self.grading,
            Grading::Adams,
            "tower readout needs Adams grading"
        );
        let top = self.max_s;
        let dims: Vec<usize> = (0..=top).map(|s| self.dim(stem, s)).collect();
        let h: Vec<F2Matrix> = (0..top).map(|s| self.h0_matrix(stem, s)).collect();
        // rank of h0^j from filtration s
        let rank = |s: u32, j: u32| -> usize {
            if j == 0 {
                return dims[s as usize];
            }
            if s + j > top {
                return 0;
            }
            let mut m = h[s as usize].clone();
            for i in 1..j {
                m = h[(s + i) as usize].mul(&m);
            }
            m.rank()
        };
        let at_least = |s: u32, k: u32| -> usize {
            // chains starting at s of length >= k
            let a = rank(s, k - 1);
            let b = if s == 0 { 0 } else { rank(s - 1, k) };
            a - b
        };
        let mut group = AbelianGroupExpr::zero();
        for s in 0..=top {
            for k in 1..=(top - s + 1) {
                let exact = at_least(s, k) - if s + k > top { 0 } else { at_least(s, k + 1) };
                for _ in 0..exact {
                    let g = if s + k - 1 == top {
                        AbelianGroupExpr::z()
                    } else {
                        AbelianGroupExpr::cyclic(1 << k)
                    };
                    group = group.direct_sum(&g);
                }
            }
        }
        let classes: usize = dims.iter().sum();
        let flagged = self
            .chart
            .classes
            .iter()
            .any(|c| c.stem() == stem && c.has_flag(crate::chart::TRUNCATION_FLAG));
        StemGroup {
            stem,
            group,
            up_to_extension: classes > 1,
            flagged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StemGroup {
    pub stem: u32,
    pub group: AbelianGroupExpr,
    pub up_to_extension: bool,
    /// Some class in the stem carries a flag.
    pub flagged: bool,
}

/// Result of an Adams run.
#[derive(Debug, Clone)]
pub struct AdamsRun {
    pub e_infinity: SSState,
    pub groups: CoefficientTable,
    pub stems: Vec<StemGroup>,
}

/// Runs a deduction script on the Adams spectral sequence of a chart and
/// reads off groups in the chart's window.
pub fn adams_run(chart: &ExtChart, script: &DeductionScript) -> Result<AdamsRun, SSError> {
    let mut state = SSState::adams(chart);
    state.run(script)?;
    let max_stem = chart
        .window
        .map(|w| w.max_stem)
        .unwrap_or_else(|| chart.max_stem());
    let stems: Vec<StemGroup> = (0..=max_stem).map(|n| state.stem_group(n)).collect();
    let entries = stems
        .iter()
        .map(|g| {
            let mut q = Vec::new();
            if g.up_to_extension {
                q.push("up to extension");
            }
            if g.flagged {
                q.push("truncation-sensitive");
            }
            CoefficientEntry {
                degree: g.stem,
                group: g.group.clone(),
                provenance: format!("E{} tower readout", state.page()),
                qualifier: (!q.is_empty()).then(|| q.join(", ")),
            }
        })
        .collect();
    Ok(AdamsRun {
        groups: CoefficientTable {
            name: "E∞ readout".into(),
            min: 0,
            max: max_stem,
            entries,
        },
        stems,
        e_infinity: state,
    })
}

// ---------------------------------------------------------------------------
// Algebraic Atiyah–Hirzebruch spectral sequence

/// `E₁ = base ⊗ module` with `d₁` from the `Sq¹` action, already applied:
/// the returned state is on page 2.
///
/// Classes are named `x⊗e`; `d₁(x⊗e) = Σ h₀x⊗e'` over `e'` with `e` in
/// `Sq¹e'`. Higher differentials are left to scripts.
pub fn aahss_e1(base: &ExtChart, module: &FPModule) -> Result<SSState, SSError> {
    let max_stem = base
        .window
        .map(|w| w.max_stem)
        .unwrap_or_else(|| base.max_stem());
    let max_s = base.window.map(|w| w.max_s).unwrap_or_else(|| base.max_s());
    let mut classes = Vec::new();
    let mut degree_of = HashMap::new();
    let name = |x: &str, e: &str| format!("{x}⊗{e}");
    for e in module.basis() {
        for x in &base.classes {
            classes.push(ChartClass {
                name: name(&x.name, &e.name),
                s: x.s,
                t: x.t + e.degree,
                flags: x.flags.clone(),
                citation: None,
            });
            degree_of.insert(name(&x.name, &e.name), e.degree);
        }
    }
    let mut products = Vec::new();
    for e in module.basis() {
        for p in &base.products {
            products.push(ChartProduct {
                op: p.op,
                from: name(&p.from, &e.name),
                to: name(&p.to, &e.name),
                citation: None,
            });
        }
    }
    let mut chart = ExtChart {
        classes,
        products,
        window: Some(crate::chart::Window {
            max_stem: max_stem + module.max_degree().unwrap_or(0),
            max_s,
        }),
        ..ExtChart::default()
    };
    chart.canonicalize();
    // Canonicalization reorders classes, so filtrations are looked up by name.
    let filtration = chart.classes.iter().map(|c| degree_of[&c.name]).collect();
    let mut state = SSState::new(Grading::Aahss, chart, filtration, 1);
    // d1 as an explicit linear map, one differential per class.
    let mut ds = Vec::new();
    for (j, e) in module.basis().iter().enumerate() {
        let sources_below: Vec<usize> = module
            .indices_in_degree(e.degree.saturating_sub(1))
            .into_iter()
            .filter(|_| e.degree > 0)
            .filter(|&i| module.generator_image(1, i).expect("Sq1 acts").get(j))
            .collect();
        for x in &base.classes {
            let Some(src) = state.chart.index_of(&name(&x.name, &e.name)) else {
                continue;
            };
            let hx = base.multiply(
                HOp::H0,
                &ClassSum::from([base.index_of(&x.name).expect("own class")]),
            );
            let mut tgt = ClassSum::new();
            for &i in &sources_below {
                let ename = &module.basis()[i].name;
                for &h in &hx {
                    if let Some(t) = state.chart.index_of(&name(&base.classes[h].name, ename)) {
                        tgt.insert(t);
                    }
                }
            }
            let (k, v) = state
                .to_vector(&ClassSum::from([src]), "", None)?
                .expect("nonzero");
            let target = match state.to_vector(&tgt, "", None)? {
                Some((kt, y)) => Target::Class(kt, y),
                None => Target::Zero,
            };
            ds.push(Differential {
                key: k,
                source: v,
                target,
            });
        }
    }
    state.turn(ds)?;
    state.log.push(LogEntry {
        page: 1,
        message: "d1 from the Sq1 action".into(),
    });
    Ok(state)
}

/// Compares total dimensions per `(stem, s)` of an AAHSS page against a
/// directly resolved chart in a window. Mismatches are reported as warnings:
/// they point at higher differentials that were not asserted.
pub fn aahss_crosscheck(
    aahss: &SSState,
    direct: &ExtChart,
    window: crate::chart::Window,
) -> DiffReport {
    let mut report = DiffReport::default();
    for stem in 0..=window.max_stem {
        for s in 0..=window.max_s {
            let a = aahss.dim(stem, s);
            let d = direct.dim(stem, s);
            if a != d {
                report.warnings.push(DiffEntry {
                    kind: DiffKind::Dimension,
                    stem,
                    s,
                    detail: format!("spectral sequence {a}, resolution {d}"),
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Window;

    fn tower_chart(len: u32, max_s: u32) -> ExtChart {
        let mut c = ExtChart::default();
        for s in 0..len {
            c.classes.push(ChartClass {
                name: format!("a{s}"),
                s,
                t: s,
                flags: vec![],
                citation: None,
            });
            if s > 0 {
                c.products.push(ChartProduct {
                    op: HOp::H0,
                    from: format!("a{}", s - 1),
                    to: format!("a{s}"),
                    citation: None,
                });
            }
        }
        c.window = Some(Window { max_stem: 0, max_s });
        c
    }

    #[test]
    fn group_expressions() {
        let g: AbelianGroupExpr = "Z⊕Z_4".parse().unwrap();
        assert_eq!(g.to_string(), "Z⊕Z4");
        assert_eq!(
            "Z_2^2".parse::<AbelianGroupExpr>().unwrap().torsion,
            vec![2, 2]
        );
        assert!("0".parse::<AbelianGroupExpr>().unwrap().is_zero());
        let z6: AbelianGroupExpr = "Z6".parse().unwrap();
        let z4: AbelianGroupExpr = "Z4".parse().unwrap();
        assert_eq!(z6.tensor(&z4).to_string(), "Z2");
        assert_eq!(z6.tor(&z4).to_string(), "Z2");
        assert_eq!(AbelianGroupExpr::z().tensor(&z6), z6);
    }

    #[test]
    fn readout_conventions() {
        let st = SSState::adams(&tower_chart(3, 8));
        assert_eq!(st.stem_group(0).group.to_string(), "Z8");
        let st = SSState::adams(&tower_chart(9, 8));
        assert_eq!(st.stem_group(0).group.to_string(), "Z");
        let st = SSState::adams(&tower_chart(1, 8));
        assert_eq!(st.stem_group(0).group.to_string(), "Z2");
        assert!(!st.stem_group(0).up_to_extension);
    }

    #[test]
    fn script_line_numbers() {
        let text = "propagate = true\n\n[[differential]]\npage = 2\nsource = \"a\"\ntarget = \"b\"\nprovenance = \"x\"\n";
        let s = DeductionScript::from_toml(text).unwrap();
        assert_eq!(s.differentials[0].line, Some(3));
        let bad = "[[differential]]\npage = 2\nsource = \"a\"\ntarget = \"b\"\nprovenance = \"\"\n";
        assert!(matches!(
            DeductionScript::from_toml(bad),
            Err(SSError::Script { line: Some(1), .. })
        ));
    }

    #[test]
    fn thom_shift() {
        let cp4 = GradedGroups::free_in(&[0, 2, 4, 6, 8]);
        assert_eq!(thom_homology(&cp4, ThomShift::Normalized), cp4);
        assert_eq!(
            thom_homology(&cp4, ThomShift::Rank(2)).get(10),
            AbelianGroupExpr::z()
        );
    }
}
