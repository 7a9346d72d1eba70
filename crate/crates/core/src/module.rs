//! Finite graded modules over `A(n)` given by generator action tables.
//!
//! A module stores, for each algebra generator `Sq^{2^g}`, the image of every
//! basis element. The action of an arbitrary element of `A(n)` is obtained
//! through the generator factorization of the basis of `A(n)`; this is well
//! defined exactly when [`FPModule::check_relations`] succeeds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::f2::{F2Vector, Subspace};
use crate::graded::GradedDims;
use crate::steenrod::{conjugate, product, FiniteSubalgebra, SteenrodElement, SubalgebraId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("modules over {0} are not supported; use A(n)")]
    UnsupportedAlgebra(SubalgebraId),
    #[error("duplicate basis element {0:?}")]
    DuplicateName(String),
    #[error("unknown basis element {0:?}")]
    UnknownName(String),
    #[error("Sq{op} is not a generator of {algebra}")]
    NotAGenerator { op: u32, algebra: SubalgebraId },
    #[error("Sq{op} {element} must land in degree {expected}, but {target} has degree {found}")]
    DegreeMismatch {
        op: u32,
        element: String,
        target: String,
        expected: u32,
        found: u32,
    },
    #[error("the action violates a relation of {algebra} in degree {degree} on {element}")]
    RelationViolated {
        algebra: SubalgebraId,
        degree: u32,
        element: String,
    },
    #[error("{0} is not an element of the module's algebra")]
    NotInAlgebra(String),
    #[error("expected a {expected} module, found a {found} module")]
    WrongSide { expected: Side, found: Side },
    #[error("modules are over different algebras: {0} and {1}")]
    AlgebraMismatch(SubalgebraId, SubalgebraId),
    #[error("not split: {0}")]
    NotSplit(String),
    #[error("malformed module file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: u32,
}

/// A generator action that was set to zero because its target lies above
/// the module's truncation degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TruncationFlag {
    pub op: u32,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FPModule {
    level: u32,
    side: Side,
    basis: Vec<BasisElement>,
    /// `actions[g][i]`: image of basis element `i` under `Sq^{2^g}`.
    actions: Vec<Vec<F2Vector>>,
    truncation: Option<u32>,
    flags: BTreeSet<TruncationFlag>,
}

impl FPModule {
    pub fn new(algebra: SubalgebraId, side: Side) -> Result<Self, ModuleError> {
        let level = match algebra {
            SubalgebraId::Level(n) => n,
            SubalgebraId::Full => return Err(ModuleError::UnsupportedAlgebra(algebra)),
        };
        Ok(FPModule {
            level,
            side,
            basis: Vec::new(),
            actions: vec![Vec::new(); level as usize + 1],
            truncation: None,
            flags: BTreeSet::new(),
        })
    }

    /// `F₂` concentrated in degree 0 with trivial action.
    pub fn trivial(algebra: SubalgebraId) -> Result<Self, ModuleError> {
        let mut m = Self::new(algebra, Side::Left)?;
        m.add_basis("1", 0)?;
        Ok(m)
    }

    pub fn add_basis(&mut self, name: &str, degree: u32) -> Result<usize, ModuleError> {
        if self.index_of(name).is_some() {
            return Err(ModuleError::DuplicateName(name.to_string()));
        }
        self.basis.push(BasisElement {
            name: name.to_string(),
            degree,
        });
        let n = self.basis.len();
        for table in &mut self.actions {
            for v in table.iter_mut() {
                *v = v.concat(&F2Vector::zeros(1));
            }
            table.push(F2Vector::zeros(n));
        }
        Ok(n - 1)
    }

    pub fn algebra(&self) -> SubalgebraId {
        SubalgebraId::Level(self.level)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn flags(&self) -> &BTreeSet<TruncationFlag> {
        &self.flags
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn degree_of(&self, i: usize) -> u32 {
        self.basis[i].degree
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.basis.iter().map(|b| b.degree).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.basis.iter().map(|b| b.degree).max()
    }

    /// Indices of basis elements in degree `d`, in basis order.
    pub fn indices_in_degree(&self, d: u32) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.basis[i].degree == d)
            .collect()
    }

    pub fn dims(&self) -> GradedDims {
        let max = self.max_degree().unwrap_or(0);
        let mut g = GradedDims::zeros(max);
        for b in &self.basis {
            g.set(b.degree, g.get(b.degree) + 1);
        }
        g
    }

    fn generator_index(&self, op: u32) -> Result<usize, ModuleError> {
        if op.is_power_of_two() && op.trailing_zeros() <= self.level {
            Ok(op.trailing_zeros() as usize)
        } else {
            Err(ModuleError::NotAGenerator {
                op,
                algebra: self.algebra(),
            })
        }
    }

    fn lookup(&self, name: &str) -> Result<usize, ModuleError> {
        self.index_of(name)
            .ok_or_else(|| ModuleError::UnknownName(name.to_string()))
    }

    /// Sets `Sq^op source = Σ targets` for a generator `Sq^op`.
    pub fn set_action(
        &mut self,
        op: u32,
        source: &str,
        targets: &[&str],
    ) -> Result<(), ModuleError> {
        let g = self.generator_index(op)?;
        let i = self.lookup(source)?;
        let mut v = F2Vector::zeros(self.basis.len());
        for t in targets {
            let j = self.lookup(t)?;
            let expected = self.basis[i].degree + op;
            if self.basis[j].degree != expected {
                return Err(ModuleError::DegreeMismatch {
                    op,
                    element: source.to_string(),
                    target: t.to_string(),
                    expected,
                    found: self.basis[j].degree,
                });
            }
            v.flip(j);
        }
        self.actions[g][i] = v;
        Ok(())
    }

    /// Declares that nothing above `degree` is modeled and flags every
    /// generator action whose target would lie above it.
    pub fn set_truncation(&mut self, degree: u32) {
        self.truncation = Some(degree);
        for b in &self.basis {
            for g in 0..=self.level {
                let op = 1u32 << g;
                if b.degree + op > degree {
                    self.flags.insert(TruncationFlag {
                        op,
                        source: b.name.clone(),
                    });
                }
            }
        }
    }

    pub fn is_flagged(&self, op: u32, source: &str) -> bool {
        self.flags.contains(&TruncationFlag {
            op,
            source: source.to_string(),
        })
    }

    /// Image of basis element `i` under the generator `Sq^op`.
    pub fn generator_image(&self, op: u32, i: usize) -> Result<&F2Vector, ModuleError> {
        let g = self.generator_index(op)?;
        Ok(&self.actions[g][i])
    }

    fn apply_generator(&self, g: usize, v: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.basis.len());
        for i in v.iter_ones() {
            out.add_assign(&self.actions[g][i]);
        }
        out
    }

    /// The action of every basis element of `A(n)` on every module basis
    /// element.
    pub fn action_table(&self) -> ActionTable {
        let alg = FiniteSubalgebra::get(self.level);
        let n = self.basis.len();
        let mut table: Vec<Vec<Vec<F2Vector>>> = Vec::new();
        for d in 0..=alg.top_degree() {
            let mut by_k = Vec::new();
            for k in 0..alg.dimension(d) {
                let images: Vec<F2Vector> = match alg.factor(d, k) {
                    None => (0..n).map(|i| F2Vector::unit(n, i)).collect(),
                    Some((g, j)) => {
                        let lower: &Vec<F2Vector> = &table[(d - (1 << g)) as usize][j];
                        match self.side {
                            // Sq^g · (y · m)
                            Side::Left => lower
                                .iter()
                                .map(|v| self.apply_generator(g as usize, v))
                                .collect(),
                            // (m · Sq^g) · y
                            Side::Right => (0..n)
                                .map(|i| {
                                    let mut out = F2Vector::zeros(n);
                                    for m in self.actions[g as usize][i].iter_ones() {
                                        out.add_assign(&lower[m]);
                                    }
                                    out
                                })
                                .collect(),
                        }
                    }
                };
                by_k.push(images);
            }
            table.push(by_k);
        }
        ActionTable { alg, table }
    }

    /// `α · v` (left) or `v · α` (right) for `α ∈ A(n)`.
    pub fn act(&self, alpha: &SteenrodElement, v: &F2Vector) -> Result<F2Vector, ModuleError> {
        self.action_table().act(alpha, v)
    }

    /// Checks that the generator actions respect every relation of `A(n)`
    /// that can act nontrivially on this module.
    ///
    /// For each degree `d` up to the module's degree span, every word in the
    /// generators of degree `d` is evaluated both in `A(n)` and on each basis
    /// element; the module is valid iff every linear dependency among the
    /// algebra values also holds among the module values.
    pub fn check_relations(&self) -> Result<(), ModuleError> {
        let (Some(lo), Some(hi)) = (self.min_degree(), self.max_degree()) else {
            return Ok(());
        };
        let alg = FiniteSubalgebra::get(self.level);
        let n = self.basis.len();
        for d in 1..=(hi - lo).min(alg.top_degree()) {
            let words = generator_words(self.level, d);
            let dim = alg.dimension(d);
            for (i, b) in self.basis.iter().enumerate() {
                if b.degree + d > hi {
                    continue;
                }
                let mut with_action = Subspace::new(dim + n);
                let mut algebra_only = Subspace::new(dim);
                for w in &words {
                    let mut elt = SteenrodElement::unit();
                    for &g in w {
                        elt = product(&elt, &SteenrodElement::sq(1 << g));
                    }
                    let coords = alg.coordinates(&elt).expect("generator words lie in A(n)");
                    let mut img = F2Vector::unit(n, i);
                    let order: Box<dyn Iterator<Item = &u32>> = match self.side {
                        Side::Left => Box::new(w.iter().rev()),
                        Side::Right => Box::new(w.iter()),
                    };
                    for &g in order {
                        img = self.apply_generator(g as usize, &img);
                    }
                    with_action.add(&coords.concat(&img));
                    algebra_only.add(&coords);
                }
                if with_action.dim() != algebra_only.dim() {
                    return Err(ModuleError::RelationViolated {
                        algebra: self.algebra(),
                        degree: d,
                        element: b.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The same underlying space with the other side's action, via `χ`.
    pub fn opposite(&self) -> FPModule {
        let table = self.action_table();
        let mut out = self.clone();
        out.side = match self.side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
        let n = self.basis.len();
        for g in 0..=self.level {
            let chi = conjugate(&SteenrodElement::sq(1 << g));
            out.actions[g as usize] = (0..n)
                .map(|i| {
                    table
                        .act(&chi, &F2Vector::unit(n, i))
                        .expect("χ preserves A(n)")
                })
                .collect();
        }
        out
    }

    /// Adjoins a unit class `1` in degree 0 with trivial action.
    pub fn with_unit(&self) -> Result<FPModule, ModuleError> {
        let mut out = FPModule::new(self.algebra(), self.side)?;
        out.add_basis("1", 0)?;
        for b in &self.basis {
            out.add_basis(&b.name, b.degree)?;
        }
        for (g, table) in self.actions.iter().enumerate() {
            for (i, v) in table.iter().enumerate() {
                out.actions[g][i + 1] = F2Vector::zeros(1).concat(v);
            }
        }
        out.truncation = self.truncation;
        out.flags = self.flags.clone();
        Ok(out)
    }

    /// The submodule spanned by basis elements with the given indices, which
    /// must be closed under the action.
    fn restrict(&self, keep: &[usize]) -> Result<FPModule, ModuleError> {
        let mut out = FPModule::new(self.algebra(), self.side)?;
        let mut position = BTreeMap::new();
        for (new, &old) in keep.iter().enumerate() {
            out.add_basis(&self.basis[old].name, self.basis[old].degree)?;
            position.insert(old, new);
        }
        for g in 0..=self.level as usize {
            for (new, &old) in keep.iter().enumerate() {
                let mut v = F2Vector::zeros(keep.len());
                for j in self.actions[g][old].iter_ones() {
                    let &p = position.get(&j).ok_or_else(|| {
                        ModuleError::NotSplit(format!(
                            "Sq{} {} leaves the submodule",
                            1 << g,
                            self.basis[old].name
                        ))
                    })?;
                    v.flip(p);
                }
                out.actions[g][new] = v;
            }
        }
        out.truncation = self.truncation;
        out.flags = self
            .flags
            .iter()
            .filter(|f| out.index_of(&f.source).is_some())
            .cloned()
            .collect();
        Ok(out)
    }

    /// Reads the TOML presentation.
    pub fn from_toml(text: &str) -> Result<FPModule, ModuleError> {
        let file: ModuleFile =
            toml::from_str(text).map_err(|e| ModuleError::Format(e.to_string()))?;
        file.build()
    }

    /// Reads the JSON presentation.
    pub fn from_json(text: &str) -> Result<FPModule, ModuleError> {
        let file: ModuleFile =
            serde_json::from_str(text).map_err(|e| ModuleError::Format(e.to_string()))?;
        file.build()
    }

    pub fn to_file(&self) -> ModuleFile {
        let mut actions = Vec::new();
        for (g, table) in self.actions.iter().enumerate() {
            for (i, v) in table.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                actions.push(ActionEntry {
                    op: 1 << g,
                    source: self.basis[i].name.clone(),
                    target: v.iter_ones().map(|j| self.basis[j].name.clone()).collect(),
                    provenance: None,
                });
            }
        }
        ModuleFile {
            algebra: self.algebra(),
            side: self.side,
            truncation: self.truncation,
            basis: self.basis.clone(),
            actions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("module serializes")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("module serializes")
    }
}

/// All sequences of generator indices `g` (for `Sq^{2^g}`, `g <= level`)
/// whose degrees sum to `d`.
fn generator_words(level: u32, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(level: u32, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for g in 0..=level {
            let deg = 1u32 << g;
            if deg > remaining {
                break;
            }
            current.push(g);
            go(level, remaining - deg, current, out);
            current.pop();
        }
    }
    go(level, d, &mut current, &mut out);
    out
}

/// The full action of `A(n)` on a module, indexed by algebra basis element.
#[derive(Debug, Clone)]
pub struct ActionTable {
    alg: Arc<FiniteSubalgebra>,
    /// `table[d][k][i]`: `b_{d,k}` acting on module basis element `i`.
    table: Vec<Vec<Vec<F2Vector>>>,
}

impl ActionTable {
    pub fn algebra(&self) -> &FiniteSubalgebra {
        &self.alg
    }

    pub fn basis_action(&self, degree: u32, k: usize, i: usize) -> &F2Vector {
        &self.table[degree as usize][k][i]
    }

    pub fn act(&self, alpha: &SteenrodElement, v: &F2Vector) -> Result<F2Vector, ModuleError> {
        let n = v.len();
        if alpha.is_zero() {
            return Ok(F2Vector::zeros(n));
        }
        let coords = self
            .alg
            .coordinates(alpha)
            .ok_or_else(|| ModuleError::NotInAlgebra(alpha.to_string()))?;
        let d = alpha.degree() as usize;
        let mut out = F2Vector::zeros(n);
        for k in coords.iter_ones() {
            for i in v.iter_ones() {
                out.add_assign(&self.table[d][k][i]);
            }
        }
        Ok(out)
    }
}

/// Which side of the module the algebra acts on in a tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `α(b ⊗ c) = Σ α′b ⊗ α″c` on two left modules.
    Left,
    /// `(b ⊗ c)·α = Σ b·α′ ⊗ χ(α″)c` for a right module `b` and a left module `c`.
    Right,
}

/// `b ⊗ c` with the given convention, basis ordered by `(i, j)`.
pub fn tensor_module(
    b: &FPModule,
    c: &FPModule,
    convention: Convention,
) -> Result<FPModule, ModuleError> {
    if b.level != c.level {
        return Err(ModuleError::AlgebraMismatch(b.algebra(), c.algebra()));
    }
    if c.side != Side::Left {
        return Err(ModuleError::WrongSide {
            expected: Side::Left,
            found: c.side,
        });
    }
    let (b_side, out_side) = match convention {
        Convention::Left => (Side::Left, Side::Left),
        Convention::Right => (Side::Right, Side::Right),
    };
    if b.side != b_side {
        return Err(ModuleError::WrongSide {
            expected: b_side,
            found: b.side,
        });
    }
    let joint = match (b.truncation, c.truncation) {
        (None, None) => None,
        (tb, tc) => {
            let via_b = tb.map(|t| t + c.min_degree().unwrap_or(0));
            let via_c = tc.map(|t| t + b.min_degree().unwrap_or(0));
            via_b.into_iter().chain(via_c).min()
        }
    };
    let tb = b.action_table();
    let tc = c.action_table();
    let mut out = FPModule::new(b.algebra(), out_side)?;
    let mut pairs = Vec::new();
    for (i, x) in b.basis.iter().enumerate() {
        for (j, y) in c.basis.iter().enumerate() {
            let degree = x.degree + y.degree;
            if joint.is_some_and(|t| degree > t) {
                continue;
            }
            out.add_basis(&format!("{}⊗{}", x.name, y.name), degree)?;
            pairs.push((i, j));
        }
    }
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let (nb, nc) = (b.len(), c.len());
    let factor_flagged = |i: usize, j: usize| {
        b.flags.iter().any(|f| f.source == b.basis[i].name)
            || c.flags.iter().any(|f| f.source == c.basis[j].name)
    };
    for g in 0..=b.level {
        let k = 1u32 << g;
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let mut v = F2Vector::zeros(pairs.len());
            let mut overflow = false;
            for a in 0..=k {
                let left = tb.act(&SteenrodElement::sq(a), &F2Vector::unit(nb, i))?;
                let right_op = match convention {
                    Convention::Left => SteenrodElement::sq(k - a),
                    Convention::Right => conjugate(&SteenrodElement::sq(k - a)),
                };
                let right = tc.act(&right_op, &F2Vector::unit(nc, j))?;
                for x in left.iter_ones() {
                    for y in right.iter_ones() {
                        match index.get(&(x, y)) {
                            Some(&q) => v.flip(q),
                            None => overflow = true,
                        }
                    }
                }
            }
            out.actions[g as usize][p] = v;
            if overflow || factor_flagged(i, j) {
                out.flags.insert(TruncationFlag {
                    op: k,
                    source: out.basis[p].name.clone(),
                });
            }
        }
    }
    if let Some(t) = joint {
        out.truncation = Some(t);
        for p in 0..pairs.len() {
            for g in 0..=b.level {
                let op = 1u32 << g;
                if out.basis[p].degree + op > t {
                    out.flags.insert(TruncationFlag {
                        op,
                        source: out.basis[p].name.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Splits `F₂ ⊕ M^{>0}` off a module with a single degree-0 class on which
/// every generator acts trivially.
pub fn unit_plus_positive_split(m: &FPModule) -> Result<(FPModule, FPModule), ModuleError> {
    let units = m.indices_in_degree(0);
    let &[u] = units.as_slice() else {
        return Err(ModuleError::NotSplit(format!(
            "expected one degree-0 class, found {}",
            units.len()
        )));
    };
    for g in 0..=m.level {
        if !m.actions[g as usize][u].is_zero() {
            return Err(ModuleError::NotSplit(format!(
                "Sq{} acts nontrivially on {}",
                1 << g,
                m.basis[u].name
            )));
        }
    }
    let positive: Vec<usize> = (0..m.len()).filter(|&i| i != u).collect();
    Ok((m.restrict(&[u])?, m.restrict(&positive)?))
}

/// On-disk presentation: basis list plus sparse generator actions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub algebra: SubalgebraId,
    #[serde(default = "default_side")]
    pub side: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    pub basis: Vec<BasisElement>,
    #[serde(default, rename = "action")]
    pub actions: Vec<ActionEntry>,
}

fn default_side() -> Side {
    Side::Left
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub op: u32,
    pub source: String,
    #[serde(default)]
    pub target: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl ModuleFile {
    pub fn build(&self) -> Result<FPModule, ModuleError> {
        let mut m = FPModule::new(self.algebra, self.side)?;
        for b in &self.basis {
            m.add_basis(&b.name, b.degree)?;
        }
        for a in &self.actions {
            let targets: Vec<&str> = a.target.iter().map(String::as_str).collect();
            m.set_action(a.op, &a.source, &targets)?;
        }
        if let Some(t) = self.truncation {
            m.set_truncation(t);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> SubalgebraId {
        SubalgebraId::Level(1)
    }

    /// `A(1)//A(0)`-like "question mark": x0, Sq1 x0 = x1, Sq2 x1 = x3.
    fn question_mark() -> FPModule {
        question_mark_at(0)
    }

    fn question_mark_at(base: u32) -> FPModule {
        let mut m = FPModule::new(a1(), Side::Left).unwrap();
        m.add_basis("x0", base).unwrap();
        m.add_basis("x1", base + 1).unwrap();
        m.add_basis("x3", base + 3).unwrap();
        m.set_action(1, "x0", &["x1"]).unwrap();
        m.set_action(2, "x1", &["x3"]).unwrap();
        m
    }

    #[test]
    fn relation_check_accepts_and_rejects() {
        question_mark().check_relations().unwrap();
        let mut bad = FPModule::new(a1(), Side::Left).unwrap();
        bad.add_basis("a", 0).unwrap();
        bad.add_basis("b", 1).unwrap();
        bad.add_basis("c", 2).unwrap();
        bad.set_action(1, "a", &["b"]).unwrap();
        bad.set_action(1, "b", &["c"]).unwrap();
        assert!(matches!(
            bad.check_relations(),
            Err(ModuleError::RelationViolated { degree: 2, .. })
        ));
    }

    #[test]
    fn composite_action() {
        let m = question_mark();
        let sq3: SteenrodElement = "Sq(3)".parse().unwrap();
        // Sq3 = Sq1 Sq2 kills x0; Sq2 Sq1 does not.
        assert!(m.act(&sq3, &F2Vector::unit(3, 0)).unwrap().is_zero());
        let sq21: SteenrodElement = "Sq(2,1)".parse().unwrap();
        assert_eq!(
            m.act(&sq21, &F2Vector::unit(3, 0)).unwrap(),
            F2Vector::unit(3, 2)
        );
    }

    #[test]
    fn degree_checks() {
        let mut m = question_mark();
        assert!(matches!(
            m.set_action(2, "x0", &["x1"]),
            Err(ModuleError::DegreeMismatch { .. })
        ));
        assert!(matches!(
            m.set_action(4, "x0", &[]),
            Err(ModuleError::NotAGenerator { op: 4, .. })
        ));
    }

    #[test]
    fn tensor_with_trivial_is_a_copy() {
        let m = question_mark();
        let t = tensor_module(&m, &FPModule::trivial(a1()).unwrap(), Convention::Left).unwrap();
        assert_eq!(t.len(), m.len());
        for op in [1, 2] {
            for i in 0..m.len() {
                assert_eq!(
                    t.generator_image(op, i).unwrap(),
                    m.generator_image(op, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn left_tensor_is_cartan() {
        let m = question_mark();
        let t = tensor_module(&m, &m, Convention::Left).unwrap();
        t.check_relations().unwrap();
        let src = t.index_of("x0⊗x0").unwrap();
        let img = t.generator_image(1, src).unwrap();
        let expected: BTreeSet<usize> = ["x1⊗x0", "x0⊗x1"]
            .iter()
            .map(|n| t.index_of(n).unwrap())
            .collect();
        assert_eq!(img.iter_ones().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn split_and_errors() {
        let m = question_mark_at(4);
        let (unit, pos) = unit_plus_positive_split(&m.with_unit().unwrap()).unwrap();
        assert_eq!(unit.len(), 1);
        assert_eq!(pos, m);
        assert!(unit_plus_positive_split(&m).is_err());
        let mut bad = FPModule::new(a1(), Side::Left).unwrap();
        bad.add_basis("1", 0).unwrap();
        bad.add_basis("y", 2).unwrap();
        bad.set_action(2, "1", &["y"]).unwrap();
        assert!(matches!(
            unit_plus_positive_split(&bad),
            Err(ModuleError::NotSplit(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let m = question_mark();
        assert_eq!(FPModule::from_toml(&m.to_toml()).unwrap(), m);
        assert_eq!(FPModule::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn generator_word_counts() {
        // compositions of 4 into parts 1, 2, 4
        assert_eq!(generator_words(2, 4).len(), 6);
        assert_eq!(generator_words(0, 5).len(), 1);
    }
}
