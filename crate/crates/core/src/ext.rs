//! Minimal free resolutions over `A(n)` and the Ext charts they determine.
//!
//! The resolution is built degree by degree: for each internal degree `t`
//! and each homological degree `s` in turn, new generators of `F_s` are added
//! for a complement of the image of the existing generators inside the kernel
//! of `∂_{s-1}`. New generators therefore never lie in the image of
//! decomposables, so the resolution is minimal and `Ext^{s,t}` is the number
//! of generators of `F_s` in degree `t`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartClass, ChartProduct, ExtChart, HOp, TRUNCATION_FLAG};
use crate::f2::{F2Matrix, F2Vector, Subspace};
use crate::module::{ActionTable, FPModule, ModuleError, Side};
use crate::steenrod::{FiniteSubalgebra, MAX_DEGREE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("the module is empty")]
    EmptyModule,
}

/// A minimal free resolution `... → F_1 → F_0 → M`, truncated at
/// `s <= max_s` and internal degree `t <= max_t`.
#[derive(Debug, Clone)]
pub struct Resolution {
    alg: Arc<FiniteSubalgebra>,
    module: FPModule,
    actions: ActionTable,
    max_s: u32,
    max_t: u32,
    /// Set when the requested bounds were clamped.
    partial: Option<String>,
    /// `gens[s]`: degrees of the generators of `F_s`, ascending.
    gens: Vec<Vec<u32>>,
    /// `images[s][i]`: `∂(g_i)` in `F_{s-1}` (or `M` for `s = 0`) in the
    /// layout of degree `gens[s][i]`.
    images: Vec<Vec<F2Vector>>,
}

/// Position of generator blocks inside a degree of a free module.
struct Layout {
    /// `(generator, offset, algebra degree)` for each generator of degree `<= t`.
    blocks: Vec<(usize, usize, u32)>,
    len: usize,
}

impl Resolution {
    pub fn algebra(&self) -> &FiniteSubalgebra {
        &self.alg
    }

    pub fn module(&self) -> &FPModule {
        &self.module
    }

    pub fn max_s(&self) -> u32 {
        self.max_s
    }

    pub fn max_t(&self) -> u32 {
        self.max_t
    }

    pub fn partial(&self) -> Option<&str> {
        self.partial.as_deref()
    }

    /// Degrees of the generators of `F_s`.
    pub fn generators(&self, s: u32) -> &[u32] {
        &self.gens[s as usize]
    }

    /// `dim Ext^{s,t}`.
    pub fn ext_dim(&self, s: u32, t: u32) -> usize {
        self.gens
            .get(s as usize)
            .map_or(0, |g| g.iter().filter(|&&d| d == t).count())
    }

    fn layout(&self, s: u32, t: u32) -> Layout {
        let mut blocks = Vec::new();
        let mut len = 0;
        for (i, &d) in self.gens[s as usize].iter().enumerate() {
            if d > t {
                break;
            }
            let e = t - d;
            let dim = self.alg.dimension(e);
            if dim > 0 {
                blocks.push((i, len, e));
                len += dim;
            }
        }
        Layout { blocks, len }
    }

    /// Dimension of `F_s` in degree `t`.
    pub fn free_dim(&self, s: u32, t: u32) -> usize {
        self.layout(s, t).len
    }

    /// Coordinates of the module in degree `t` (positions in `indices_in_degree`).
    fn module_dim(&self, t: u32) -> usize {
        self.module.indices_in_degree(t).len()
    }

    /// `b_{e,k} · ∂(g_i)` for a generator of `F_s`, in the layout of degree `t`.
    fn apply(&self, s: u32, i: usize, e: u32, k: usize, t: u32) -> F2Vector {
        let gi = self.gens[s as usize][i];
        let image = &self.images[s as usize][i];
        if s == 0 {
            let positions = self.module.indices_in_degree(t);
            let source = self.module.indices_in_degree(gi);
            let mut out = F2Vector::zeros(positions.len());
            for local in image.iter_ones() {
                let full = self.actions.basis_action(e, k, source[local]);
                for (p, &m) in positions.iter().enumerate() {
                    if full.get(m) {
                        out.flip(p);
                    }
                }
            }
            out
        } else {
            let lower = self.layout(s - 1, gi);
            let target = self.layout(s - 1, t);
            let offsets: BTreeMap<usize, usize> =
                target.blocks.iter().map(|&(j, off, _)| (j, off)).collect();
            let mut out = F2Vector::zeros(target.len);
            for &(j, off, e2) in &lower.blocks {
                for k2 in 0..self.alg.dimension(e2) {
                    if !image.get(off + k2) {
                        continue;
                    }
                    let prod = self.alg.multiply_basis(e, k, e2, k2);
                    if prod.is_empty() {
                        continue;
                    }
                    if let Some(&o) = offsets.get(&j) {
                        out.add_at(o, &prod);
                    }
                }
            }
            out
        }
    }

    /// The rows of `∂_s` in degree `t`, one per basis element of `F_{s,t}`.
    pub fn differential_rows(&self, s: u32, t: u32) -> Vec<F2Vector> {
        let layout = self.layout(s, t);
        let mut rows = Vec::with_capacity(layout.len);
        for &(i, _, e) in &layout.blocks {
            for k in 0..self.alg.dimension(e) {
                rows.push(self.apply(s, i, e, k, t));
            }
        }
        rows
    }

    fn target_dim(&self, s: u32, t: u32) -> usize {
        if s == 0 {
            self.module_dim(t)
        } else {
            self.layout(s - 1, t).len
        }
    }

    /// `∂_s` in degree `t` as a matrix acting on column vectors.
    pub fn differential_matrix(&self, s: u32, t: u32) -> F2Matrix {
        let rows = self.differential_rows(s, t);
        F2Matrix::from_rows(rows, self.target_dim(s, t)).transpose()
    }

    /// `∂(g)` for generator `i` of `F_s`.
    pub fn generator_image(&self, s: u32, i: usize) -> &F2Vector {
        &self.images[s as usize][i]
    }

    /// Coefficient of `Sq^{2^g} x` in `∂(y)` for `x` a generator of `F_s`
    /// and `y` a generator of `F_{s+1}`; this is the `h_g`-product matrix.
    pub fn product_coefficient(&self, g: u32, s: u32, x: usize, y: usize) -> bool {
        let ty = self.gens[(s + 1) as usize][y];
        let tx = self.gens[s as usize][x];
        if tx + (1 << g) != ty {
            return false;
        }
        let layout = self.layout(s, ty);
        let image = &self.images[(s + 1) as usize][y];
        let Some(&(_, off, e)) = layout.blocks.iter().find(|b| b.0 == x) else {
            return false;
        };
        debug_assert_eq!(e, 1 << g);
        let mut c = false;
        for k in 0..self.alg.dimension(e) {
            if image.get(off + k) && self.alg.indecomposable_coefficient(g, k) {
                c = !c;
            }
        }
        c
    }
}

/// Resolves a left module over `A(n)` through `s <= max_s`, `t <= max_t`.
pub fn minimal_resolution(
    module: &FPModule,
    max_s: u32,
    max_t: u32,
) -> Result<Resolution, ResolveError> {
    if module.is_empty() {
        return Err(ResolveError::EmptyModule);
    }
    let module = match module.side() {
        Side::Left => module.clone(),
        Side::Right => module.opposite(),
    };
    let mut partial = None;
    let mut max_t = max_t;
    if max_t > MAX_DEGREE {
        partial = Some(format!(
            "internal degree clamped from {max_t} to {MAX_DEGREE}"
        ));
        max_t = MAX_DEGREE;
    }
    let alg = FiniteSubalgebra::get(module.level());
    let actions = module.action_table();
    let mut r = Resolution {
        alg,
        module,
        actions,
        max_s,
        max_t,
        partial,
        gens: vec![Vec::new(); max_s as usize + 1],
        images: vec![Vec::new(); max_s as usize + 1],
    };
    let t0 = r.module.min_degree().expect("nonempty");
    for t in t0..=max_t {
        for s in 0..=max_s {
            extend(&mut r, s, t);
        }
    }
    Ok(r)
}

/// Adds the generators of `F_s` in degree `t`.
fn extend(r: &mut Resolution, s: u32, t: u32) {
    let existing = r.differential_rows(s, t);
    let target_dim = r.target_dim(s, t);
    let mut image = Subspace::new(target_dim);
    for row in &existing {
        image.add(row);
    }
    let candidates: Vec<F2Vector> = if s == 0 {
        (0..target_dim)
            .map(|j| F2Vector::unit(target_dim, j))
            .collect()
    } else {
        let rows = r.differential_rows(s - 1, t);
        let lower_target = r.target_dim(s - 1, t);
        F2Matrix::from_rows(rows, lower_target)
            .transpose()
            .kernel_basis()
    };
    for v in candidates {
        if image.add(&v) {
            r.gens[s as usize].push(t);
            r.images[s as usize].push(v);
        }
    }
}

/// How resolution generators are named in charts.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Naming {
    #[serde(default, rename = "alias")]
    pub aliases: Vec<Alias>,
    /// Prefix of automatic names; `x` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

/// Attaches a name to the `index`-th generator at a bidegree of one chart.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Alias {
    pub chart: String,
    pub stem: u32,
    pub s: u32,
    #[serde(default)]
    pub index: usize,
    pub name: String,
}

const ALIASES_TOML: &str = include_str!("../data/aliases.toml");

impl Naming {
    /// The bundled aliases for one chart id.
    pub fn bundled(chart: &str) -> Naming {
        let all: Naming = toml::from_str(ALIASES_TOML).expect("bundled aliases parse");
        all.for_chart(chart)
    }

    pub fn from_toml(text: &str) -> Result<Naming, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn for_chart(&self, chart: &str) -> Naming {
        Naming {
            aliases: self
                .aliases
                .iter()
                .filter(|a| a.chart == chart)
                .cloned()
                .collect(),
            prefix: self.prefix.clone(),
        }
    }

    pub fn with_prefix(mut self, prefix: &str) -> Naming {
        self.prefix = Some(prefix.to_string());
        self
    }

    fn lookup(&self, stem: u32, s: u32, index: usize) -> Option<&str> {
        self.aliases
            .iter()
            .find(|a| a.stem == stem && a.s == s && a.index == index)
            .map(|a| a.name.as_str())
    }
}

/// The chart of a resolution in stems `<= max_stem`.
///
/// Generators of `F_0` that hit a single module basis element take its name;
/// the rest are named `x{stem}_{s}` with a letter suffix when a bidegree has
/// several classes, unless an alias applies. Classes in stems at or above a
/// module's truncation degree carry the truncation flag.
pub fn ext_chart(r: &Resolution, max_stem: u32, naming: &Naming) -> ExtChart {
    let truncation = r.module.truncation();
    let prefix = naming.prefix.as_deref().unwrap_or("x");
    let mut classes = Vec::new();
    // (s, generator) -> class index
    let mut index: BTreeMap<(u32, usize), usize> = BTreeMap::new();
    for s in 0..=r.max_s {
        let mut per_t: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &t) in r.gens[s as usize].iter().enumerate() {
            if t >= s && t - s <= max_stem {
                per_t.entry(t).or_default().push(i);
            }
        }
        for (t, ids) in per_t {
            let stem = t - s;
            for (pos, &i) in ids.iter().enumerate() {
                let name = naming
                    .lookup(stem, s, pos)
                    .map(str::to_string)
                    .or_else(|| (s == 0).then(|| module_name(r, i)).flatten())
                    .unwrap_or_else(|| {
                        if ids.len() == 1 {
                            format!("{prefix}{stem}_{s}")
                        } else {
                            format!("{prefix}{stem}_{s}{}", (b'a' + pos as u8) as char)
                        }
                    });
                let mut flags = Vec::new();
                if truncation.is_some_and(|tr| stem >= tr) {
                    flags.push(TRUNCATION_FLAG.to_string());
                }
                index.insert((s, i), classes.len());
                classes.push(ChartClass {
                    name,
                    s,
                    t,
                    flags,
                    citation: None,
                });
            }
        }
    }
    let mut products = Vec::new();
    for s in 0..r.max_s {
        for (x, &tx) in r.gens[s as usize].iter().enumerate() {
            let Some(&from) = index.get(&(s, x)) else {
                continue;
            };
            for g in 0..=r.alg.level().min(2) {
                for (y, &ty) in r.gens[(s + 1) as usize].iter().enumerate() {
                    if ty != tx + (1 << g) {
                        continue;
                    }
                    let Some(&to) = index.get(&(s + 1, y)) else {
                        continue;
                    };
                    if r.product_coefficient(g, s, x, y) {
                        products.push(ChartProduct {
                            op: HOp::from_index(g),
                            from: classes[from].name.clone(),
                            to: classes[to].name.clone(),
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
        ..ExtChart::default()
    };
    chart.window = Some(crate::chart::Window {
        max_stem,
        max_s: r.max_s,
    });
    chart.canonicalize();
    chart
}

fn module_name(r: &Resolution, i: usize) -> Option<String> {
    let image = &r.images[0][i];
    let t = r.gens[0][i];
    let positions = r.module.indices_in_degree(t);
    let mut ones = image.iter_ones();
    let first = ones.next()?;
    if ones.next().is_some() {
        return None;
    }
    Some(r.module.basis()[positions[first]].name.clone())
}

/// Highest stem of the MPL⟨8⟩ chart; above it the bookkeeping stops.
pub const MPL8_MAX_STEM: u32 = 11;

/// The chart of `Ext_{A(2)}(C*(PL))` in stems `<= max_stem <= 11`, as the
/// direct sum of `Ext(F₂)` and `Ext(C^{≥8}(PL))` through the unit split.
///
/// Classes of the `Ext(F₂)` summand carry the MO⟨8⟩ image tag; the whole
/// stem-11 column carries the truncation flag.
pub fn mpl8_chart(max_s: u32, max_stem: u32) -> Result<ExtChart, crate::cpl::CplError> {
    assert!(
        max_stem <= MPL8_MAX_STEM,
        "MPL<8> chart is only defined through stem {MPL8_MAX_STEM}"
    );
    let with_unit = crate::cpl::cpl_module_with_unit()?;
    let (unit, positive) = crate::module::unit_plus_positive_split(&with_unit)?;
    let resolve = |m: &FPModule| {
        let top = m.max_degree().unwrap_or(0);
        minimal_resolution(m, max_s, max_stem + max_s + top.min(max_stem)).map_err(|e| match e {
            ResolveError::Module(m) => crate::cpl::CplError::Module(m),
            ResolveError::EmptyModule => unreachable!("split parts are nonempty"),
        })
    };
    let mut base = ext_chart(&resolve(&unit)?, max_stem, &Naming::bundled("F2@A2"));
    for c in &mut base.classes {
        c.flags.push(crate::chart::MO8_IMAGE_TAG.to_string());
    }
    let top = ext_chart(
        &resolve(&positive)?,
        max_stem,
        &Naming::bundled("cpl").with_prefix("y"),
    );
    let mut chart = base.direct_sum(&top).expect("summand names are disjoint");
    if max_stem == MPL8_MAX_STEM {
        chart.flag_stem(MPL8_MAX_STEM, TRUNCATION_FLAG);
    }
    chart.window = Some(crate::chart::Window { max_stem, max_s });
    Ok(chart)
}
