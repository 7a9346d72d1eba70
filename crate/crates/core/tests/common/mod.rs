//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod milnor;
pub mod properties;

use std::collections::HashMap;

use plcob::f2::{F2Matrix, F2Vector, Subspace};
use plcob::module::FPModule;
use plcob::steenrod::{admissible_monomials, product, AdmissibleMonomial, SteenrodElement};

/// `A(n)` built by closure: every basis element is a word in the generators
/// `Sq^1, …, Sq^{2^n}`, found by left-multiplying lower basis elements by a
/// generator until the span stops growing.
pub struct ClosureAlgebra {
    pub generators: Vec<u32>,
    /// `words[d]`: generator words of the basis in degree `d`.
    pub words: Vec<Vec<Vec<u32>>>,
    elements: Vec<Vec<SteenrodElement>>,
    monomials: Vec<Vec<AdmissibleMonomial>>,
    spans: Vec<Subspace>,
}

impl ClosureAlgebra {
    pub fn new(n: u32) -> Self {
        let generators: Vec<u32> = (0..=n).map(|i| 1 << i).collect();
        let mut words = vec![vec![Vec::new()]];
        let mut elements = vec![vec![SteenrodElement::unit()]];
        let mut monomials = vec![admissible_monomials(0)];
        let mut spans = Vec::new();
        let mut unit = Subspace::tracking(1);
        unit.add(&F2Vector::unit(1, 0));
        spans.push(unit);
        for d in 1.. {
            let basis = admissible_monomials(d);
            let mut span = Subspace::new(basis.len());
            let mut w_d = Vec::new();
            let mut e_d = Vec::new();
            for &g in &generators {
                if g > d {
                    continue;
                }
                for (w, e) in words[(d - g) as usize]
                    .iter()
                    .zip(&elements[(d - g) as usize])
                {
                    let x = product(&SteenrodElement::sq(g), e);
                    if !x.is_zero() && span.add(&x.to_coordinates(&basis)) {
                        let mut word = vec![g];
                        word.extend_from_slice(w);
                        w_d.push(word);
                        e_d.push(x);
                    }
                }
            }
            if w_d.is_empty() {
                break;
            }
            let mut tracked = Subspace::tracking(basis.len());
            for e in &e_d {
                tracked.add(&e.to_coordinates(&basis));
            }
            words.push(w_d);
            elements.push(e_d);
            monomials.push(basis);
            spans.push(tracked);
        }
        ClosureAlgebra {
            generators,
            words,
            elements,
            monomials,
            spans,
        }
    }

    pub fn top_degree(&self) -> u32 {
        self.words.len() as u32 - 1
    }

    pub fn dim(&self, d: u32) -> usize {
        self.words.get(d as usize).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    /// Coordinates of `b_i · b_j` (degrees `di`, `dj`) in the closure basis.
    pub fn multiply(&self, di: u32, i: usize, dj: u32, j: usize) -> F2Vector {
        let d = di + dj;
        if d > self.top_degree() {
            return F2Vector::zeros(0);
        }
        let x = product(
            &self.elements[di as usize][i],
            &self.elements[dj as usize][j],
        );
        let v = x.to_coordinates(&self.monomials[d as usize]);
        self.spans[d as usize]
            .express(&v)
            .expect("closed under products")
    }

    /// `b · v` for a left module, applying the word's letters right to left.
    pub fn act(&self, module: &FPModule, d: u32, i: usize, v: &F2Vector) -> F2Vector {
        let mut out = v.clone();
        for &g in self.words[d as usize][i].iter().rev() {
            let mut next = F2Vector::zeros(module.len());
            for k in out.iter_ones() {
                next.add_assign(module.generator_image(g, k).expect("generator"));
            }
            out = next;
        }
        out
    }
}

/// A basis tensor `b_1 | … | b_s | m` of the normalized bar complex.
type Cell = (Vec<(u32, usize)>, usize);

/// `(degree, index)` of a closure basis element.
type Basic = (u32, usize);

/// Ext dimensions over `A(n)` from the normalized bar complex
/// `C_s = Ā^{⊗s} ⊗ M` with
/// `d(b_1|…|b_s|m) = Σ b_1|…|b_i b_{i+1}|…|m + b_1|…|b_{s-1}|b_s m`.
pub struct BarOracle<'a> {
    alg: &'a ClosureAlgebra,
    module: &'a FPModule,
    products: HashMap<(Basic, Basic), Vec<Basic>>,
}

impl<'a> BarOracle<'a> {
    pub fn new(alg: &'a ClosureAlgebra, module: &'a FPModule) -> Self {
        BarOracle {
            alg,
            module,
            products: HashMap::new(),
        }
    }

    /// Basis of `C_{s,t}` in a fixed order.
    fn cells(&self, s: u32, t: u32) -> Vec<Cell> {
        let mut out = Vec::new();
        for m in 0..self.module.len() {
            let dm = self.module.degree_of(m);
            if dm > t {
                continue;
            }
            let mut prefix = Vec::new();
            self.fill(s, t - dm, &mut prefix, m, &mut out);
        }
        out
    }

    fn fill(
        &self,
        left: u32,
        budget: u32,
        prefix: &mut Vec<(u32, usize)>,
        m: usize,
        out: &mut Vec<Cell>,
    ) {
        if left == 0 {
            if budget == 0 {
                out.push((prefix.clone(), m));
            }
            return;
        }
        // Each remaining factor has degree at least 1.
        if budget < left {
            return;
        }
        for d in 1..=(budget - (left - 1)).min(self.alg.top_degree()) {
            for i in 0..self.alg.dim(d) {
                prefix.push((d, i));
                self.fill(left - 1, budget - d, prefix, m, out);
                prefix.pop();
            }
        }
    }

    fn product(&mut self, a: Basic, b: Basic) -> Vec<Basic> {
        let alg = self.alg;
        self.products
            .entry((a, b))
            .or_insert_with(|| {
                let d = a.0 + b.0;
                alg.multiply(a.0, a.1, b.0, b.1)
                    .iter_ones()
                    .map(|k| (d, k))
                    .collect()
            })
            .clone()
    }

    /// Rank of `d: C_{s,t} → C_{s-1,t}`.
    fn rank(&mut self, s: u32, t: u32) -> usize {
        if s == 0 {
            return 0;
        }
        let source = self.cells(s, t);
        let target = self.cells(s - 1, t);
        if source.is_empty() || target.is_empty() {
            return 0;
        }
        let index: HashMap<&Cell, usize> = target.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut rows = Vec::with_capacity(source.len());
        for (bs, m) in &source {
            let mut row = F2Vector::zeros(target.len());
            for i in 0..bs.len() - 1 {
                for p in self.product(bs[i], bs[i + 1]) {
                    let mut merged = bs[..i].to_vec();
                    merged.push(p);
                    merged.extend_from_slice(&bs[i + 2..]);
                    row.flip(index[&(merged, *m)]);
                }
            }
            let (d, k) = *bs.last().expect("s >= 1");
            let image = self
                .alg
                .act(self.module, d, k, &F2Vector::unit(self.module.len(), *m));
            for m2 in image.iter_ones() {
                row.flip(index[&(bs[..bs.len() - 1].to_vec(), m2)]);
            }
            rows.push(row);
        }
        F2Matrix::from_rows(rows, target.len()).rank()
    }

    /// `dim Ext^{s,t} = dim C_{s,t} - rank d_{s,t} - rank d_{s+1,t}`.
    pub fn ext_dim(&mut self, s: u32, t: u32) -> usize {
        let c = self.cells(s, t).len();
        c - self.rank(s, t) - self.rank(s + 1, t)
    }
}
