//! Milnor-basis multiplication, used as an independent model of `𝒜`.

use std::collections::BTreeSet;

/// A sum of Milnor basis elements `Sq(r_1, r_2, …)`, trailing zeros trimmed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Milnor(pub BTreeSet<Vec<u32>>);

fn trim(mut r: Vec<u32>) -> Vec<u32> {
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

impl Milnor {
    pub fn one() -> Self {
        Milnor([Vec::new()].into_iter().collect())
    }

    pub fn sq(k: u32) -> Self {
        Milnor([trim(vec![k])].into_iter().collect())
    }

    pub fn toggle(&mut self, r: Vec<u32>) {
        let r = trim(r);
        if !self.0.remove(&r) {
            self.0.insert(r);
        }
    }

    pub fn add(&mut self, other: &Milnor) {
        for r in &other.0 {
            self.toggle(r.clone());
        }
    }

    pub fn mul(&self, other: &Milnor) -> Milnor {
        let mut out = Milnor::default();
        for r in &self.0 {
            for s in &other.0 {
                out.add(&basis_product(r, s));
            }
        }
        out
    }

    /// Product of `Sq^{i_1} ⋯ Sq^{i_k}`.
    pub fn word(word: &[u32]) -> Milnor {
        word.iter()
            .fold(Milnor::one(), |acc, &k| acc.mul(&Milnor::sq(k)))
    }
}

/// `Sq(r) · Sq(s)` by Milnor's matrix formula.
fn basis_product(r: &[u32], s: &[u32]) -> Milnor {
    let rows = r.len();
    let cols = s.len();
    // x[i][j] for 1 <= i <= rows, 1 <= j <= cols.
    let mut x = vec![vec![0u32; cols + 1]; rows + 1];
    let mut out = Milnor::default();
    fill(r, s, 1, 1, &mut x, &mut out);
    out
}

fn fill(r: &[u32], s: &[u32], i: usize, j: usize, x: &mut Vec<Vec<u32>>, out: &mut Milnor) {
    let (rows, cols) = (r.len(), s.len());
    if i > rows {
        finish(r, s, x, out);
        return;
    }
    if j > cols {
        fill(r, s, i + 1, 1, x, out);
        return;
    }
    let used_row: u32 = (1..j).map(|k| x[i][k] << k).sum();
    let used_col: u32 = (1..i).map(|k| x[k][j]).sum();
    let max_row = (r[i - 1] - used_row) >> j;
    let max_col = s[j - 1] - used_col;
    for v in 0..=max_row.min(max_col) {
        x[i][j] = v;
        fill(r, s, i, j + 1, x, out);
    }
    x[i][j] = 0;
}

fn finish(r: &[u32], s: &[u32], x: &[Vec<u32>], out: &mut Milnor) {
    let (rows, cols) = (r.len(), s.len());
    let at = |i: usize, j: usize| -> u32 {
        if i == 0 && j == 0 {
            0
        } else if j == 0 {
            r[i - 1] - (1..=cols).map(|k| x[i][k] << k).sum::<u32>()
        } else if i == 0 {
            s[j - 1] - (1..=rows).map(|k| x[k][j]).sum::<u32>()
        } else {
            x[i][j]
        }
    };
    let mut t = Vec::new();
    for n in 1..=rows + cols {
        let mut bits = 0u32;
        let mut total = 0u32;
        for i in 0..=n.min(rows) {
            let j = n - i;
            if j > cols {
                continue;
            }
            let v = at(i, j);
            // The multinomial coefficient is odd iff the summands' bits are disjoint.
            if bits & v != 0 {
                return;
            }
            bits |= v;
            total += v;
        }
        t.push(total);
    }
    out.toggle(t);
}
