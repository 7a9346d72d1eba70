//! Dense bit-packed linear algebra over the two-element field.
//!
//! Every computation downstream (algebra coordinates, resolution kernels,
//! spectral-sequence pages) reduces to row reduction here. Pivoting always
//! takes the lowest available column first so that basis choices are
//! reproducible bit for bit.

use std::fmt;
use std::str::FromStr;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over F₂, packed into machine words.
///
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    words: Vec<u64>,
    len: usize,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// The standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn sum(&self, other: &F2Vector) -> F2Vector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + tz)
                }
            })
        })
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// The sub-vector of bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> F2Vector {
        assert!(start <= end && end <= self.len);
        let mut out = F2Vector::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    /// Adds `other` into the bits starting at `offset`.
    pub fn add_at(&mut self, offset: usize, other: &F2Vector) {
        assert!(offset + other.len <= self.len);
        if offset.is_multiple_of(WORD) {
            let base = offset / WORD;
            for (k, w) in other.words.iter().enumerate() {
                self.words[base + k] ^= w;
            }
        } else {
            for i in other.iter_ones() {
                self.flip(offset + i);
            }
        }
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({self})")
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid bit string character {0:?}")]
pub struct ParseBitsError(char);

impl FromStr for F2Vector {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitsError(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(F2Vector::from_bools(&bits))
    }
}

/// A dense matrix over F₂ stored as packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: Vec<F2Vector>,
    cols: usize,
}

/// Result of [`F2Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: F2Matrix,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows: vec![F2Vector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix {
            rows: (0..n).map(|i| F2Vector::unit(n, i)).collect(),
            cols: n,
        }
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<F2Vector>, cols: usize) -> Self {
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has length {} != {cols}", r.len());
        }
        F2Matrix { rows, cols }
    }

    /// Parses rows written as bit strings, e.g. `["110", "011"]`.
    pub fn from_bit_rows(rows: &[&str]) -> Self {
        let rows: Vec<F2Vector> = rows.iter().map(|r| r.parse().expect("bit row")).collect();
        let cols = rows.first().map_or(0, F2Vector::len);
        Self::from_rows(rows, cols)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols)
    }

    pub fn rows(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn push_row(&mut self, row: F2Vector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// `self · x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &F2Vector) -> F2Vector {
        assert_eq!(x.len(), self.cols, "dimension mismatch in mul_vec");
        let mut out = F2Vector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// Row vector times matrix: `y · self` for `y` of length `rows`.
    pub fn left_mul_vec(&self, y: &F2Vector) -> F2Vector {
        assert_eq!(
            y.len(),
            self.rows.len(),
            "dimension mismatch in left_mul_vec"
        );
        let mut out = F2Vector::zeros(self.cols);
        for i in y.iter_ones() {
            out.add_assign(&self.rows[i]);
        }
        out
    }

    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows.len(), "dimension mismatch in mul");
        F2Matrix {
            rows: self.rows.iter().map(|r| other.left_mul_vec(r)).collect(),
            cols: other.cols,
        }
    }

    /// Reduced row-echelon form with lowest-column-first pivoting.
    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.add_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        Rref {
            rank: pivots.len(),
            pivots,
            reduced: F2Matrix {
                rows,
                cols: self.cols,
            },
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// A basis of `{ v : self · v = 0 }`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<F2Vector> {
        let Rref {
            pivots, reduced, ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = F2Vector::unit(self.cols, free);
                for (i, &p) in pivots.iter().enumerate() {
                    if reduced.rows[i].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self · x = b`, or `None` when `b` is outside the column span.
    pub fn solve(&self, b: &F2Vector) -> Option<F2Vector> {
        assert_eq!(b.len(), self.rows.len(), "right-hand side length mismatch");
        let augmented = F2Matrix {
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.concat(&F2Vector::from_bools(&[b.get(i)])))
                .collect(),
            cols: self.cols + 1,
        };
        let Rref {
            pivots, reduced, ..
        } = augmented.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = F2Vector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            if reduced.rows[i].get(self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// An incrementally built subspace of `F₂^n`, kept in reduced echelon form.
///
/// Optionally tracks, for each echelon row, which of the originally inserted
/// vectors it is a combination of; this is what lets callers express a vector
/// in terms of a non-reduced basis they chose themselves.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<F2Vector>,
    pivots: Vec<usize>,
    origins: Vec<F2Vector>,
    inserted: usize,
    track: bool,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            origins: Vec::new(),
            inserted: 0,
            track: false,
        }
    }

    /// A subspace that remembers the inserted vectors each echelon row came from.
    pub fn tracking(ambient: usize) -> Self {
        Subspace {
            track: true,
            ..Self::new(ambient)
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the echelon rows, returning the combination used
    /// (as a vector over inserted vectors) when tracking is enabled.
    fn reduce_tracked(&self, v: &mut F2Vector) -> F2Vector {
        let mut used = F2Vector::zeros(self.inserted);
        for k in 0..self.rows.len() {
            if v.get(self.pivots[k]) {
                v.add_assign(&self.rows[k]);
                let mut o = self.origins[k].clone();
                grow(&mut o, self.inserted);
                used.add_assign(&o);
            }
        }
        used
    }

    /// Reduces `v` in place to its canonical representative modulo the subspace.
    pub fn reduce(&self, v: &mut F2Vector) {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.add_assign(row);
            }
        }
    }

    pub fn reduced(&self, v: &F2Vector) -> F2Vector {
        let mut out = v.clone();
        self.reduce(&mut out);
        out
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduced(v).is_zero()
    }

    /// Inserts `v`; returns `true` if it enlarged the subspace.
    pub fn add(&mut self, v: &F2Vector) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut w = v.clone();
        let index = self.inserted;
        self.inserted += 1;
        let mut origin = if self.track {
            let mut used = self.reduce_tracked(&mut w);
            grow(&mut used, self.inserted);
            used.flip(index);
            used
        } else {
            self.reduce(&mut w);
            F2Vector::zeros(0)
        };
        let Some(p) = w.first_one() else {
            return false;
        };
        // Clear the new pivot from existing rows to stay fully reduced.
        for (k, row) in self.rows.iter_mut().enumerate() {
            if row.get(p) {
                row.add_assign(&w);
                if self.track {
                    grow(&mut self.origins[k], self.inserted);
                    grow(&mut origin, self.inserted);
                    self.origins[k].add_assign(&origin);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        if self.track {
            self.origins.insert(at, origin);
        }
        true
    }

    /// Writes `v` as a combination of the inserted vectors, if `v` lies in the span.
    ///
    /// Only meaningful on a tracking subspace; the result has one bit per
    /// insertion (including insertions that did not enlarge the span).
    pub fn express(&self, v: &F2Vector) -> Option<F2Vector> {
        assert!(self.track, "express requires a tracking subspace");
        let mut w = v.clone();
        let mut used = self.reduce_tracked(&mut w);
        grow(&mut used, self.inserted);
        w.is_zero().then_some(used)
    }

    /// Coordinates of `v` with respect to the echelon basis (one bit per row).
    pub fn coordinates(&self, v: &F2Vector) -> Option<F2Vector> {
        let mut coords = F2Vector::zeros(self.rows.len());
        let mut w = v.clone();
        for (k, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if w.get(p) {
                w.add_assign(row);
                coords.set(k, true);
            }
        }
        w.is_zero().then_some(coords)
    }
}

fn grow(v: &mut F2Vector, len: usize) {
    if v.len() < len {
        let mut out = F2Vector::zeros(len);
        for i in v.iter_ones() {
            out.set(i, true);
        }
        *v = out;
    }
}
