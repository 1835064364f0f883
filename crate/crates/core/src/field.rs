//! Exact arithmetic over the prime field GF(2^31 - 1) and the linear-algebra
//! kernel used throughout the simulator: rank, elimination, solvability and
//! projection dimensions.
//!
//! Channel gains drawn "from a continuous distribution" are modelled as
//! uniform nonzero field elements. With q = 2^31 - 1 the probability that a
//! random matrix drops below generic rank is at most n/q per trial, so the
//! almost-sure statements of the analysis hold up to a negligible failure
//! probability while every computation stays exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// The fixed Mersenne-prime modulus.
pub const MODULUS: u32 = 0x7fff_ffff;

/// An element of GF(2^31 - 1), always kept in canonical form `0 <= v < q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf(u32);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    /// Reduce an arbitrary u64 into the field.
    #[inline]
    pub fn new(v: u64) -> Self {
        // Two Mersenne folds bring any u64 below 2^32, the final conditional
        // subtraction canonicalizes (the fold maps q itself to q, not 0).
        let m = MODULUS as u64;
        let mut x = (v >> 31) + (v & m);
        x = (x >> 31) + (x & m);
        if x >= m {
            x -= m;
        }
        Gf(x as u32)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Gf {
        let mut base = self;
        let mut acc = Gf::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; exists for every nonzero element.
    ///
    /// Panics on zero: callers pivot only on nonzero entries.
    pub fn inv(self) -> Gf {
        assert!(!self.is_zero(), "zero has no inverse");
        self.pow(MODULUS as u64 - 2)
    }
}

impl Add for Gf {
    type Output = Gf;
    #[inline]
    fn add(self, rhs: Gf) -> Gf {
        let mut s = self.0 + rhs.0;
        if s >= MODULUS {
            s -= MODULUS;
        }
        Gf(s)
    }
}

impl Sub for Gf {
    type Output = Gf;
    #[inline]
    fn sub(self, rhs: Gf) -> Gf {
        let s = self.0.wrapping_sub(rhs.0);
        if self.0 < rhs.0 {
            Gf(s.wrapping_add(MODULUS))
        } else {
            Gf(s)
        }
    }
}

impl Mul for Gf {
    type Output = Gf;
    #[inline]
    fn mul(self, rhs: Gf) -> Gf {
        Gf::new(self.0 as u64 * rhs.0 as u64)
    }
}

impl Neg for Gf {
    type Output = Gf;
    #[inline]
    fn neg(self) -> Gf {
        if self.0 == 0 {
            self
        } else {
            Gf(MODULUS - self.0)
        }
    }
}

impl AddAssign for Gf {
    #[inline]
    fn add_assign(&mut self, rhs: Gf) {
        *self = *self + rhs;
    }
}

impl SubAssign for Gf {
    #[inline]
    fn sub_assign(&mut self, rhs: Gf) {
        *self = *self - rhs;
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Gf {
    fn from(v: u32) -> Self {
        Gf::new(v as u64)
    }
}

/// A sparse row vector over the global unknowns: sorted `(column, coefficient)`
/// pairs, zero coefficients never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparseVec {
    entries: Vec<(u32, Gf)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(col: u32) -> Self {
        SparseVec { entries: vec![(col, Gf::ONE)] }
    }

    /// Build from arbitrary (column, coefficient) pairs; duplicates are summed
    /// and zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, Gf)>) -> Self {
        let mut v: Vec<(u32, Gf)> = pairs.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut entries: Vec<(u32, Gf)> = Vec::with_capacity(v.len());
        for (c, x) in v {
            match entries.last_mut() {
                Some(last) if last.0 == c => last.1 += x,
                _ => entries.push((c, x)),
            }
        }
        entries.retain(|e| !e.1.is_zero());
        SparseVec { entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest column with a nonzero coefficient.
    pub fn lead(&self) -> Option<u32> {
        self.entries.first().map(|e| e.0)
    }

    pub fn get(&self, col: u32) -> Gf {
        match self.entries.binary_search_by_key(&col, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => Gf::ZERO,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Gf)> + '_ {
        self.entries.iter().copied()
    }

    pub fn scaled(&self, k: Gf) -> SparseVec {
        if k.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self.entries.iter().map(|&(c, x)| (c, x * k)).collect(),
        }
    }

    /// `self + k * other`, merged in one pass.
    pub fn add_scaled(&self, other: &SparseVec, k: Gf) -> SparseVec {
        if k.is_zero() {
            return self.clone();
        }
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let a = self.entries.get(i);
            let b = other.entries.get(j);
            match (a, b) {
                (Some(&(ca, xa)), Some(&(cb, xb))) => {
                    if ca < cb {
                        entries.push((ca, xa));
                        i += 1;
                    } else if cb < ca {
                        entries.push((cb, xb * k));
                        j += 1;
                    } else {
                        let s = xa + xb * k;
                        if !s.is_zero() {
                            entries.push((ca, s));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                (Some(&(ca, xa)), None) => {
                    entries.push((ca, xa));
                    i += 1;
                }
                (None, Some(&(cb, xb))) => {
                    entries.push((cb, xb * k));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SparseVec { entries }
    }

    pub fn to_dense(&self, cols: usize) -> Vec<Gf> {
        let mut out = vec![Gf::ZERO; cols];
        for &(c, x) in &self.entries {
            out[c as usize] = x;
        }
        out
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (c, x)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", c, x)?;
        }
        write!(f, "}}")
    }
}

/// Dense row-major matrix over the field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Gf::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Gf::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Gf>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols));
        Matrix {
            rows: rows.len(),
            cols: ncols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_sparse_rows<'a>(rows: impl IntoIterator<Item = &'a SparseVec>, cols: usize) -> Self {
        let dense: Vec<Vec<Gf>> = rows.into_iter().map(|r| r.to_dense(cols)).collect();
        if dense.is_empty() {
            return Matrix::zeros(0, cols);
        }
        Matrix::from_rows(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Gf {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Gf) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Gf] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Column-wise concatenation `[self | other]`; row counts must match.
    pub fn hconcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hconcat needs equal row counts");
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.at(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.at(r, c));
            }
        }
        out
    }

    /// Row-space dimension via forward elimination with pivots taken in
    /// column order. Pure; the matrix is copied.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            // Find a pivot row at or below `rank`.
            let Some(piv) = (rank..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, piv);
            let inv = m.at(rank, col).inv();
            for r in rank + 1..m.rows {
                let f = m.at(r, col);
                if f.is_zero() {
                    continue;
                }
                let scale = f * inv;
                for c in col..m.cols {
                    let v = m.at(r, c) - scale * m.at(rank, c);
                    m.set(r, c, v);
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let (x, y) = (self.at(a, c), self.at(b, c));
            self.set(a, c, y);
            self.set(b, c, x);
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Dimension of the projection of `colspan(desired)` onto the orthogonal
/// complement of `colspan(interference)`, computed as
/// `rank([desired | interference]) - rank(interference)`.
pub fn projection_dimension(desired: &Matrix, interference: &Matrix) -> usize {
    assert_eq!(desired.rows(), interference.rows(), "row counts must match");
    desired.hconcat(interference).rank() - interference.rank()
}

/// How a resolved unknown is reconstructed: coefficients applied to store rows.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub combination: Vec<(usize, Gf)>,
}

/// Try to express each target unit vector as a combination of store rows.
///
/// Target `u` is resolved iff `e_u` lies in the row space of `store`; the
/// returned combination reconstructs it exactly. Partial results are fine:
/// unresolved targets map to `None`.
pub fn solve_subset(store: &Matrix, targets: &[u32]) -> BTreeMap<u32, Option<Resolution>> {
    let rows = store.rows();
    let cols = store.cols();
    // Gauss-Jordan on [store | I], tracking the row operations.
    let mut m = store.hconcat(&Matrix::identity(rows));
    let mut pivot_of_col: BTreeMap<u32, usize> = BTreeMap::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !m.at(r, col).is_zero()) else {
            continue;
        };
        m.swap_rows(rank, piv);
        let inv = m.at(rank, col).inv();
        for c in 0..m.cols() {
            let v = m.at(rank, c) * inv;
            m.set(rank, c, v);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let f = m.at(r, col);
            if f.is_zero() {
                continue;
            }
            for c in 0..m.cols() {
                let v = m.at(r, c) - f * m.at(rank, c);
                m.set(r, c, v);
            }
        }
        pivot_of_col.insert(col as u32, rank);
        rank += 1;
    }

    let mut out = BTreeMap::new();
    for &t in targets {
        let resolved = pivot_of_col.get(&t).and_then(|&r| {
            // e_t is in the row space iff the (fully reduced) pivot row for
            // column t is the unit vector itself.
            let is_unit = (0..cols).all(|c| {
                let v = m.at(r, c);
                if c as u32 == t {
                    v == Gf::ONE
                } else {
                    v.is_zero()
                }
            });
            if is_unit {
                let combination = (0..rows)
                    .filter_map(|orig| {
                        let x = m.at(r, cols + orig);
                        (!x.is_zero()).then_some((orig, x))
                    })
                    .collect();
                Some(Resolution { combination })
            } else {
                None
            }
        });
        out.insert(t, resolved);
    }
    out
}

/// Incremental sparse eliminator.
///
/// Rows are reduced against stored pivots by their leading column; every
/// stored pivot row only references strictly larger columns in its tail, so
/// the pivot table is triangular by construction. `resolved_columns` then
/// propagates known singletons through that triangle, which is exactly the
/// set of unknowns whose unit vectors lie in the absorbed row space.
#[derive(Clone, Default)]
pub struct Eliminator {
    pivots: BTreeMap<u32, SparseVec>,
    rows_absorbed: usize,
}

impl Eliminator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Absorb one row; returns true when the rank grew.
    pub fn insert(&mut self, row: SparseVec) -> bool {
        self.rows_absorbed += 1;
        let mut row = row;
        while let Some(lead) = row.lead() {
            match self.pivots.get(&lead) {
                Some(p) => {
                    let f = row.get(lead);
                    row = row.add_scaled(p, -f);
                }
                None => {
                    let norm = row.scaled(row.get(lead).inv());
                    self.pivots.insert(lead, norm);
                    return true;
                }
            }
        }
        false
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows_absorbed(&self) -> usize {
        self.rows_absorbed
    }

    /// Columns whose unit vector lies in the absorbed row space.
    ///
    /// Stored pivot rows only reference strictly larger columns in their
    /// tails, so back-substituting in descending column order fully reduces
    /// every row; a column is resolved exactly when its reduced row is a
    /// singleton.
    pub fn resolved_columns(&self) -> BTreeSet<u32> {
        let mut reduced: BTreeMap<u32, SparseVec> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut row = row.clone();
            loop {
                // first tail entry sitting on an (already reduced) pivot
                let hit = row
                    .iter()
                    .find(|&(c, _)| c != lead && reduced.contains_key(&c));
                match hit {
                    Some((c, f)) => row = row.add_scaled(&reduced[&c], -f),
                    None => break,
                }
            }
            reduced.insert(lead, row);
        }
        reduced
            .into_iter()
            .filter(|(_, row)| row.len() == 1)
            .map(|(lead, _)| lead)
            .collect()
    }
}

/// Rank of a row set made of unit rows plus dense rows: the units are struck
/// out symbolically and only the residual columns of the dense block are
/// eliminated. Exact, and much faster than eliminating the full matrix when
/// most rows are units (the shape every precoder trace in this crate has).
pub fn rank_mixed(unit_cols: &BTreeSet<u32>, dense_rows: &[Vec<Gf>], cols: usize) -> usize {
    let keep: Vec<usize> = (0..cols).filter(|c| !unit_cols.contains(&(*c as u32))).collect();
    if dense_rows.is_empty() || keep.is_empty() {
        return unit_cols.len();
    }
    let reduced: Vec<Vec<Gf>> = dense_rows
        .iter()
        .map(|r| keep.iter().map(|&c| r[c]).collect())
        .collect();
    unit_cols.len() + Matrix::from_rows(&reduced).rank()
}
