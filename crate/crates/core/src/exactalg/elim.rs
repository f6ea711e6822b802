//! Sparse Gaussian elimination over an abstract field.
//!
//! Matrices are first split into the connected components of their
//! row/column incidence graph; each block is eliminated on its own and the
//! blocks are processed through [`crate::exec::map`]. Jet-level matrices of
//! torus-equivariant operators (Cauchy-Fueter and the W-family) fall apart
//! into thousands of tiny blocks this way.
//!
//! Inside a block, elimination walks columns left to right and, among the
//! rows whose leading entry sits in the current column, takes the shortest
//! one as pivot (ties broken by coefficient height). That is the row half of
//! Markowitz's rule; the column order stays fixed so the result is the
//! canonical reduced row-echelon form.

use crate::exec;

use super::modp;
use super::ExactScalar;

pub type SparseRow<E> = Vec<(usize, E)>;

pub trait Field: Sync + Send {
    type Elem: Clone + Send + Sync + std::fmt::Debug;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn one(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `a - b * c`
    fn sub_mul(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn height(&self, _a: &Self::Elem) -> u64 {
        0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = ExactScalar;

    fn is_zero(&self, a: &ExactScalar) -> bool {
        a.is_zero()
    }
    fn one(&self) -> ExactScalar {
        ExactScalar::one()
    }
    fn mul(&self, a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
        a * b
    }
    fn sub_mul(&self, a: &ExactScalar, b: &ExactScalar, c: &ExactScalar) -> ExactScalar {
        a - &(b * c)
    }
    fn neg(&self, a: &ExactScalar) -> ExactScalar {
        -a
    }
    fn inv(&self, a: &ExactScalar) -> ExactScalar {
        a.inv().expect("pivot is nonzero")
    }
    fn height(&self, a: &ExactScalar) -> u64 {
        a.height()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    pub p: u64,
}

impl Field for PrimeField {
    type Elem = u64;

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn one(&self) -> u64 {
        1
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        modp::mul_mod(*a, *b, self.p)
    }
    fn sub_mul(&self, a: &u64, b: &u64, c: &u64) -> u64 {
        modp::sub_mod(*a, modp::mul_mod(*b, *c, self.p), self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        modp::inv_mod(*a, self.p).expect("pivot is nonzero")
    }
}

/// `row - factor * pivot`, both sorted by column.
fn axpy<F: Field>(f: &F, row: &[(usize, F::Elem)], factor: &F::Elem, pivot: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_piv {
            let v = f.neg(&f.mul(factor, &pivot[j].1));
            out.push((pivot[j].0, v));
            j += 1;
        } else {
            let v = f.sub_mul(&row[i].1, factor, &pivot[j].1);
            if !f.is_zero(&v) {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale<F: Field>(f: &F, row: &mut [(usize, F::Elem)], k: &F::Elem) {
    for (_, v) in row.iter_mut() {
        *v = f.mul(v, k);
    }
}

/// Echelon form of one block: monic pivot rows sorted by leading column.
fn echelon_block<F: Field>(f: &F, rows: Vec<SparseRow<F::Elem>>, ncols: usize) -> Vec<SparseRow<F::Elem>> {
    let mut buckets: Vec<Vec<SparseRow<F::Elem>>> = vec![Vec::new(); ncols];
    for r in rows {
        if let Some(&(c, _)) = r.first() {
            buckets[c].push(r);
        }
    }
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let mut bucket = std::mem::take(&mut buckets[c]);
        if bucket.is_empty() {
            continue;
        }
        let best = (0..bucket.len())
            .min_by_key(|&i| {
                let r = &bucket[i];
                (r.len(), r.iter().map(|(_, v)| f.height(v)).sum::<u64>())
            })
            .expect("bucket is nonempty");
        let mut pivot = bucket.swap_remove(best);
        let lead_inv = f.inv(&pivot[0].1);
        scale(f, &mut pivot, &lead_inv);
        for r in bucket {
            let factor = r[0].1.clone();
            let reduced = axpy(f, &r[1..], &factor, &pivot[1..]);
            if let Some(&(nc, _)) = reduced.first() {
                buckets[nc].push(reduced);
            }
        }
        pivots.push(pivot);
    }
    pivots
}

/// Turns monic echelon rows (sorted by pivot) into reduced echelon rows.
fn back_substitute<F: Field>(f: &F, rows: &mut [SparseRow<F::Elem>]) {
    for j in (0..rows.len()).rev() {
        let pc = rows[j][0].0;
        let (head, tail) = rows.split_at_mut(j);
        let pivot = &tail[0];
        for r in head.iter_mut() {
            if let Ok(pos) = r.binary_search_by_key(&pc, |e| e.0) {
                let factor = r[pos].1.clone();
                *r = axpy(f, r, &factor, pivot);
            }
        }
    }
}

struct Block {
    cols: Vec<usize>,
    rows: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the row/column incidence graph. Zero rows are dropped.
fn blocks<E>(rows: &[SparseRow<E>], ncols: usize) -> Vec<Block> {
    let mut parent: Vec<usize> = (0..ncols).collect();
    for r in rows {
        if let Some(&(c0, _)) = r.first() {
            for &(c, _) in &r[1..] {
                let a = find(&mut parent, c0);
                let b = find(&mut parent, c);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut index = vec![usize::MAX; ncols];
    let mut out: Vec<Block> = Vec::new();
    let mut used = vec![false; ncols];
    for r in rows {
        for &(c, _) in r {
            used[c] = true;
        }
    }
    for c in 0..ncols {
        if !used[c] {
            continue;
        }
        let root = find(&mut parent, c);
        if index[root] == usize::MAX {
            index[root] = out.len();
            out.push(Block { cols: Vec::new(), rows: Vec::new() });
        }
        out[index[root]].cols.push(c);
    }
    for (ri, r) in rows.iter().enumerate() {
        if let Some(&(c0, _)) = r.first() {
            let root = find(&mut parent, c0);
            out[index[root]].rows.push(ri);
        }
    }
    out
}

/// Result of a full reduction: reduced pivot rows (global column indices)
/// sorted by pivot column.
pub struct Reduced<E> {
    pub rows: Vec<SparseRow<E>>,
    pub pivots: Vec<usize>,
}

fn reduce_impl<F: Field>(f: &F, rows: &[SparseRow<F::Elem>], ncols: usize, full: bool) -> Reduced<F::Elem> {
    let parts = blocks(rows, ncols);
    let work: Vec<(Vec<usize>, Vec<SparseRow<F::Elem>>)> = parts
        .into_iter()
        .map(|b| {
            // local column numbering preserves global order
            let local: Vec<SparseRow<F::Elem>> = b
                .rows
                .iter()
                .map(|&ri| {
                    rows[ri]
                        .iter()
                        .map(|(c, v)| (b.cols.binary_search(c).expect("column in block"), v.clone()))
                        .collect()
                })
                .collect();
            (b.cols, local)
        })
        .collect();
    let reduced: Vec<Vec<SparseRow<F::Elem>>> = exec::map(work, |(cols, local)| {
        let mut ech = echelon_block(f, local, cols.len());
        if full {
            back_substitute(f, &mut ech);
        }
        ech.into_iter()
            .map(|r| r.into_iter().map(|(c, v)| (cols[c], v)).collect())
            .collect()
    });
    let mut all: Vec<SparseRow<F::Elem>> = reduced.into_iter().flatten().collect();
    all.sort_by_key(|r| r[0].0);
    let pivots = all.iter().map(|r| r[0].0).collect();
    Reduced { rows: all, pivots }
}

/// Reduced row-echelon form (pivot rows only).
pub fn reduce<F: Field>(f: &F, rows: &[SparseRow<F::Elem>], ncols: usize) -> Reduced<F::Elem> {
    reduce_impl(f, rows, ncols, true)
}

/// Row-echelon form without back substitution; enough for ranks and pivots.
pub fn echelon<F: Field>(f: &F, rows: &[SparseRow<F::Elem>], ncols: usize) -> Reduced<F::Elem> {
    reduce_impl(f, rows, ncols, false)
}

pub fn rank<F: Field>(f: &F, rows: &[SparseRow<F::Elem>], ncols: usize) -> usize {
    echelon(f, rows, ncols).pivots.len()
}

/// Null-space basis from reduced rows: one vector per free column.
pub fn kernel_from_reduced<F: Field>(f: &F, red: &Reduced<F::Elem>, ncols: usize) -> Vec<SparseRow<F::Elem>> {
    let mut is_pivot = vec![false; ncols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    // column -> entries (pivot column, value) of reduced rows touching it
    let mut by_col: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); ncols];
    for r in &red.rows {
        let pc = r[0].0;
        for (c, v) in &r[1..] {
            by_col[*c].push((pc, v.clone()));
        }
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v: SparseRow<F::Elem> = by_col[free].iter().map(|(pc, x)| (*pc, f.neg(x))).collect();
            v.push((free, f.one()));
            v.sort_by_key(|e| e.0);
            v
        })
        .collect()
}

/// Row echelon basis grown one vector at a time.
pub struct IncrementalEchelon<F: Field> {
    field: F,
    pivots: std::collections::BTreeMap<usize, SparseRow<F::Elem>>,
}

impl<F: Field> IncrementalEchelon<F> {
    pub fn new(field: F) -> Self {
        IncrementalEchelon { field, pivots: Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Remainder of `v` after reduction by the current basis.
    pub fn reduce(&self, mut row: SparseRow<F::Elem>) -> SparseRow<F::Elem> {
        let mut idx = 0;
        while idx < row.len() {
            match self.pivots.get(&row[idx].0) {
                Some(piv) => {
                    let factor = row[idx].1.clone();
                    row = axpy(&self.field, &row, &factor, piv);
                }
                None => idx += 1,
            }
        }
        row
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow<F::Elem>) -> bool {
        let mut r = self.reduce(row);
        let Some((c, lead)) = r.first().cloned() else { return false };
        let k = self.field.inv(&lead);
        scale(&self.field, &mut r, &k);
        self.pivots.insert(c, r);
        true
    }

    pub fn contains(&self, row: SparseRow<F::Elem>) -> bool {
        self.reduce(row).is_empty()
    }
}
