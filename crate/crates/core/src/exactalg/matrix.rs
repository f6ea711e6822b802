use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;

use super::elim::{self, PrimeField, Rationals, SparseRow};
use super::{modp, ExactScalar};

/// Sparse rational matrix with sorted per-row entries; absent entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow<ExactScalar>>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, ExactScalar::one())]).collect();
        ExactMatrix { rows: n, cols: n, data }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, ExactScalar)>,
    {
        let mut data: Vec<SparseRow<ExactScalar>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of bounds {rows}x{cols}");
            data[r].push((c, v));
        }
        for row in &mut data {
            row.sort_by_key(|e| e.0);
            let mut merged: SparseRow<ExactScalar> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *row = merged;
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_dense(entries: &[Vec<ExactScalar>]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let trip = entries.iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            row.iter().enumerate().map(move |(c, v)| (r, c, v.clone()))
        });
        Self::from_triplets(rows, cols, trip)
    }

    pub fn from_i64(entries: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<ExactScalar>> =
            entries.iter().map(|r| r.iter().map(|&x| ExactScalar::from_int(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    /// Matrix whose columns are the given sparse vectors of length `len`.
    pub fn from_columns(len: usize, columns: &[SparseRow<ExactScalar>]) -> Self {
        let trip = columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v.clone())));
        Self::from_triplets(len, columns.len(), trip)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, ExactScalar)] {
        &self.data[r]
    }

    pub fn rows(&self) -> &[SparseRow<ExactScalar>] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> ExactScalar {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => ExactScalar::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let trip = self
            .data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (*c, r, v.clone())));
        Self::from_triplets(self.cols, self.rows, trip)
    }

    pub fn column(&self, c: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Columns as sparse vectors.
    pub fn columns_sparse(&self) -> Vec<SparseRow<ExactScalar>> {
        self.transpose().data
    }

    pub fn mul_vec(&self, x: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(x.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().map(|(c, v)| v * &x[*c]).sum())
            .collect()
    }

    pub fn mul_sparse_vec(&self, x: &[(usize, ExactScalar)]) -> Vec<ExactScalar> {
        let mut dense = vec![ExactScalar::zero(); self.cols];
        for (i, v) in x {
            dense[*i] = v.clone();
        }
        self.mul_vec(&dense)
    }

    pub fn matmul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut trip = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    trip.push((r, *c, a * b));
                }
            }
        }
        Ok(Self::from_triplets(self.rows, other.cols, trip))
    }

    pub fn to_dense(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c)).collect()).collect()
    }

    /// Stacks rows of `self` above rows of `other`.
    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Reduced row-echelon form over the rationals.
    pub fn rref(&self) -> Rref {
        let red = elim::reduce(&Rationals, &self.data, self.cols);
        let rank = red.pivots.len();
        let mut data = red.rows;
        data.resize(self.rows.max(rank), Vec::new());
        Rref {
            reduced: ExactMatrix { rows: self.rows.max(rank), cols: self.cols, data },
            rank,
            pivots: red.pivots,
        }
    }

    /// One solution of `self · x = b` (free unknowns set to zero), or `None` if inconsistent.
    pub fn solve(&self, b: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let n = self.cols;
        let rows: Vec<SparseRow<ExactScalar>> = self
            .data
            .iter()
            .zip(b)
            .map(|(r, v)| {
                let mut r = r.clone();
                if !v.is_zero() {
                    r.push((n, v.clone()));
                }
                r
            })
            .collect();
        let red = elim::reduce(&Rationals, &rows, n + 1);
        if red.pivots.last() == Some(&n) {
            return None;
        }
        let mut x = vec![ExactScalar::zero(); n];
        for (row, &p) in red.rows.iter().zip(&red.pivots) {
            if let Some((c, v)) = row.last() {
                if *c == n {
                    x[p] = v.clone();
                }
            }
        }
        Some(x)
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        elim::rank(&Rationals, &self.data, self.cols)
    }

    /// Null-space basis; returned matrix is `cols x nullity` with basis vectors as columns.
    pub fn kernel_basis(&self) -> ExactMatrix {
        ExactMatrix::from_columns(self.cols, &self.kernel_vectors())
    }

    /// Null-space basis as sparse vectors, one per free column of the RREF.
    pub fn kernel_vectors(&self) -> Vec<SparseRow<ExactScalar>> {
        let red = elim::reduce(&Rationals, &self.data, self.cols);
        elim::kernel_from_reduced(&Rationals, &red, self.cols)
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Rank modulo a single prime. Fails when an entry's denominator vanishes mod `p`.
    pub fn rank_mod_prime(&self, p: u64) -> Result<usize> {
        if p <= 1 << 20 || !modp::is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not a prime above 2^20")));
        }
        let rows: Vec<SparseRow<u64>> = self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .filter_map(|(c, v)| match v.to_modp(p) {
                        Some(0) => None,
                        Some(x) => Some(Ok((*c, x))),
                        None => Some(Err(())),
                    })
                    .collect::<std::result::Result<SparseRow<u64>, ()>>()
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("a denominator vanishes modulo {p}")))?;
        Ok(elim::rank(&PrimeField { p }, &rows, self.cols))
    }

    /// Rank estimate from random primes near 2^62.
    ///
    /// Runs `trials` independent primes (at least one); if they disagree a
    /// further trial is added, and the maximum is reported. A prime for which
    /// some denominator vanishes is discarded and redrawn.
    pub fn rank_modp(&self, trials: usize, seed: u64) -> Result<ModularRank> {
        const MAX_ATTEMPTS: usize = 32;
        let trials = trials.max(1);
        let run = |t: u64| -> Result<(u64, usize)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            for _ in 0..MAX_ATTEMPTS {
                let p = modp::random_prime(&mut rng);
                if let Ok(r) = self.rank_mod_prime(p) {
                    return Ok((p, r));
                }
            }
            Err(Error::NoPrime(MAX_ATTEMPTS))
        };
        let mut results: Vec<(u64, usize)> =
            exec::map((0..trials as u64).collect(), run).into_iter().collect::<Result<_>>()?;
        let agree = results.windows(2).all(|w| w[0].1 == w[1].1);
        if !agree {
            results.push(run(trials as u64)?);
        }
        let rank = results.iter().map(|r| r.1).max().expect("at least one trial");
        Ok(ModularRank {
            rank,
            primes: results.iter().map(|r| r.0).collect(),
            trial_ranks: results.iter().map(|r| r.1).collect(),
        })
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Rref {
    /// Same number of rows as the input (zero rows at the bottom).
    pub reduced: ExactMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModularRank {
    pub rank: usize,
    pub primes: Vec<u64>,
    pub trial_ranks: Vec<usize>,
}

/// How a rank should be computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RankPolicy {
    Rational,
    Modular { trials: usize, seed: u64 },
    /// Rational below `threshold` rows, modular at or above it.
    Auto { threshold: usize, trials: usize, seed: u64 },
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy::Auto { threshold: 2000, trials: 2, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOutcome {
    pub rank: usize,
    /// `None` for an exact rational computation.
    pub modular: Option<ModularRank>,
}

impl RankPolicy {
    pub fn rank(&self, m: &ExactMatrix) -> Result<RankOutcome> {
        let modular = |trials, seed| -> Result<RankOutcome> {
            let mr = m.rank_modp(trials, seed)?;
            Ok(RankOutcome { rank: mr.rank, modular: Some(mr) })
        };
        match *self {
            RankPolicy::Rational => Ok(RankOutcome { rank: m.rank(), modular: None }),
            RankPolicy::Modular { trials, seed } => modular(trials, seed),
            RankPolicy::Auto { threshold, trials, seed } => {
                if m.nrows() >= threshold {
                    modular(trials, seed)
                } else {
                    Ok(RankOutcome { rank: m.rank(), modular: None })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::new(n, d).unwrap()
    }

    #[test]
    fn identity_and_proportional_rows() {
        let id = ExactMatrix::identity(2);
        let r = id.rref();
        assert_eq!((r.rank, r.pivots.clone()), (2, vec![0, 1]));
        assert_eq!(r.reduced, id);
        assert_eq!(ExactMatrix::from_i64(&[vec![1, 2], vec![2, 4]]).rank(), 1);
        assert_eq!(id.kernel_basis().ncols(), 0);
        assert_eq!(ExactMatrix::zeros(3, 3).kernel_basis().ncols(), 3);
        assert_eq!(ExactMatrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn rref_is_canonical() {
        let m = ExactMatrix::from_i64(&[vec![2, 4, 1], vec![1, 2, 0], vec![3, 6, 1]]);
        let r = m.rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 2]);
        let expect = ExactMatrix::from_i64(&[vec![1, 2, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(r.reduced, expect);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = ExactMatrix::from_i64(&[vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]);
        let b: Vec<ExactScalar> = [3, 2, 5].iter().map(|&x| ExactScalar::from_int(x)).collect();
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        assert!(x[1].is_zero());
        let bad: Vec<ExactScalar> = [3, 2, 6].iter().map(|&x| ExactScalar::from_int(x)).collect();
        assert!(m.solve(&bad).is_none());
    }

    #[test]
    fn rank_modp_identity_any_prime() {
        let id = ExactMatrix::identity(7);
        for seed in 0..3 {
            assert_eq!(id.rank_modp(2, seed).unwrap().rank, 7);
        }
        assert!(id.rank_mod_prime(7).is_err());
    }

    #[test]
    fn denominators_vanishing_mod_p_are_rejected() {
        let p = 1_000_003u64;
        let m = ExactMatrix::from_dense(&[vec![q(1, p as i64)]]);
        assert!(m.rank_mod_prime(p).is_err());
    }

    fn sparse_matrix() -> impl Strategy<Value = ExactMatrix> {
        (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| {
            proptest::collection::vec((0..r, 0..c, -4i64..=4, 1i64..=3), 0..(r * c).min(40))
                .prop_map(move |t| {
                    ExactMatrix::from_triplets(
                        r,
                        c,
                        t.into_iter().map(|(i, j, n, d)| (i, j, ExactScalar::new(n, d).unwrap())),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity_and_kernel(m in sparse_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.ncols(), m.ncols());
            for v in k.columns_sparse() {
                prop_assert!(m.mul_sparse_vec(&v).iter().all(ExactScalar::is_zero));
            }
            prop_assert_eq!(k.rank(), k.ncols());
        }

        #[test]
        fn modular_rank_never_exceeds_rational(m in sparse_matrix(), seed in 0u64..1000) {
            let mr = m.rank_modp(2, seed).unwrap();
            prop_assert!(mr.rank <= m.rank());
        }
    }
}
