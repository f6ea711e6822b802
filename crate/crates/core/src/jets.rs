//! Multi-indices, homogeneous jet spaces, first-order constant-coefficient
//! systems, their prolongations and linear coordinate changes.
//!
//! Monomials of one degree are ordered graded-lexicographically with `x_1`
//! largest: in degree 2 and three variables the order is
//! `x1^2, x1 x2, x1 x3, x2^2, x2 x3, x3^2`. A jet of degree `k` with `p`
//! components is a coefficient vector indexed by `(component, monomial)`,
//! flattened component-major.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{choose, ExactMatrix, ExactScalar, RankPolicy};

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex { exps }
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex { exps: vec![0; n] }
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        MultiIndex { exps }
    }

    /// From a multiset of 0-based variable indices.
    pub fn from_multiset(n: usize, idx: &[usize]) -> Self {
        let mut exps = vec![0; n];
        for &i in idx {
            exps[i] += 1;
        }
        MultiIndex { exps }
    }

    /// Variable indices with multiplicity, in increasing order.
    pub fn to_multiset(&self) -> Vec<usize> {
        self.exps.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    pub fn add_unit(&self, i: usize) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps[i] += 1;
        MultiIndex { exps }
    }

    /// Panics if the exponent of `i` is zero.
    pub fn sub_unit(&self, i: usize) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps[i] = exps[i].checked_sub(1).expect("exponent underflow");
        MultiIndex { exps }
    }

    /// `self - other` when every exponent stays non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a.checked_sub(*b)).collect::<Option<_>>()?;
        Some(MultiIndex { exps })
    }

    /// `prod_i exps[i]!`, the factor relating `∂^I x^I` to 1.
    pub fn factorial(&self) -> u64 {
        self.exps.iter().map(|&e| (1..=e as u64).product::<u64>()).product()
    }

    pub fn eval(&self, point: &[ExactScalar]) -> ExactScalar {
        let mut acc = ExactScalar::one();
        for (x, &e) in point.iter().zip(&self.exps) {
            for _ in 0..e {
                acc = &acc * x;
            }
        }
        acc
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        parts.join("*")
    }
}

impl Ord for MultiIndex {
    /// Degree first, then lexicographically with larger leading exponents first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of one degree in `n` variables, in graded-lex order.
#[derive(Debug)]
pub struct MonomialBasis {
    n: usize,
    k: u32,
    monos: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, k: u32) -> Self {
        let mut monos = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(MultiIndex::new(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        if n > 0 {
            rec(0, k, &mut cur, &mut monos);
        } else if k == 0 {
            monos.push(MultiIndex::zero(0));
        }
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis { n, k, monos, index }
    }

    /// Process-wide cached basis.
    pub fn shared(n: usize, k: u32) -> Arc<MonomialBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.lock().expect("basis cache").get(&(n, k)) {
            return b.clone();
        }
        let b = Arc::new(MonomialBasis::new(n, k));
        cache.lock().expect("basis cache").entry((n, k)).or_insert(b).clone()
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &MultiIndex {
        &self.monos[i]
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monos
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// `dim S^p_{kn} = p * C(k+n-1, n-1)`.
pub fn jet_dim(p: usize, k: u32, n: usize) -> usize {
    if n == 0 {
        return if k == 0 { p } else { 0 };
    }
    p * choose(k as i64 + n as i64 - 1, n as i64 - 1) as usize
}

/// Homogeneous degree-`k` jets with `p` components in `n` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JetSpace {
    pub components: usize,
    pub degree: u32,
    pub variables: usize,
}

impl JetSpace {
    pub fn new(components: usize, degree: u32, variables: usize) -> Self {
        JetSpace { components, degree, variables }
    }

    pub fn dim(&self) -> usize {
        jet_dim(self.components, self.degree, self.variables)
    }

    pub fn basis(&self) -> Arc<MonomialBasis> {
        MonomialBasis::shared(self.variables, self.degree)
    }

    /// Flat position of `(component, monomial)`.
    pub fn index(&self, component: usize, m: &MultiIndex) -> Option<usize> {
        let b = self.basis();
        b.index_of(m).map(|i| component * b.len() + i)
    }
}

/// `Σ_{i,j} a^m_{ij} ∂P^i/∂x_j = 0`, `m < α`, `i < β`, `j < n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDESystem {
    equations: usize,
    unknowns: usize,
    variables: usize,
    coeffs: Vec<ExactScalar>,
    pub label: String,
}

impl PDESystem {
    /// `coeffs[m][i][j]`; rejects ragged shapes and identically zero equations.
    pub fn new(coeffs: Vec<Vec<Vec<ExactScalar>>>, unknowns: usize, variables: usize, label: &str) -> Result<Self> {
        let sys = Self::from_nested(coeffs, unknowns, variables, label)?;
        if let Some(m) = (0..sys.equations).find(|&m| sys.equation_is_zero(m)) {
            return Err(Error::InvalidArgument(format!("equation {} has no nonzero coefficient", m + 1)));
        }
        Ok(sys)
    }

    /// As [`PDESystem::new`] but keeps zero equations (restrictions and coordinate slices produce them).
    pub fn new_unchecked(coeffs: Vec<Vec<Vec<ExactScalar>>>, unknowns: usize, variables: usize, label: &str) -> Self {
        Self::from_nested(coeffs, unknowns, variables, label).expect("well-shaped coefficient tensor")
    }

    fn from_nested(coeffs: Vec<Vec<Vec<ExactScalar>>>, unknowns: usize, variables: usize, label: &str) -> Result<Self> {
        let equations = coeffs.len();
        let mut flat = Vec::with_capacity(equations * unknowns * variables);
        for (m, eq) in coeffs.into_iter().enumerate() {
            if eq.len() != unknowns {
                return Err(Error::Shape(format!("equation {} has {} unknown slots, expected {unknowns}", m + 1, eq.len())));
            }
            for row in eq {
                if row.len() != variables {
                    return Err(Error::Shape(format!(
                        "equation {} has {} variable slots, expected {variables}",
                        m + 1,
                        row.len()
                    )));
                }
                flat.extend(row);
            }
        }
        Ok(PDESystem { equations, unknowns, variables, coeffs: flat, label: label.to_string() })
    }

    /// Builds from sparse `(equation, unknown, variable, coefficient)` terms.
    pub fn from_terms<I>(equations: usize, unknowns: usize, variables: usize, terms: I, label: &str) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, ExactScalar)>,
    {
        let mut c = vec![vec![vec![ExactScalar::zero(); variables]; unknowns]; equations];
        for (m, i, j, v) in terms {
            if m >= equations || i >= unknowns || j >= variables {
                return Err(Error::Shape(format!("term ({m},{i},{j}) out of range")));
            }
            c[m][i][j] += v;
        }
        Self::new(c, unknowns, variables, label)
    }

    pub fn equations(&self) -> usize {
        self.equations
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn coeff(&self, m: usize, i: usize, j: usize) -> &ExactScalar {
        &self.coeffs[(m * self.unknowns + i) * self.variables + j]
    }

    pub fn coeffs_nested(&self) -> Vec<Vec<Vec<ExactScalar>>> {
        (0..self.equations)
            .map(|m| {
                (0..self.unknowns)
                    .map(|i| (0..self.variables).map(|j| self.coeff(m, i, j).clone()).collect())
                    .collect()
            })
            .collect()
    }

    /// Nonzero `(unknown, variable, coefficient)` entries of equation `m`.
    pub fn equation_terms(&self, m: usize) -> Vec<(usize, usize, ExactScalar)> {
        let mut out = Vec::new();
        for i in 0..self.unknowns {
            for j in 0..self.variables {
                let c = self.coeff(m, i, j);
                if !c.is_zero() {
                    out.push((i, j, c.clone()));
                }
            }
        }
        out
    }

    fn equation_is_zero(&self, m: usize) -> bool {
        self.equation_terms(m).is_empty()
    }

    /// The system seen on jets in the last `n - j` variables only.
    pub fn restrict(&self, j: usize) -> PDESystem {
        assert!(j <= self.variables);
        let c = (0..self.equations)
            .map(|m| {
                (0..self.unknowns)
                    .map(|i| (j..self.variables).map(|v| self.coeff(m, i, v).clone()).collect())
                    .collect()
            })
            .collect();
        PDESystem::new_unchecked(c, self.unknowns, self.variables - j, &self.label)
    }
}

/// Matrix of `S^β_{(k+1)n} -> S^α_{kn}`, `P ↦ (Σ a^m_{ij} ∂P^i/∂x_j)_m`.
pub fn prolongation_matrix(sys: &PDESystem, k: u32) -> ExactMatrix {
    let n = sys.variables();
    let src = MonomialBasis::shared(n, k + 1);
    let tgt = MonomialBasis::shared(n, k);
    let (ns, nt) = (src.len(), tgt.len());
    let mut trip = Vec::new();
    for m in 0..sys.equations() {
        let terms = sys.equation_terms(m);
        for (r, mono) in tgt.monomials().iter().enumerate() {
            for (i, j, a) in &terms {
                let col = src.index_of(&mono.add_unit(*j)).expect("raised monomial in basis");
                let val = a * ExactScalar::from_int(mono.exp(*j) as i64 + 1);
                trip.push((m * nt + r, i * ns + col, val));
            }
        }
    }
    ExactMatrix::from_triplets(sys.equations() * nt, sys.unknowns() * ns, trip)
}

/// `dim A^q`: homogeneous degree-`(q+1)` solutions.
pub fn tableau_dim(sys: &PDESystem, q: u32) -> usize {
    prolongation_matrix(sys, q).nullity()
}

/// `dim A^q` with the rank taken under `policy`; a modular rank gives an upper bound.
pub fn tableau_dim_with(sys: &PDESystem, q: u32, policy: &RankPolicy) -> Result<usize> {
    let m = prolongation_matrix(sys, q);
    Ok(m.ncols() - policy.rank(&m)?.rank)
}

/// Tableau dimension on jets depending only on the last `n - j` variables.
pub fn restricted_tableau_dim(sys: &PDESystem, j: usize, q: u32) -> Result<usize> {
    if j >= sys.variables().max(1) {
        return Err(Error::InvalidArgument(format!("cut index {j} outside 0..{}", sys.variables())));
    }
    Ok(tableau_dim(&sys.restrict(j), q))
}

/// Invertible linear substitution `x = T y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateChange {
    matrix: ExactMatrix,
    inverse: ExactMatrix,
}

impl CoordinateChange {
    pub fn new(matrix: ExactMatrix) -> Result<Self> {
        let inverse = invert(&matrix)?;
        Ok(CoordinateChange { matrix, inverse })
    }

    pub fn identity(n: usize) -> Self {
        CoordinateChange { matrix: ExactMatrix::identity(n), inverse: ExactMatrix::identity(n) }
    }

    /// Entries uniform in `[-9, 9]`, redrawn until invertible.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        loop {
            let dense: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            if let Ok(t) = CoordinateChange::new(ExactMatrix::from_i64(&dense)) {
                return t;
            }
        }
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> CoordinateChange {
        CoordinateChange { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn invert(m: &ExactMatrix) -> Result<ExactMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Shape(format!("coordinate change must be square, got {}x{}", n, m.ncols())));
    }
    let mut trip = Vec::new();
    for r in 0..n {
        for (c, v) in m.row(r) {
            trip.push((r, *c, v.clone()));
        }
        trip.push((r, n + r, ExactScalar::one()));
    }
    let rref = ExactMatrix::from_triplets(n, 2 * n, trip).rref();
    if rref.pivots.iter().take(n).copied().ne(0..n) {
        return Err(Error::Singular);
    }
    let inv = (0..n)
        .flat_map(|r| {
            rref.reduced.row(r).iter().filter(|(c, _)| *c >= n).map(move |(c, v)| (r, c - n, v.clone())).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    Ok(ExactMatrix::from_triplets(n, n, inv))
}

/// Coefficients in the new coordinates: `a' = a (T^T)^{-1}` per `(m, i)` row,
/// so `P` solves `sys` iff `y ↦ P(T y)` solves the result.
pub fn change_coordinates(sys: &PDESystem, t: &CoordinateChange) -> Result<PDESystem> {
    let n = sys.variables();
    if t.dim() != n {
        return Err(Error::Shape(format!("coordinate change is {0}x{0}, system has {n} variables", t.dim())));
    }
    // (T^T)^{-1} = (T^{-1})^T, so a'_{k} = Σ_j a_j (T^{-1})_{kj}
    let tinv = t.inverse.to_dense();
    let mut c = sys.coeffs_nested();
    for eq in &mut c {
        for row in eq.iter_mut() {
            let new: Vec<ExactScalar> =
                (0..n).map(|k| (0..n).map(|j| &row[j] * &tinv[k][j]).sum()).collect();
            *row = new;
        }
    }
    Ok(PDESystem::new_unchecked(c, sys.unknowns(), n, &sys.label))
}
