//! Cartan's involution test, regular sequences of partial 1-jets and the
//! dimension criterion for heredity of involution along an exact sequence.
//!
//! Levels of a regular sequence are 1-based as in the definition: level `l`
//! holds the values `P^i_{lj}` for `j = l..=n`, stored as a flat vector with
//! index `i * (n - l + 1) + (j - l)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complexbuilder::SymbolMatrix;
use crate::error::{Error, Result};
use crate::exactalg::{ExactMatrix, ExactScalar};
use crate::exec;
use crate::jets::{change_coordinates, jet_dim, restricted_tableau_dim, tableau_dim, CoordinateChange, PDESystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanResult {
    /// `dim A^1`
    pub lhs: usize,
    /// `dim A^0 + Σ_{j=1}^{n-1} dim A^0_j`
    pub rhs: usize,
    /// `[dim A^0, dim A^0_1, …, dim A^0_{n-1}]`
    pub terms: Vec<usize>,
    pub equal: bool,
}

/// Cartan's inequality in the coordinates given by `t`.
pub fn cartan_test(sys: &PDESystem, t: &CoordinateChange) -> Result<CartanResult> {
    let s = change_coordinates(sys, t)?;
    let n = s.variables();
    let lhs = tableau_dim(&s, 1);
    let mut terms = vec![tableau_dim(&s, 0)];
    for j in 1..n {
        terms.push(restricted_tableau_dim(&s, j, 0)?);
    }
    let rhs = terms.iter().sum();
    assert!(lhs <= rhs, "Cartan inequality violated: {lhs} > {rhs}");
    Ok(CartanResult { lhs, rhs, terms, equal: lhs == rhs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Involutive,
    NotInvolutive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanSample {
    pub seed: u64,
    pub rhs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionReport {
    pub lhs: usize,
    pub rhs_samples: Vec<CartanSample>,
    pub rhs_min: usize,
    /// Terms of the sample attaining `rhs_min`.
    pub rhs_terms: Vec<usize>,
    pub verdict: Verdict,
    pub samples: usize,
    pub seed: u64,
}

/// Per-sample seeds derived from a master seed.
pub fn sample_seeds(seed: u64, samples: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| rng.next_u64()).collect()
}

/// Coordinate change for one sample seed.
pub fn sample_coordinates(n: usize, sample_seed: u64) -> CoordinateChange {
    CoordinateChange::random(n, &mut ChaCha8Rng::seed_from_u64(sample_seed))
}

/// Cartan test over `samples` random coordinate systems; the verdict uses the smallest right-hand side.
pub fn is_involutive(sys: &PDESystem, samples: usize, seed: u64) -> Result<InvolutionReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one coordinate sample is required".into()));
    }
    let n = sys.variables();
    let seeds = sample_seeds(seed, samples);
    let results: Vec<(u64, CartanResult)> = exec::map(seeds, |s| {
        cartan_test(sys, &sample_coordinates(n, s)).map(|r| (s, r))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let lhs = results[0].1.lhs;
    debug_assert!(results.iter().all(|(_, r)| r.lhs == lhs));
    let best = results.iter().min_by_key(|(_, r)| r.rhs).expect("nonempty");
    let rhs_min = best.1.rhs;
    Ok(InvolutionReport {
        lhs,
        rhs_terms: best.1.terms.clone(),
        rhs_samples: results.iter().map(|(s, r)| CartanSample { seed: *s, rhs: r.rhs }).collect(),
        rhs_min,
        verdict: if lhs == rhs_min { Verdict::Involutive } else { Verdict::NotInvolutive },
        samples,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularSequenceWitness {
    pub levels: Vec<Vec<ExactScalar>>,
}

impl RegularSequenceWitness {
    pub fn empty() -> Self {
        RegularSequenceWitness { levels: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `P^i_{lj}` with 1-based `l`, `j`.
    pub fn value(&self, n: usize, l: usize, i: usize, j: usize) -> &ExactScalar {
        &self.levels[l - 1][i * (n - l + 1) + (j - l)]
    }
}

/// `x ↦ (Σ_{i, j≥l} a^m_{ij} x^i_j)_m` on level-`l` unknowns.
fn level_matrix(sys: &PDESystem, l: usize) -> ExactMatrix {
    let n = sys.variables();
    let w = n - l + 1;
    let trip = (0..sys.equations()).flat_map(|m| {
        (0..sys.unknowns()).flat_map(move |i| {
            (l..=n).filter_map(move |j| {
                let a = sys.coeff(m, i, j - 1);
                (!a.is_zero()).then(|| (m, i * w + (j - l), a.clone()))
            })
        })
    });
    ExactMatrix::from_triplets(sys.equations(), sys.unknowns() * w, trip)
}

/// `-(a^m_{i1} P^i_{1l} + … + a^m_{i(l-1)} P^i_{(l-1)l})`.
fn level_rhs(sys: &PDESystem, w: &RegularSequenceWitness, l: usize) -> Vec<ExactScalar> {
    let n = sys.variables();
    (0..sys.equations())
        .map(|m| {
            let mut acc = ExactScalar::zero();
            for k in 1..l {
                for i in 0..sys.unknowns() {
                    let a = sys.coeff(m, i, k - 1);
                    if !a.is_zero() {
                        acc -= a * w.value(n, k, i, l);
                    }
                }
            }
            acc
        })
        .collect()
}

/// Checks shapes and every level relation.
pub fn verify_regular(sys: &PDESystem, w: &RegularSequenceWitness) -> Result<bool> {
    let n = sys.variables();
    if w.len() > n {
        return Err(Error::Shape(format!("{} levels for {n} variables", w.len())));
    }
    for (k, lev) in w.levels.iter().enumerate() {
        let expect = sys.unknowns() * (n - k);
        if lev.len() != expect {
            return Err(Error::Shape(format!("level {} has {} entries, expected {expect}", k + 1, lev.len())));
        }
    }
    for l in 1..=w.len() {
        if level_matrix(sys, l).mul_vec(&w.levels[l - 1]) != level_rhs(sys, w, l) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Next level of a regular sequence, or `None` when the level-`l` relation has no solution.
///
/// Level 1 returns the first basis vector of `A^0` (zero if `A^0 = 0`);
/// later levels return the solution with zeros in the free positions.
pub fn extend_regular(sys: &PDESystem, w: &RegularSequenceWitness, l: usize) -> Result<Option<Vec<ExactScalar>>> {
    let n = sys.variables();
    if l == 0 || l > n {
        return Err(Error::InvalidArgument(format!("level {l} outside 1..={n}")));
    }
    if w.len() != l - 1 {
        return Err(Error::Shape(format!("witness has {} levels, expected {}", w.len(), l - 1)));
    }
    if !verify_regular(sys, w)? {
        return Err(Error::InvalidArgument(format!("witness is not {}-regular", l - 1)));
    }
    let a = level_matrix(sys, l);
    let x = if l == 1 {
        let mut x = vec![ExactScalar::zero(); a.ncols()];
        if let Some(v) = a.kernel_vectors().into_iter().next() {
            for (c, val) in v {
                x[c] = val;
            }
        }
        Some(x)
    } else {
        a.solve(&level_rhs(sys, w, l))
    };
    if let Some(x) = &x {
        let mut ext = w.clone();
        ext.levels.push(x.clone());
        debug_assert!(verify_regular(sys, &ext)?);
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessSample {
    Built(RegularSequenceWitness),
    /// The relation at this level had no solution.
    Stuck { level: usize },
}

/// Random `levels`-regular sequence: at each level a particular solution
/// plus a random combination (coefficients in `[-5, 5]`) of the kernel.
pub fn sample_regular_witness<R: Rng>(sys: &PDESystem, levels: usize, rng: &mut R) -> WitnessSample {
    let mut w = RegularSequenceWitness::empty();
    for l in 1..=levels {
        let a = level_matrix(sys, l);
        let rhs = level_rhs(sys, &w, l);
        let Some(mut x) = a.solve(&rhs) else { return WitnessSample::Stuck { level: l } };
        for v in a.kernel_vectors() {
            let c = ExactScalar::from_int(rng.gen_range(-5..=5));
            for (i, val) in v {
                x[i] += &c * &val;
            }
        }
        w.levels.push(x);
    }
    WitnessSample::Built(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionTally {
    pub sampled: usize,
    /// Witnesses that reached level `n`.
    pub extended: usize,
    /// Level at which each failing witness got stuck.
    pub stuck_levels: Vec<usize>,
}

impl ExtensionTally {
    pub fn all_extend(&self) -> bool {
        self.extended == self.sampled
    }
}

/// Samples random `(n-1)`-regular sequences in the coordinates `t` and tries to extend each to level `n`.
pub fn witness_extension_tally(sys: &PDESystem, t: &CoordinateChange, samples: usize, seed: u64) -> Result<ExtensionTally> {
    let s = change_coordinates(sys, t)?;
    let n = s.variables();
    let outcomes = exec::map(sample_seeds(seed, samples), |sd| {
        let mut rng = ChaCha8Rng::seed_from_u64(sd);
        sample_regular_witness(&s, n, &mut rng)
    });
    let stuck_levels: Vec<usize> = outcomes
        .iter()
        .filter_map(|o| match o {
            WitnessSample::Stuck { level } => Some(*level),
            WitnessSample::Built(_) => None,
        })
        .collect();
    Ok(ExtensionTally { sampled: samples, extended: samples - stuck_levels.len(), stuck_levels })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeredityRow {
    pub j: usize,
    /// `dim B^0_j`
    pub lhs: usize,
    /// `dim S^β_{(r+1)(n-j)} - dim A^r_j`
    pub rhs: i64,
    pub equal: bool,
}

/// Both sides of the heredity criterion for `B` following `A`, for `j = 1..n-1`.
///
/// `B` has uniform order `r` (first order gives the classical statement);
/// `B^0_j` is the kernel of `B` on order-`r` jets in the last `n - j`
/// variables and `A^r_j` the restricted degree-`(r+1)` tableau of `A`.
pub fn heredity_check(sys_a: &PDESystem, b: &SymbolMatrix) -> Result<Vec<HeredityRow>> {
    if b.ncols() != sys_a.equations() {
        return Err(Error::Shape(format!(
            "second operator takes {} inputs but the first has {} equations",
            b.ncols(),
            sys_a.equations()
        )));
    }
    if b.nvars() != sys_a.variables() {
        return Err(Error::Shape("operators act on different numbers of variables".into()));
    }
    let r = if b.nrows() == 0 {
        1
    } else {
        b.uniform_order().ok_or_else(|| Error::InvalidArgument("second operator has mixed orders".into()))?
    };
    let c = b.col_degrees().iter().copied().max().unwrap_or(0);
    if b.col_degrees().iter().any(|&x| x != c) {
        return Err(Error::InvalidArgument("second operator has mixed input grades".into()));
    }
    let n = sys_a.variables();
    let beta = sys_a.unknowns();
    let rows = exec::map((1..n).collect(), |j| {
        let bj = b.restrict(j);
        let m = bj.jet_matrix(c + r);
        let lhs = m.ncols() - m.rank();
        let rhs = jet_dim(beta, r + 1, n - j) as i64 - tableau_dim(&sys_a.restrict(j), r) as i64;
        HeredityRow { j, lhs, rhs, equal: lhs as i64 == rhs }
    });
    Ok(rows)
}
