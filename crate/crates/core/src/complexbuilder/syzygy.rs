use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::elim::{IncrementalEchelon, Rationals, SparseRow};
use crate::exactalg::{ExactMatrix, ExactScalar};
use crate::jets::MonomialBasis;
use crate::poly::Poly;

use super::SymbolMatrix;

/// Direct sum of homogeneous polynomial spaces, one per slot; slots with a
/// negative degree are empty.
struct Layout {
    bases: Vec<Option<Arc<MonomialBasis>>>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Layout {
    fn new(nvars: usize, degrees: impl Iterator<Item = Option<u32>>) -> Self {
        let mut bases = Vec::new();
        let mut offsets = Vec::new();
        let mut dim = 0;
        for d in degrees {
            offsets.push(dim);
            let b = d.map(|d| MonomialBasis::shared(nvars, d));
            dim += b.as_ref().map_or(0, |b| b.len());
            bases.push(b);
        }
        Layout { bases, offsets, dim }
    }

    fn locate(&self, flat: usize) -> (usize, usize) {
        // the last slot starting at or before `flat` holds it; empty slots share the next offset
        let slot = self.offsets.partition_point(|&o| o <= flat) - 1;
        (slot, flat - self.offsets[slot])
    }

    fn to_polys(&self, nvars: usize, v: &[(usize, ExactScalar)]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(nvars); self.bases.len()];
        for (flat, c) in v {
            let (s, i) = self.locate(*flat);
            let b = self.bases[s].as_ref().expect("nonempty slot");
            out[s].add_term(b.monomial(i).clone(), c.clone());
        }
        out
    }
}

/// Minimal generators found at one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyzygyDegree {
    /// Degree relative to the lowest row grade of the input.
    pub degree: u32,
    /// Grade of the generated relation (`degree + min row grade`).
    pub grade: u32,
    /// Dimension of all syzygies at this grade.
    pub kernel_dim: usize,
    /// Dimension of the part generated by lower-degree syzygies.
    pub generated_dim: usize,
    /// New generators; each is one polynomial per input row.
    pub generators: Vec<Vec<Poly>>,
}

/// Minimal syzygy generators of the rows of a symbol matrix, degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSyzygyStage {
    pub degrees: Vec<SyzygyDegree>,
    /// Largest relative degree examined.
    pub cutoff: u32,
    /// Generic rank of the input symbol.
    pub input_rank: usize,
    /// Generic rank of the matrix of generators found.
    pub found_rank: usize,
    /// Fewer independent relations were found than the rank deficit requires,
    /// so generators beyond the cutoff exist.
    pub possibly_incomplete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyzygyCount {
    pub degree: u32,
    pub kernel_dim: usize,
    pub generated_dim: usize,
    pub new_generators: usize,
}

impl GradedSyzygyStage {
    pub fn count_at(&self, degree: u32) -> usize {
        self.degrees.iter().find(|d| d.degree == degree).map_or(0, |d| d.generators.len())
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().map(|d| d.generators.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// `(grade, generator)` pairs in degree order.
    pub fn generators(&self) -> impl Iterator<Item = (u32, &Vec<Poly>)> {
        self.degrees.iter().flat_map(|d| d.generators.iter().map(move |g| (d.grade, g)))
    }

    pub fn counts(&self) -> Vec<SyzygyCount> {
        self.degrees
            .iter()
            .map(|d| SyzygyCount {
                degree: d.degree,
                kernel_dim: d.kernel_dim,
                generated_dim: d.generated_dim,
                new_generators: d.generators.len(),
            })
            .collect()
    }
}

/// Matrix of `g ↦ (Σ_m g_m · entry(m, i))_i` on relations of total grade `e`.
fn multiplication_matrix(s: &SymbolMatrix, e: u32) -> (ExactMatrix, Layout) {
    let n = s.nvars();
    let cand = Layout::new(n, s.row_degrees().iter().map(|r| e.checked_sub(*r)));
    let tgt = Layout::new(n, s.col_degrees().iter().map(|c| e.checked_sub(*c)));
    let mut trip = Vec::new();
    for m in 0..s.nrows() {
        let Some(cb) = &cand.bases[m] else { continue };
        for i in 0..s.ncols() {
            let ent = s.entry(m, i);
            if ent.is_zero() {
                continue;
            }
            let tb = tgt.bases[i].as_ref().expect("nonzero entry implies nonnegative target degree");
            for (k, mono) in cb.monomials().iter().enumerate() {
                for (d, a) in ent.terms() {
                    let r = tb.index_of(&mono.add(d)).expect("product in target basis");
                    trip.push((tgt.offsets[i] + r, cand.offsets[m] + k, a.clone()));
                }
            }
        }
    }
    (ExactMatrix::from_triplets(tgt.dim, cand.dim, trip), cand)
}

/// Minimal syzygies of the rows of `s` for relative degrees `0..=max_deg`.
pub fn syzygy_generators(s: &SymbolMatrix, max_deg: u32) -> Result<GradedSyzygyStage> {
    let n = s.nvars();
    let alpha = s.nrows();
    let input_rank = s.generic_rank(0x5eed);
    if alpha == 0 {
        return Ok(GradedSyzygyStage {
            degrees: Vec::new(),
            cutoff: max_deg,
            input_rank,
            found_rank: 0,
            possibly_incomplete: false,
        });
    }
    let rho_min = *s.row_degrees().iter().min().expect("nonempty");
    let mut degrees = Vec::new();
    let mut prev: Option<(Vec<SparseRow<ExactScalar>>, Layout)> = None;
    for d in 0..=max_deg {
        let e = rho_min + d;
        let (mat, cand) = multiplication_matrix(s, e);
        let kernel = mat.kernel_vectors();
        let mut ech = IncrementalEchelon::new(Rationals);
        if let Some((pk, pl)) = &prev {
            for v in pk {
                for j in 0..n {
                    let mut shifted: SparseRow<ExactScalar> = v
                        .iter()
                        .map(|(flat, c)| {
                            let (slot, i) = pl.locate(*flat);
                            let mono = pl.bases[slot].as_ref().expect("slot").monomial(i).add_unit(j);
                            let b = cand.bases[slot].as_ref().expect("raised slot");
                            (cand.offsets[slot] + b.index_of(&mono).expect("raised monomial"), c.clone())
                        })
                        .collect();
                    shifted.sort_by_key(|x| x.0);
                    ech.insert(shifted);
                }
            }
        }
        let generated_dim = ech.rank();
        let mut generators = Vec::new();
        for v in &kernel {
            if ech.insert(v.clone()) {
                generators.push(cand.to_polys(n, v));
            }
        }
        if ech.rank() != kernel.len() {
            return Err(Error::InvalidArgument(format!(
                "products of lower syzygies leave the syzygy space at degree {d}"
            )));
        }
        debug_assert_eq!(generators.len(), kernel.len() - generated_dim);
        degrees.push(SyzygyDegree { degree: d, grade: e, kernel_dim: kernel.len(), generated_dim, generators });
        prev = Some((kernel, cand));
    }
    let stage_rows: Vec<Vec<Poly>> = degrees.iter().flat_map(|d| d.generators.iter().cloned()).collect();
    let found_rank = if stage_rows.is_empty() {
        0
    } else {
        let grades: Vec<u32> = degrees.iter().flat_map(|d| d.generators.iter().map(move |_| d.grade)).collect();
        SymbolMatrix::new(n, stage_rows, grades, s.row_degrees().to_vec())?.generic_rank(0xfeed)
    };
    Ok(GradedSyzygyStage {
        degrees,
        cutoff: max_deg,
        input_rank,
        found_rank,
        possibly_incomplete: found_rank + input_rank < alpha,
    })
}

/// Stacks the minimal generators of `s` as rows of the next operator.
pub fn compatibility_operator(s: &SymbolMatrix, max_deg: u32) -> Result<(SymbolMatrix, GradedSyzygyStage)> {
    let stage = syzygy_generators(s, max_deg)?;
    let (grades, rows): (Vec<u32>, Vec<Vec<Poly>>) = stage.generators().map(|(g, r)| (g, r.clone())).unzip();
    let op = SymbolMatrix::new(s.nvars(), rows, grades, s.row_degrees().to_vec())?;
    Ok((op, stage))
}
