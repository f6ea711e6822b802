use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{RankOutcome, RankPolicy};
use crate::exec;

use super::ComplexChain;

/// One space of the chain at a fixed total grade.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlotReport {
    pub slot: usize,
    pub dim: usize,
    /// Rank of the map into this space (`None` for the first space).
    pub rank_in: Option<usize>,
    /// Rank of the map out of this space (`None` for the last space).
    pub rank_out: Option<usize>,
    /// Kernel of the outgoing map (`None` for the last space).
    pub kernel_dim: Option<usize>,
    /// `ker out = im in` for interior spaces; surjectivity of the incoming map for the last.
    pub exact: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    /// Total grade; space `s` holds jets of degree `total_grade - grade(s)`.
    pub total_grade: u32,
    pub slots: Vec<SlotReport>,
    pub ranks: Vec<RankOutcome>,
    pub matrix_shapes: Vec<(usize, usize)>,
    /// Every interior slot exact.
    pub exact: bool,
    /// The last map is onto.
    pub surjective: bool,
}

/// Jet-level ranks of every operator at degree offset `k`.
///
/// Total grade is `k` plus the largest grade of the last space, so the last
/// space holds degree-`k` jets. Matrices with more than `max_rows` rows are
/// refused.
pub fn exactness_check(chain: &ComplexChain, k: u32, policy: &RankPolicy, max_rows: usize) -> Result<ExactnessReport> {
    let grades = chain.slot_grades();
    for (i, w) in chain.operators.windows(2).enumerate() {
        if w[1].col_degrees() != w[0].row_degrees() {
            return Err(Error::Shape(format!("grades of operators {i} and {} do not match", i + 1)));
        }
    }
    let top = *grades.last().and_then(|g| g.iter().max()).unwrap_or(&0);
    let t = k + top;
    let mats = exec::map(chain.operators.iter().collect(), |op| op.jet_matrix(t));
    if let Some(m) = mats.iter().find(|m| m.nrows() > max_rows) {
        return Err(Error::SizeGuard(format!(
            "jet matrix has {} rows, above the bound of {max_rows}",
            m.nrows()
        )));
    }
    let ranks: Vec<RankOutcome> =
        exec::map(mats.iter().collect(), |m| policy.rank(m)).into_iter().collect::<Result<_>>()?;
    let dims: Vec<usize> = std::iter::once(mats[0].ncols()).chain(mats.iter().map(|m| m.nrows())).collect();
    let last = dims.len() - 1;
    let slots: Vec<SlotReport> = (0..dims.len())
        .map(|s| {
            let rank_in = (s > 0).then(|| ranks[s - 1].rank);
            let rank_out = (s < last).then(|| ranks[s].rank);
            let kernel_dim = rank_out.map(|r| dims[s] - r);
            let exact = match (rank_in, kernel_dim) {
                (Some(ri), Some(kd)) => Some(ri == kd),
                (Some(ri), None) => Some(ri == dims[s]),
                _ => None,
            };
            SlotReport { slot: s, dim: dims[s], rank_in, rank_out, kernel_dim, exact }
        })
        .collect();
    let exact = slots[1..last.max(1)].iter().all(|s| s.exact == Some(true));
    let surjective = slots[last].exact == Some(true);
    Ok(ExactnessReport {
        total_grade: t,
        matrix_shapes: mats.iter().map(|m| (m.nrows(), m.ncols())).collect(),
        slots,
        ranks,
        exact,
        surjective,
    })
}
