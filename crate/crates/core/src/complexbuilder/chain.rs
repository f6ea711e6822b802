use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::PDESystem;

use super::syzygy::{compatibility_operator, GradedSyzygyStage};
use super::SymbolMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainEnd {
    /// The last stage has no syzygies and its generators account for the full rank deficit.
    Terminated,
    /// Some stage may have generators beyond the degree bound.
    Cutoff,
    /// Stopped at the length bound before a stage came back empty.
    MaxLength,
    /// Assembled from given operators; no syzygy search was run.
    Given,
}

/// `op_0, op_1, …` with `op_{i+1} · op_i = 0`.
#[derive(Clone, Debug)]
pub struct ComplexChain {
    pub operators: Vec<SymbolMatrix>,
    pub orders: Vec<u32>,
    /// Component counts of the spaces, starting with the unknowns of `op_0`.
    pub sizes: Vec<usize>,
    /// Syzygy stage computed on top of each operator (empty for given chains).
    pub stages: Vec<GradedSyzygyStage>,
    pub end: ChainEnd,
}

impl ComplexChain {
    /// Chain from explicit operators; checks grade compatibility and that consecutive products vanish.
    pub fn from_operators(operators: Vec<SymbolMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument("a chain needs at least one operator".into()));
        }
        let chain = ComplexChain {
            orders: operators.iter().map(SymbolMatrix::order).collect(),
            sizes: sizes_of(&operators),
            operators,
            stages: Vec::new(),
            end: ChainEnd::Given,
        };
        chain.verify_products()?;
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.operators[0].nvars()
    }

    /// Fails unless every consecutive product is the zero polynomial matrix.
    pub fn verify_products(&self) -> Result<()> {
        for (i, w) in self.operators.windows(2).enumerate() {
            if !w[1].compose(&w[0])?.is_zero() {
                return Err(Error::InvalidArgument(format!("operators {i} and {} do not compose to zero", i + 1)));
            }
        }
        Ok(())
    }

    /// Grades of each space: column grades of `op_0`, then row grades of every operator.
    pub fn slot_grades(&self) -> Vec<Vec<u32>> {
        let mut out = vec![self.operators[0].col_degrees().to_vec()];
        out.extend(self.operators.iter().map(|o| o.row_degrees().to_vec()));
        out
    }

    pub fn possibly_incomplete(&self) -> bool {
        self.end == ChainEnd::Cutoff || self.stages.iter().any(|s| s.possibly_incomplete)
    }
}

fn sizes_of(ops: &[SymbolMatrix]) -> Vec<usize> {
    let mut s = vec![ops[0].ncols()];
    s.extend(ops.iter().map(SymbolMatrix::nrows));
    s
}

/// Iterates the compatibility operator starting from a first-order system.
pub fn build_complex(sys: &PDESystem, max_deg: u32, max_len: usize) -> Result<ComplexChain> {
    build_complex_from_symbol(SymbolMatrix::from_system(sys), max_deg, max_len)
}

pub fn build_complex_from_symbol(first: SymbolMatrix, max_deg: u32, max_len: usize) -> Result<ComplexChain> {
    let n = first.nvars();
    if max_len == 0 || max_len > n + 1 {
        return Err(Error::InvalidArgument(format!("chain length bound must lie in 1..={}", n + 1)));
    }
    if max_deg < 1 {
        return Err(Error::InvalidArgument("degree bound must be at least 1".into()));
    }
    let mut ops = vec![first];
    let mut stages = Vec::new();
    let end = loop {
        if ops.len() >= max_len {
            break ChainEnd::MaxLength;
        }
        let last = ops.last().expect("nonempty");
        let (next, stage) = compatibility_operator(last, max_deg)?;
        let empty = stage.is_empty();
        let incomplete = stage.possibly_incomplete;
        stages.push(stage);
        if empty {
            break if incomplete { ChainEnd::Cutoff } else { ChainEnd::Terminated };
        }
        ops.push(next);
    };
    let chain = ComplexChain {
        orders: ops.iter().map(SymbolMatrix::order).collect(),
        sizes: sizes_of(&ops),
        operators: ops,
        stages,
        end,
    };
    let end = if chain.possibly_incomplete() { ChainEnd::Cutoff } else { chain.end };
    let chain = ComplexChain { end, ..chain };
    chain.verify_products()?;
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::ExactScalar;

    fn gradient() -> PDESystem {
        PDESystem::from_terms(2, 1, 2, [(0, 0, 0, ExactScalar::one()), (1, 0, 1, ExactScalar::one())], "grad").unwrap()
    }

    #[test]
    fn gradient_chain() {
        let c = build_complex(&gradient(), 4, 3).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.sizes, vec![1, 2, 1]);
        assert_eq!(c.orders, vec![1, 1]);
        assert_eq!(c.end, ChainEnd::Terminated);
        assert_eq!(c.slot_grades(), vec![vec![0], vec![1, 1], vec![2]]);
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(build_complex(&gradient(), 4, 4).is_err());
        assert!(build_complex(&gradient(), 0, 2).is_err());
        let c = build_complex(&gradient(), 4, 1).unwrap();
        assert_eq!((c.len(), c.end), (1, ChainEnd::MaxLength));
    }

    #[test]
    fn mismatched_operators_rejected() {
        let g = SymbolMatrix::from_system(&gradient());
        assert!(ComplexChain::from_operators(vec![g.clone(), g]).is_err());
    }
}
