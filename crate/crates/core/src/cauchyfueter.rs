//! The Cauchy-Fueter operator on `R^8` and its compatibility complex
//! `CF → tor₀ → tor₁`, with jet-level exactness checks.
//!
//! Variables are `z^{i0} ↦ i` and `z^{i1} ↦ 4 + i` for `i = 0..3`. Three-index
//! fields are stored on increasing triples `(0,1,2), (0,1,3), (0,2,3), (1,2,3)`.

use serde::Serialize;

use crate::complexbuilder::{exactness_check, ComplexChain, ExactnessReport, SymbolMatrix};
use crate::error::Result;
use crate::exactalg::{choose, ExactScalar, RankPolicy};
use crate::forms::{sort_with_sign, torsion_residuals, AlternatingArray};
use crate::jets::{jet_dim, MultiIndex, PDESystem};
use crate::poly::Poly;
use crate::wfamily::make_wsystem;

pub const NVARS: usize = 8;

pub const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

pub fn z0(i: usize) -> usize {
    i
}

pub fn z1(i: usize) -> usize {
    4 + i
}

pub fn variable_names() -> Vec<String> {
    (0..4).map(|i| format!("z{i}0")).chain((0..4).map(|i| format!("z{i}1"))).collect()
}

/// `∂φ⁰/∂z^{i0} + ∂φ¹/∂z^{i1} = 0`, `i = 0..3`.
pub fn cf_system() -> PDESystem {
    let mut s = make_wsystem(4, 4, &[(1, 1), (2, 2), (3, 3), (4, 4)]).expect("diagonal pairs").base;
    s.label = "cauchy-fueter".into();
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFPair {
    pub phi0: Poly,
    pub phi1: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda3Field {
    /// Components on [`TRIPLES`].
    pub components: [Poly; 4],
}

impl Lambda3Field {
    pub fn zero() -> Self {
        Lambda3Field { components: std::array::from_fn(|_| Poly::zero(NVARS)) }
    }

    pub fn get(&self, idx: [usize; 3]) -> Poly {
        match sort_with_sign(idx.to_vec()) {
            None => Poly::zero(NVARS),
            Some((key, sign)) => {
                let pos = TRIPLES.iter().position(|t| t[..] == key[..]).expect("triple in range");
                self.components[pos].scale(&ExactScalar::from_int(sign))
            }
        }
    }

    pub fn to_full(&self) -> AlternatingArray {
        let values: Vec<(Vec<usize>, Poly)> =
            TRIPLES.iter().zip(&self.components).map(|(t, p)| (t.to_vec(), p.clone())).collect();
        AlternatingArray::from_increasing(4, 3, NVARS, &values)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }
}

/// The `z^{·0}` and `z^{·1}` blocks of the four-index condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda4Pair {
    pub block0: Poly,
    pub block1: Poly,
}

impl Lambda4Pair {
    pub fn is_zero(&self) -> bool {
        self.block0.is_zero() && self.block1.is_zero()
    }
}

pub fn cf_apply(p: &CFPair) -> [Poly; 4] {
    std::array::from_fn(|i| &p.phi0.derivative(z0(i)) + &p.phi1.derivative(z1(i)))
}

/// `(input component, sign, first variable, second variable)` terms of each row of tor₀.
fn tor0_terms(row: usize) -> [(usize, i64, usize, usize); 6] {
    let [i, th, k] = TRIPLES[row];
    [
        (k, 1, z1(i), z0(th)),
        (k, -1, z0(i), z1(th)),
        (i, 1, z0(k), z1(th)),
        (i, -1, z1(k), z0(th)),
        (th, 1, z0(i), z1(k)),
        (th, -1, z1(i), z0(k)),
    ]
}

/// `φ_{iθk} = ∂²Φ_k/∂z^{i1}∂z^{θ0} - ∂²Φ_k/∂z^{i0}∂z^{θ1} + ∂²Φ_i/∂z^{k0}∂z^{θ1}
///  - ∂²Φ_i/∂z^{k1}∂z^{θ0} + ∂²Φ_θ/∂z^{i0}∂z^{k1} - ∂²Φ_θ/∂z^{i1}∂z^{k0}`.
pub fn tor0_apply(phi: &[Poly; 4]) -> Lambda3Field {
    Lambda3Field {
        components: std::array::from_fn(|row| {
            let mut acc = Poly::zero(NVARS);
            for (c, s, a, b) in tor0_terms(row) {
                acc = &acc + &phi[c].derivative(a).derivative(b).scale(&ExactScalar::from_int(s));
            }
            acc
        }),
    }
}

/// `(stored component, sign, variable)` terms of block `d` of tor₁ for `(i, θ, k, l) = (0, 1, 2, 3)`.
fn tor1_terms(d: usize) -> Vec<(usize, i64, usize)> {
    let var = |i: usize| if d == 0 { z0(i) } else { z1(i) };
    let raw: [([usize; 3], i64, usize); 4] =
        [([0, 1, 2], 1, 3), ([3, 1, 2], -1, 0), ([3, 0, 2], 1, 1), ([3, 0, 1], -1, 2)];
    raw.iter()
        .map(|(idx, s, l)| {
            let (key, sign) = sort_with_sign(idx.to_vec()).expect("distinct");
            let pos = TRIPLES.iter().position(|t| t[..] == key[..]).expect("triple");
            (pos, s * sign, var(*l))
        })
        .collect()
}

/// `∂φ_{iθk}/∂z^{l·} - ∂φ_{lθk}/∂z^{i·} + ∂φ_{lik}/∂z^{θ·} - ∂φ_{liθ}/∂z^{k·}` at `(0, 1, 2, 3)`, both blocks.
pub fn tor1_apply(phi: &Lambda3Field) -> Lambda4Pair {
    let block = |d: usize| {
        tor1_terms(d).into_iter().fold(Poly::zero(NVARS), |acc, (c, s, v)| {
            &acc + &phi.components[c].derivative(v).scale(&ExactScalar::from_int(s))
        })
    };
    Lambda4Pair { block0: block(0), block1: block(1) }
}

/// Same as [`tor1_apply`] through the general four-index residual family.
pub fn tor1_via_residuals(phi: &Lambda3Field) -> Result<Lambda4Pair> {
    let full = phi.to_full();
    Ok(Lambda4Pair {
        block0: torsion_residuals(&full, 0)?.get(&[0, 1, 2, 3]).clone(),
        block1: torsion_residuals(&full, 1)?.get(&[0, 1, 2, 3]).clone(),
    })
}

fn monomial2(a: usize, b: usize) -> Poly {
    Poly::monomial(MultiIndex::unit(NVARS, a).add_unit(b), ExactScalar::one())
}

pub fn cf_symbol() -> SymbolMatrix {
    SymbolMatrix::from_system(&cf_system())
}

/// Symbol of tor₀: 4×4, quadratic, rows of grade 3 over columns of grade 1.
pub fn tor0_symbol() -> SymbolMatrix {
    let rows = (0..4)
        .map(|row| {
            let mut r = vec![Poly::zero(NVARS); 4];
            for (c, s, a, b) in tor0_terms(row) {
                r[c] = &r[c] + &monomial2(a, b).scale(&ExactScalar::from_int(s));
            }
            r
        })
        .collect();
    SymbolMatrix::new(NVARS, rows, vec![3; 4], vec![1; 4]).expect("homogeneous")
}

/// Symbol of tor₁: 2×4, linear, rows of grade 4 over columns of grade 3.
pub fn tor1_symbol() -> SymbolMatrix {
    let rows = (0..2)
        .map(|d| {
            let mut r = vec![Poly::zero(NVARS); 4];
            for (c, s, v) in tor1_terms(d) {
                r[c] = &r[c] + &Poly::var(NVARS, v).scale(&ExactScalar::from_int(s));
            }
            r
        })
        .collect();
    SymbolMatrix::new(NVARS, rows, vec![4; 2], vec![3; 4]).expect("homogeneous")
}

/// `CF, tor₀, tor₁` as a verified chain.
pub fn cf_chain() -> Result<ComplexChain> {
    ComplexChain::from_operators(vec![cf_symbol(), tor0_symbol(), tor1_symbol()])
}

/// `4·C(k+7, 4) + 2·C(k+7, 3)`: homogeneous solutions of degree `k + 4`.
pub fn cf_kernel_formula(k: u32) -> u64 {
    let t = k as i64 + 7;
    4 * choose(t, 4) + 2 * choose(t, 3)
}

#[derive(Clone, Debug, Serialize)]
pub struct CfExactness {
    pub k: u32,
    /// Jet space dimensions, first space to last.
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    /// Kernel of CF on degree `k + 4` jets.
    pub kernel_cf: usize,
    pub kernel_formula: u64,
    pub exact: bool,
    pub surjective: bool,
    pub report: ExactnessReport,
}

impl CfExactness {
    pub fn passed(&self) -> bool {
        self.exact && self.surjective && self.kernel_cf as u64 == self.kernel_formula
    }
}

/// Ranks of `S²_{k+4} → S⁴_{k+3} → S⁴_{k+1} → S²_k` and their exactness.
pub fn exactness_dims(k: u32, policy: &RankPolicy, max_rows: usize) -> Result<CfExactness> {
    let chain = cf_chain()?;
    let report = exactness_check(&chain, k, policy, max_rows)?;
    let dims: Vec<usize> = report.slots.iter().map(|s| s.dim).collect();
    let ranks: Vec<usize> = report.ranks.iter().map(|r| r.rank).collect();
    Ok(CfExactness {
        k,
        kernel_cf: report.slots[0].kernel_dim.expect("first slot has an outgoing map"),
        kernel_formula: cf_kernel_formula(k),
        exact: report.exact,
        surjective: report.surjective,
        dims,
        ranks,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCertificate {
    /// `P(k)` for `k = 0..=7`.
    pub values: Vec<i128>,
    /// 8th forward difference of `P` over `k = 0..=8`.
    pub eighth_difference: i128,
    /// Degree bound of each summand of `P` in `k`.
    pub degree_bound: u32,
    pub passed: bool,
}

/// `P(k) = dim S⁴_{k+1} - dim S⁴_{k+3} + dim S²_{k+4} - (4·C(k+7,4) + 2·C(k+7,3)) - dim S²_k` in 8 variables.
pub fn cf_alternating_defect(k: u32) -> i128 {
    let s = |p: usize, d: u32| jet_dim(p, d, NVARS) as i128;
    s(4, k + 1) - s(4, k + 3) + s(2, k + 4) - cf_kernel_formula(k) as i128 - s(2, k)
}

pub fn degree7_certificate() -> DegreeCertificate {
    let values: Vec<i128> = (0..=7).map(cf_alternating_defect).collect();
    let mut diff: Vec<i128> = (0..=8).map(cf_alternating_defect).collect();
    for _ in 0..8 {
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let eighth_difference = diff[0];
    DegreeCertificate {
        passed: values.iter().all(|&v| v == 0) && eighth_difference == 0,
        values,
        eighth_difference,
        degree_bound: 7,
    }
}
