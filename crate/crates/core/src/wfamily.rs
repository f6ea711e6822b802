//! The family `∂φ⁰/∂z^{j₀0} + ∂φ¹/∂z^{j1} = φ^{j}` for `(j₀, j)` in an index set,
//! on `C^n × C^m` with coordinates `z^{10}..z^{n0}, z^{11}..z^{m1}`.
//!
//! Variable `z^{i0}` is column `i - 1` and `z^{j1}` is column `n + j - 1`.
//! Equations are ordered by increasing `j`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::complexbuilder::SymbolMatrix;
use crate::error::{Error, Result};
use crate::exactalg::{choose, ExactScalar};
use crate::jets::{tableau_dim, MultiIndex, PDESystem};
use crate::poly::Poly;

/// Index set with `j ↦ j₀` a bijection onto its image; pairs kept sorted by `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexSetI {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
}

impl IndexSetI {
    pub fn new(n: usize, m: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument("both variable blocks must be nonempty".into()));
        }
        let mut seen_j = std::collections::BTreeMap::new();
        let mut seen_j0 = std::collections::BTreeMap::new();
        let mut uniq = BTreeSet::new();
        for &(j0, j) in pairs {
            if !(1..=n).contains(&j0) || !(1..=m).contains(&j) {
                return Err(Error::InvalidArgument(format!("pair ({j0},{j}) outside [1,{n}]x[1,{m}]")));
            }
            if !uniq.insert((j0, j)) {
                continue;
            }
            if let Some(other) = seen_j.insert(j, j0) {
                return Err(Error::InvalidArgument(format!(
                    "pairs ({other},{j}) and ({j0},{j}) share j={j}: subtracting the two equations expresses \
                     the difference of right-hand sides through φ⁰ alone, after which both equations coincide; \
                     keep one pair per j"
                )));
            }
            if let Some(other) = seen_j0.insert(j0, j) {
                return Err(Error::InvalidArgument(format!(
                    "pairs ({j0},{other}) and ({j0},{j}) share j₀={j0}: the same reduction through φ¹ makes \
                     one equation redundant; keep one pair per j₀"
                )));
            }
        }
        let mut pairs: Vec<(usize, usize)> = uniq.into_iter().collect();
        pairs.sort_by_key(|&(j0, j)| (j, j0));
        Ok(IndexSetI { n, m, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// `{j : (j₀, j) ∈ I}`, increasing.
    pub fn upper(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// `{j₀ : (j₀, j) ∈ I}`, increasing.
    pub fn lower(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().map(|p| p.0).collect();
        v.sort_unstable();
        v
    }

    /// `j₀ = b(j)`.
    pub fn partner(&self, j: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == j).map(|p| p.0)
    }

    /// Equation index of the pair containing `j`.
    pub fn equation_of(&self, j: usize) -> Option<usize> {
        self.pairs.iter().position(|p| p.1 == j)
    }

    pub fn var0(&self, i: usize) -> usize {
        i - 1
    }

    pub fn var1(&self, j: usize) -> usize {
        self.n + j - 1
    }

    pub fn variable_names(&self) -> Vec<String> {
        (1..=self.n).map(|i| format!("z{i}0")).chain((1..=self.m).map(|j| format!("z{j}1"))).collect()
    }

    /// Relabeling to `{(n-k, m-k) : k = 0..t-1}`; returns the new set and the variable permutation
    /// (`perm[old column] = new column`).
    pub fn canonical_relabeling(&self) -> (IndexSetI, Vec<usize>) {
        let (n, m, t) = (self.n, self.m, self.t());
        let mut map0 = vec![0; n + 1];
        let mut map1 = vec![0; m + 1];
        for (k, &(j0, j)) in self.pairs.iter().rev().enumerate() {
            map0[j0] = n - k;
            map1[j] = m - k;
        }
        let mut next = 1;
        for i in 1..=n {
            if map0[i] == 0 {
                map0[i] = next;
                next += 1;
            }
        }
        next = 1;
        for j in 1..=m {
            if map1[j] == 0 {
                map1[j] = next;
                next += 1;
            }
        }
        let pairs: Vec<(usize, usize)> = (0..t).map(|k| (n - k, m - k)).collect();
        let perm = (1..=n).map(|i| map0[i] - 1).chain((1..=m).map(|j| n + map1[j] - 1)).collect();
        (IndexSetI::new(n, m, &pairs).expect("canonical pairs are valid"), perm)
    }
}

impl fmt::Display for IndexSetI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "n={}, m={}, pairs={{{}}}", self.n, self.m, p.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct WSystem {
    pub base: PDESystem,
    pub index_set: IndexSetI,
}

pub fn make_wsystem(n: usize, m: usize, pairs: &[(usize, usize)]) -> Result<WSystem> {
    let index_set = IndexSetI::new(n, m, pairs)?;
    let terms: Vec<(usize, usize, usize, ExactScalar)> = index_set
        .pairs()
        .iter()
        .enumerate()
        .flat_map(|(e, &(j0, j))| [(e, 0, index_set.var0(j0), ExactScalar::one()), (e, 1, index_set.var1(j), ExactScalar::one())])
        .collect();
    let label = format!("wfamily {index_set}");
    let base = PDESystem::from_terms(index_set.t(), 2, n + m, terms, &label)?;
    Ok(WSystem { base, index_set })
}

/// Whether `(n, m, t)` lies where the counting behind the closed form applies (`m + n ≥ 2t + 1`).
pub fn formula_in_derivation_range(n: usize, m: usize, t: usize) -> bool {
    m + n > 2 * t
}

/// `t·C(q+m+n-t, m+n-t) + 2·C(q+m+n-t, m+n-t-1)`.
pub fn wdim_formula(n: usize, m: usize, t: usize, q: u32) -> Result<u64> {
    if t == 0 || t > n.min(m) {
        return Err(Error::InvalidArgument(format!("t={t} must lie in 1..={}", n.min(m))));
    }
    let r = (m + n - t) as i64;
    let top = q as i64 + r;
    Ok(t as u64 * choose(top, r) + 2 * choose(top, r - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimSource {
    Formula,
    /// Outside the derivation range: computed as a kernel dimension.
    Kernel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WDim {
    pub q: u32,
    pub value: u64,
    pub source: DimSource,
    /// Closed-form value, reported alongside the kernel dimension outside the derivation range.
    pub formula: u64,
}

/// `dim A^q`, from the closed form where its derivation applies and from the kernel otherwise.
pub fn wdim(sys: &WSystem, q: u32) -> Result<WDim> {
    let ix = &sys.index_set;
    let formula = wdim_formula(ix.n(), ix.m(), ix.t(), q)?;
    if formula_in_derivation_range(ix.n(), ix.m(), ix.t()) {
        Ok(WDim { q, value: formula, source: DimSource::Formula, formula })
    } else {
        Ok(WDim { q, value: tableau_dim(&sys.base, q) as u64, source: DimSource::Kernel, formula })
    }
}

/// One second-order condition on the right-hand sides `φ^j`, for an unordered triple of upper indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionCondition {
    pub triple: (usize, usize, usize),
    /// `(equation index, second-order symbol)`; the condition is `Σ σ(∂) φ^{equation} = 0`.
    pub terms: Vec<(usize, Poly)>,
}

impl TorsionCondition {
    /// Row over all equations.
    pub fn symbol_row(&self, t: usize, nvars: usize) -> Vec<Poly> {
        let mut row = vec![Poly::zero(nvars); t];
        for (e, p) in &self.terms {
            row[*e] = &row[*e] + p;
        }
        row
    }

    pub fn display(&self, ix: &IndexSetI) -> String {
        let names = ix.variable_names();
        let mut parts = Vec::new();
        for (e, p) in &self.terms {
            let j = ix.pairs()[*e].1;
            parts.push(format!("({}) phi^{j}", p.display_with(&names)));
        }
        format!("{} = 0", parts.join(" + "))
    }
}

fn quad(nvars: usize, a: usize, b: usize, c: usize, d: usize) -> Poly {
    let one = ExactScalar::one();
    let ab = MultiIndex::unit(nvars, a).add_unit(b);
    let cd = MultiIndex::unit(nvars, c).add_unit(d);
    &Poly::monomial(ab, one.clone()) - &Poly::monomial(cd, one)
}

/// Condition for an ordered triple `(j, j', k)`:
/// `(φ^j_{k₀0,j'1} - φ^j_{j'₀0,k1}) + (φ^{j'}_{j₀0,k1} - φ^{j'}_{k₀0,j1}) + (φ^k_{j'₀0,j1} - φ^k_{j₀0,j'1})`.
pub fn torsion_condition(ix: &IndexSetI, j: usize, jp: usize, k: usize) -> Result<TorsionCondition> {
    let nv = ix.n() + ix.m();
    let look = |x: usize| {
        ix.partner(x)
            .map(|x0| (ix.equation_of(x).expect("paired"), ix.var0(x0), ix.var1(x)))
            .ok_or_else(|| Error::InvalidArgument(format!("{x} is not an upper index of the set")))
    };
    let (ej, j0, j1) = look(j)?;
    let (ejp, jp0, jp1) = look(jp)?;
    let (ek, k0, k1) = look(k)?;
    if ej == ejp || ej == ek || ejp == ek {
        return Err(Error::InvalidArgument("triple must have distinct entries".into()));
    }
    let terms = vec![
        (ej, quad(nv, k0, jp1, jp0, k1)),
        (ejp, quad(nv, j0, k1, k0, j1)),
        (ek, quad(nv, jp0, j1, j0, jp1)),
    ];
    Ok(TorsionCondition { triple: (j, jp, k), terms })
}

/// One condition per 3-subset of the upper indices, in increasing order.
pub fn wtorsion_conditions(sys: &WSystem) -> Vec<TorsionCondition> {
    let up = sys.index_set.upper();
    let mut out = Vec::new();
    for a in 0..up.len() {
        for b in a + 1..up.len() {
            for c in b + 1..up.len() {
                out.push(torsion_condition(&sys.index_set, up[a], up[b], up[c]).expect("valid triple"));
            }
        }
    }
    out
}

/// The conditions as a second-order operator on the right-hand sides.
pub fn torsion_symbol(sys: &WSystem) -> Result<SymbolMatrix> {
    let ix = &sys.index_set;
    let nv = ix.n() + ix.m();
    let conds = wtorsion_conditions(sys);
    let rows: Vec<Vec<Poly>> = conds.iter().map(|c| c.symbol_row(ix.t(), nv)).collect();
    let k = rows.len();
    SymbolMatrix::new(nv, rows, vec![3; k], vec![1; ix.t()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::change_coordinates;
    use crate::jets::CoordinateChange;
    use crate::exactalg::ExactMatrix;

    #[test]
    fn index_set_rules() {
        let e = IndexSetI::new(2, 2, &[(1, 1), (2, 1)]).unwrap_err().to_string();
        assert!(e.contains("share j=1"), "{e}");
        let e = IndexSetI::new(2, 2, &[(1, 1), (1, 2)]).unwrap_err().to_string();
        assert!(e.contains("share j₀=1"), "{e}");
        assert!(IndexSetI::new(2, 2, &[(3, 1)]).is_err());
        let ix = IndexSetI::new(3, 3, &[(3, 1), (1, 2)]).unwrap();
        assert_eq!(ix.upper(), vec![1, 2]);
        assert_eq!(ix.lower(), vec![1, 3]);
        assert_eq!(ix.partner(1), Some(3));
    }

    #[test]
    fn single_and_cf() {
        let w = make_wsystem(1, 1, &[(1, 1)]).unwrap();
        assert_eq!(w.base.equations(), 1);
        assert_eq!(w.base.equation_terms(0).len(), 2);
        let cf = make_wsystem(4, 4, &[(1, 1), (2, 2), (3, 3), (4, 4)]).unwrap();
        for i in 0..4 {
            assert!(cf.base.coeff(i, 0, i).is_one() && cf.base.coeff(i, 1, 4 + i).is_one());
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(wdim_formula(4, 4, 4, 0).unwrap(), 12);
        assert_eq!(wdim_formula(4, 4, 4, 1).unwrap(), 40);
        assert_eq!(wdim_formula(2, 2, 1, 0).unwrap(), 7);
        assert!(wdim_formula(2, 2, 3, 0).is_err());
        assert!(wdim_formula(2, 2, 0, 0).is_err());
        assert!(!formula_in_derivation_range(2, 2, 2));
        let w = make_wsystem(2, 2, &[(1, 1), (2, 2)]).unwrap();
        let d = wdim(&w, 1).unwrap();
        assert_eq!(d.source, DimSource::Kernel);
        assert_eq!(d.value, d.formula);
    }

    #[test]
    fn relabeling_preserves_dimensions() {
        let w = make_wsystem(3, 4, &[(1, 2), (3, 1)]).unwrap();
        let (c, perm) = w.index_set.canonical_relabeling();
        assert_eq!(c.pairs(), &[(2, 3), (3, 4)]);
        let mut t = vec![vec![ExactScalar::zero(); 7]; 7];
        for (old, &new) in perm.iter().enumerate() {
            t[old][new] = ExactScalar::one();
        }
        let moved = change_coordinates(&w.base, &CoordinateChange::new(ExactMatrix::from_dense(&t)).unwrap()).unwrap();
        let wc = make_wsystem(3, 4, c.pairs()).unwrap();
        for q in 0..3 {
            assert_eq!(tableau_dim(&moved, q), tableau_dim(&wc.base, q));
        }
    }

    #[test]
    fn conditions_count_and_compose_to_zero() {
        for t in 1..=4 {
            let pairs: Vec<(usize, usize)> = (1..=t).map(|i| (i, i)).collect();
            let w = make_wsystem(4, 4, &pairs).unwrap();
            let conds = wtorsion_conditions(&w);
            assert_eq!(conds.len() as u64, choose(t as i64, 3));
            if t >= 3 {
                let s = torsion_symbol(&w).unwrap();
                assert!(s.compose(&SymbolMatrix::from_system(&w.base)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn conditions_alternate() {
        let w = make_wsystem(3, 3, &[(1, 1), (2, 2), (3, 3)]).unwrap();
        let ix = &w.index_set;
        let base = torsion_condition(ix, 1, 2, 3).unwrap().symbol_row(3, 6);
        let perms = [((2, 1, 3), -1), ((1, 3, 2), -1), ((3, 2, 1), -1), ((2, 3, 1), 1), ((3, 1, 2), 1)];
        for ((a, b, c), s) in perms {
            let row = torsion_condition(ix, a, b, c).unwrap().symbol_row(3, 6);
            let sc = ExactScalar::from_int(s);
            for (x, y) in row.iter().zip(&base) {
                assert_eq!(*x, y.scale(&sc));
            }
        }
    }
}
