use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactalg::{ExactMatrix, ExactScalar};
use crate::exec;
use crate::jets::{MonomialBasis, MultiIndex, PDESystem};
use crate::poly::Poly;

/// Matrix of homogeneous polynomials in the symbol variables, acting as a
/// constant-coefficient differential operator from `cols` unknowns to `rows`
/// outputs. Rows and columns carry integer grades; entry `(m, i)` is
/// homogeneous of degree `row_degrees[m] - col_degrees[i]` (or zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMatrix {
    nvars: usize,
    entries: Vec<Vec<Poly>>,
    row_degrees: Vec<u32>,
    col_degrees: Vec<u32>,
}

impl SymbolMatrix {
    pub fn new(nvars: usize, entries: Vec<Vec<Poly>>, row_degrees: Vec<u32>, col_degrees: Vec<u32>) -> Result<Self> {
        if entries.len() != row_degrees.len() {
            return Err(Error::Shape(format!("{} rows but {} row degrees", entries.len(), row_degrees.len())));
        }
        for (m, row) in entries.iter().enumerate() {
            if row.len() != col_degrees.len() {
                return Err(Error::Shape(format!("row {m} has {} entries, expected {}", row.len(), col_degrees.len())));
            }
            for (i, e) in row.iter().enumerate() {
                if e.nvars() != nvars {
                    return Err(Error::Shape(format!("entry ({m},{i}) has {} variables, expected {nvars}", e.nvars())));
                }
                if e.is_zero() {
                    continue;
                }
                let ok = row_degrees[m]
                    .checked_sub(col_degrees[i])
                    .is_some_and(|d| e.is_homogeneous_of(d));
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({m},{i}) is not homogeneous of degree {} - {}",
                        row_degrees[m], col_degrees[i]
                    )));
                }
            }
        }
        Ok(SymbolMatrix { nvars, entries, row_degrees, col_degrees })
    }

    /// Rows `σ^m_i(ξ) = Σ_j a^m_{ij} ξ_j`, rows of grade 1 over columns of grade 0.
    pub fn from_system(sys: &PDESystem) -> Self {
        let n = sys.variables();
        let entries = (0..sys.equations())
            .map(|m| {
                (0..sys.unknowns())
                    .map(|i| {
                        Poly::from_terms(n, (0..n).map(|j| (MultiIndex::unit(n, j), sys.coeff(m, i, j).clone())))
                    })
                    .collect()
            })
            .collect();
        SymbolMatrix {
            nvars: n,
            entries,
            row_degrees: vec![1; sys.equations()],
            col_degrees: vec![0; sys.unknowns()],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_degrees.len()
    }

    pub fn row_degrees(&self) -> &[u32] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[u32] {
        &self.col_degrees
    }

    pub fn entry(&self, m: usize, i: usize) -> &Poly {
        &self.entries[m][i]
    }

    pub fn row(&self, m: usize) -> &[Poly] {
        &self.entries[m]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Poly::is_zero)
    }

    /// Differential order when every row has the same grade gap to every column.
    pub fn uniform_order(&self) -> Option<u32> {
        let mut orders = self
            .row_degrees
            .iter()
            .flat_map(|r| self.col_degrees.iter().map(move |c| r.checked_sub(*c)));
        let first = orders.next()??;
        orders.all(|o| o == Some(first)).then_some(first)
    }

    /// Order of the operator: the largest grade gap carried by a nonzero entry.
    pub fn order(&self) -> u32 {
        let mut best = 0;
        for (m, row) in self.entries.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    best = best.max(self.row_degrees[m] - self.col_degrees[i]);
                }
            }
        }
        best
    }

    /// Coefficient vectors of the rows of grade `deg`, over `(column, monomial)` pairs.
    fn rows_at_grade(&self, deg: u32) -> ExactMatrix {
        let mut offsets = Vec::with_capacity(self.ncols());
        let mut bases = Vec::with_capacity(self.ncols());
        let mut total = 0;
        for &c in &self.col_degrees {
            offsets.push(total);
            let b = deg.checked_sub(c).map(|d| MonomialBasis::shared(self.nvars, d));
            total += b.as_ref().map_or(0, |b| b.len());
            bases.push(b);
        }
        let rows: Vec<&Vec<Poly>> =
            self.entries.iter().zip(&self.row_degrees).filter(|(_, &r)| r == deg).map(|(row, _)| row).collect();
        let mut trip = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                if let Some(b) = &bases[i] {
                    for (k, v) in e.to_coords(b).expect("homogeneous entry") {
                        trip.push((r, offsets[i] + k, v));
                    }
                }
            }
        }
        ExactMatrix::from_triplets(rows.len(), total, trip)
    }

    /// Whether both matrices span the same space of rows in every grade.
    pub fn row_space_equal(&self, other: &SymbolMatrix) -> Result<bool> {
        if self.nvars != other.nvars || self.col_degrees != other.col_degrees {
            return Err(Error::Shape("row spaces live over different columns".into()));
        }
        let mut grades: Vec<u32> = self.row_degrees.iter().chain(&other.row_degrees).copied().collect();
        grades.sort_unstable();
        grades.dedup();
        for g in grades {
            let a = self.rows_at_grade(g);
            let b = other.rows_at_grade(g);
            let ra = a.rank();
            if ra != b.rank() || ra != a.vstack(&b)?.rank() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Polynomial product `self · inner`; needs `self`'s column grades to match `inner`'s row grades.
    pub fn compose(&self, inner: &SymbolMatrix) -> Result<SymbolMatrix> {
        if self.col_degrees != inner.row_degrees || self.nvars != inner.nvars {
            return Err(Error::Shape("composition of incompatible operators".into()));
        }
        let entries = exec::map((0..self.nrows()).collect(), |k| {
            (0..inner.ncols())
                .map(|i| {
                    (0..self.ncols()).fold(Poly::zero(self.nvars), |acc, m| acc + &self.entries[k][m] * &inner.entries[m][i])
                })
                .collect::<Vec<Poly>>()
        });
        SymbolMatrix::new(self.nvars, entries, self.row_degrees.clone(), inner.col_degrees.clone())
    }

    /// Value at a covector.
    pub fn eval(&self, xi: &[ExactScalar]) -> ExactMatrix {
        let dense: Vec<Vec<ExactScalar>> = self.entries.iter().map(|r| r.iter().map(|e| e.eval(xi)).collect()).collect();
        if dense.is_empty() {
            return ExactMatrix::zeros(0, self.ncols());
        }
        ExactMatrix::from_dense(&dense)
    }

    /// Rank over the fraction field, estimated as the max rank at a few random integer covectors.
    pub fn generic_rank(&self, seed: u64) -> usize {
        if self.nrows() == 0 || self.ncols() == 0 {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let full = self.nrows().min(self.ncols());
        let mut best = 0;
        for _ in 0..4 {
            let xi: Vec<ExactScalar> = (0..self.nvars).map(|_| ExactScalar::from_int(rng.gen_range(-1000..=1000))).collect();
            best = best.max(self.eval(&xi).rank());
            if best == full {
                break;
            }
        }
        best
    }

    /// Drops the first `j` symbol variables (sets them to zero).
    pub fn restrict(&self, j: usize) -> SymbolMatrix {
        let n = self.nvars - j;
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        Poly::from_terms(
                            n,
                            e.terms()
                                .filter(|(m, _)| m.exponents()[..j].iter().all(|&x| x == 0))
                                .map(|(m, c)| (MultiIndex::new(m.exponents()[j..].to_vec()), c.clone())),
                        )
                    })
                    .collect()
            })
            .collect();
        SymbolMatrix { nvars: n, entries, row_degrees: self.row_degrees.clone(), col_degrees: self.col_degrees.clone() }
    }

    /// Applies the operator: `out_m = Σ_i entry(m,i)(∂) u_i`.
    pub fn apply(&self, u: &[Poly]) -> Result<Vec<Poly>> {
        if u.len() != self.ncols() {
            return Err(Error::Shape(format!("operator takes {} inputs, got {}", self.ncols(), u.len())));
        }
        Ok(self
            .entries
            .iter()
            .map(|row| {
                let mut out = Poly::zero(self.nvars);
                for (e, ui) in row.iter().zip(u) {
                    for (m, c) in e.terms() {
                        out = out + ui.derivative_multi(m).scale(c);
                    }
                }
                out
            })
            .collect())
    }

    /// Jet-level matrix of the operator at total grade `t`: unknown `i` lives
    /// in homogeneous degree `t - col_degrees[i]`, output `m` in
    /// `t - row_degrees[m]`. Slots with negative degree are empty.
    pub fn jet_matrix(&self, t: u32) -> ExactMatrix {
        let n = self.nvars;
        let layout = |grades: &[u32]| -> (Vec<Option<std::sync::Arc<MonomialBasis>>>, Vec<usize>, usize) {
            let mut offs = Vec::with_capacity(grades.len());
            let mut bases = Vec::with_capacity(grades.len());
            let mut total = 0;
            for &g in grades {
                offs.push(total);
                let b = t.checked_sub(g).map(|d| MonomialBasis::shared(n, d));
                total += b.as_ref().map_or(0, |b| b.len());
                bases.push(b);
            }
            (bases, offs, total)
        };
        let (src, src_off, ncols) = layout(&self.col_degrees);
        let (tgt, tgt_off, nrows) = layout(&self.row_degrees);
        let chunks = exec::map((0..self.ncols()).collect(), |i| {
            let mut trip = Vec::new();
            let Some(sb) = &src[i] else { return trip };
            for (m, row) in self.entries.iter().enumerate() {
                let Some(tb) = &tgt[m] else { continue };
                let e = &row[i];
                if e.is_zero() {
                    continue;
                }
                for (col, mono) in sb.monomials().iter().enumerate() {
                    for (d, c) in e.terms() {
                        let Some(rest) = mono.checked_sub(d) else { continue };
                        let falling: i64 = mono
                            .exponents()
                            .iter()
                            .zip(d.exponents())
                            .map(|(&a, &b)| ((a - b + 1)..=a).map(i64::from).product::<i64>())
                            .product();
                        let r = tb.index_of(&rest).expect("lowered monomial in target basis");
                        trip.push((tgt_off[m] + r, src_off[i] + col, c * ExactScalar::from_int(falling)));
                    }
                }
            }
            trip
        });
        ExactMatrix::from_triplets(nrows, ncols, chunks.into_iter().flatten())
    }

    /// Renders row `m` as a differential condition: derivatives appear as
    /// subscripts, e.g. `u_{x1,x2} - 2*v_{x3}`.
    pub fn display_row(&self, m: usize, var_names: &[String], unknown_names: &[String]) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (i, e) in self.entries[m].iter().enumerate() {
            let mut terms: Vec<_> = e.terms().collect();
            terms.sort_by(|a, b| a.0.cmp(b.0));
            for (mono, c) in terms {
                let subs: Vec<&str> = mono.to_multiset().iter().map(|&v| var_names[v].as_str()).collect();
                let field = if subs.is_empty() {
                    unknown_names[i].clone()
                } else {
                    format!("{}_{{{}}}", unknown_names[i], subs.join(","))
                };
                let mag = c.abs();
                let body = if mag.is_one() { field } else { format!("{mag}*{field}") };
                parts.push((c.is_negative(), body));
            }
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (neg, body)) in parts.into_iter().enumerate() {
            match (k, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&body);
        }
        s
    }
}

impl fmt::Display for SymbolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        let unk: Vec<String> = (1..=self.ncols()).map(|i| format!("u{i}")).collect();
        for m in 0..self.nrows() {
            writeln!(f, "{} = 0", self.display_row(m, &vars, &unk))?;
        }
        Ok(())
    }
}
