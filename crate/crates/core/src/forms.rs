//! Differential forms on `C^N` with homogeneous polynomial coefficients.
//!
//! A form `Σ_I f_I dX^{i_1}∧…∧dX^{i_r}` is stored with strictly increasing
//! index tuples `I`; all `f_I` are homogeneous of one degree `s`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::ExactScalar;
use crate::jets::{MonomialBasis, MultiIndex};
use crate::poly::Poly;

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
pub fn sort_with_sign(mut idx: Vec<usize>) -> Option<(Vec<usize>, i64)> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut k = i;
        while k > 0 && idx[k - 1] > idx[k] {
            idx.swap(k - 1, k);
            sign = -sign;
            k -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((idx, sign))
}

fn increasing_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct PolyForm {
    space_dim: usize,
    form_degree: usize,
    coeff_degree: u32,
    coeffs: BTreeMap<Vec<usize>, Poly>,
}

impl PartialEq for PolyForm {
    fn eq(&self, other: &Self) -> bool {
        self.space_dim == other.space_dim && self.form_degree == other.form_degree && self.coeffs == other.coeffs
    }
}

impl Eq for PolyForm {}

impl PolyForm {
    pub fn zero(space_dim: usize, form_degree: usize, coeff_degree: u32) -> Self {
        PolyForm { space_dim, form_degree, coeff_degree, coeffs: BTreeMap::new() }
    }

    /// Adds `p dX^{idx}` for an arbitrary index order.
    pub fn add_term(&mut self, idx: Vec<usize>, p: &Poly) -> Result<()> {
        if idx.len() != self.form_degree || idx.iter().any(|&i| i >= self.space_dim) {
            return Err(Error::Shape(format!("index {idx:?} does not fit a {}-form on C^{}", self.form_degree, self.space_dim)));
        }
        if p.nvars() != self.space_dim {
            return Err(Error::Shape("coefficient lives in the wrong number of variables".into()));
        }
        if p.is_zero() {
            return Ok(());
        }
        if !p.is_homogeneous_of(self.coeff_degree) {
            return Err(Error::InvalidArgument(format!("coefficient is not homogeneous of degree {}", self.coeff_degree)));
        }
        let Some((key, sign)) = sort_with_sign(idx) else { return Ok(()) };
        let term = p.scale(&ExactScalar::from_int(sign));
        let e = self.coeffs.entry(key).or_insert_with(|| Poly::zero(p.nvars()));
        *e = &*e + &term;
        self.coeffs.retain(|_, c| !c.is_zero());
        Ok(())
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<usize>, Poly)>>(
        space_dim: usize,
        form_degree: usize,
        coeff_degree: u32,
        terms: I,
    ) -> Result<Self> {
        let mut f = PolyForm::zero(space_dim, form_degree, coeff_degree);
        for (idx, p) in terms {
            f.add_term(idx, &p)?;
        }
        Ok(f)
    }

    /// Random form; each coefficient slot is filled with probability `density`.
    pub fn random<R: Rng>(space_dim: usize, form_degree: usize, coeff_degree: u32, density: f64, rng: &mut R) -> Self {
        let mut f = PolyForm::zero(space_dim, form_degree, coeff_degree);
        for idx in increasing_tuples(space_dim, form_degree) {
            if rng.gen_bool(density) {
                let p = Poly::random_homogeneous(space_dim, coeff_degree, 5, 0.6, rng);
                f.add_term(idx, &p).expect("well-formed");
            }
        }
        f
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    pub fn coeff_degree(&self) -> u32 {
        self.coeff_degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs.get(idx).cloned().unwrap_or_else(|| Poly::zero(self.space_dim))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.coeffs.iter()
    }

    pub fn scale(&self, c: &ExactScalar) -> PolyForm {
        let mut out = PolyForm::zero(self.space_dim, self.form_degree, self.coeff_degree);
        if !c.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect();
        }
        out
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm> {
        if self.space_dim != other.space_dim || self.form_degree != other.form_degree {
            return Err(Error::Shape("forms of different type".into()));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if !other.is_zero() && self.coeff_degree != other.coeff_degree {
            return Err(Error::Shape("coefficient degrees differ".into()));
        }
        let mut out = self.clone();
        for (k, p) in &other.coeffs {
            out.add_term(k.clone(), p)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyForm) -> Result<PolyForm> {
        self.add(&other.scale(&ExactScalar::from_int(-1)))
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names: Vec<String> = (1..=self.space_dim).map(|i| format!("x{i}")).collect();
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, p)| {
                let w: Vec<String> = k.iter().map(|i| format!("dX{}", i + 1)).collect();
                let w = if w.is_empty() { String::new() } else { format!(" {}", w.join("^")) };
                format!("({}){w}", p.display_with(&names))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exterior derivative.
pub fn ext_d(f: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(f.space_dim, f.form_degree + 1, f.coeff_degree.saturating_sub(1));
    if f.coeff_degree == 0 {
        return out;
    }
    for (idx, p) in &f.coeffs {
        for l in 0..f.space_dim {
            let dp = p.derivative(l);
            if dp.is_zero() || idx.contains(&l) {
                continue;
            }
            let mut k = Vec::with_capacity(idx.len() + 1);
            k.push(l);
            k.extend_from_slice(idx);
            out.add_term(k, &dp).expect("well-formed");
        }
    }
    out
}

pub fn is_closed(f: &PolyForm) -> bool {
    ext_d(f).is_zero()
}

/// Contraction with the Euler field `Σ x_i ∂/∂x_i`.
pub fn euler_contraction(f: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(f.space_dim, f.form_degree.saturating_sub(1), f.coeff_degree + 1);
    if f.form_degree == 0 {
        return out;
    }
    for (idx, p) in &f.coeffs {
        for (pos, &i) in idx.iter().enumerate() {
            let mut rest = idx.clone();
            rest.remove(pos);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            let term = (p * &Poly::var(f.space_dim, i)).scale(&ExactScalar::from_int(sign));
            out.add_term(rest, &term).expect("well-formed");
        }
    }
    out
}

/// Primitive `u = ι_E f / (s + r)` of a closed form, so that `du = f`.
pub fn koszul_solve(f: &PolyForm) -> Result<PolyForm> {
    let w = f.coeff_degree as usize + f.form_degree;
    if f.form_degree == 0 {
        return Err(Error::InvalidArgument("a 0-form has no primitive".into()));
    }
    if w == 0 {
        return Err(Error::InvalidArgument("weight s + r is zero".into()));
    }
    if !is_closed(f) {
        return Err(Error::InvalidArgument("form is not closed".into()));
    }
    let u = euler_contraction(f).scale(&ExactScalar::new(1, w as i64)?);
    debug_assert_eq!(ext_d(&u), *f);
    Ok(u)
}

/// Arrays `X^k_{(A) v (B)}` on `0..dim`, invariant under permutations inside `A` and inside `B`.
/// Each block holds one shape `(|A|, |B|)`; keys store `A` and `B` sorted.
#[derive(Clone, Debug, Default)]
pub struct SymArray {
    dim: usize,
    blocks: BTreeMap<(usize, usize), HashMap<(usize, Vec<usize>, usize, Vec<usize>), ExactScalar>>,
}

fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

fn multisets(n: usize, len: usize) -> Vec<Vec<usize>> {
    MonomialBasis::shared(n, len as u32).monomials().iter().map(MultiIndex::to_multiset).collect()
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

impl SymArray {
    pub fn new(dim: usize) -> Self {
        SymArray { dim, blocks: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.blocks.keys().copied().collect()
    }

    /// Fills a block from `f(k, A, v, B)` evaluated on every ordered index tuple; rejects `f`
    /// that is not invariant under permutations inside `A` or inside `B`.
    pub fn insert_block<F>(&mut self, a_len: usize, b_len: usize, f: F) -> Result<()>
    where
        F: Fn(usize, &[usize], usize, &[usize]) -> ExactScalar,
    {
        let n = self.dim;
        let mut block = HashMap::new();
        let a_all = ordered_tuples(n, a_len);
        let b_all = ordered_tuples(n, b_len);
        for k in 0..n {
            for v in 0..n {
                for a in &a_all {
                    for b in &b_all {
                        let val = f(k, a, v, b);
                        let key = (k, sorted(a.clone()), v, sorted(b.clone()));
                        match block.get(&key) {
                            Some(old) if *old != val => {
                                return Err(Error::InvalidArgument(format!(
                                    "entry X^{k}_({a:?}) {v} ({b:?}) breaks the declared symmetry of its groups"
                                )))
                            }
                            Some(_) => {}
                            None => {
                                block.insert(key, val);
                            }
                        }
                    }
                }
            }
        }
        block.retain(|_, v| !v.is_zero());
        self.blocks.insert((a_len, b_len), block);
        Ok(())
    }

    /// Block with independent random integer entries in `[-bound, bound]` on the sorted keys.
    pub fn insert_random_block<R: Rng>(&mut self, a_len: usize, b_len: usize, bound: i64, rng: &mut R) {
        let n = self.dim;
        let mut block = HashMap::new();
        for k in 0..n {
            for v in 0..n {
                for a in multisets(n, a_len) {
                    for b in multisets(n, b_len) {
                        let c = ExactScalar::from_int(rng.gen_range(-bound..=bound));
                        if !c.is_zero() {
                            block.insert((k, a.clone(), v, b), c);
                        }
                    }
                }
            }
        }
        self.blocks.insert((a_len, b_len), block);
    }

    pub fn get(&self, k: usize, a: &[usize], v: usize, b: &[usize]) -> Result<ExactScalar> {
        let block = self
            .blocks
            .get(&(a.len(), b.len()))
            .ok_or_else(|| Error::Shape(format!("no block of shape ({}, {})", a.len(), b.len())))?;
        let key = (k, sorted(a.to_vec()), v, sorted(b.to_vec()));
        Ok(block.get(&key).cloned().unwrap_or_else(ExactScalar::zero))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationOutcome {
    HypothesisNotSatisfied,
    Checked { conclusion_closed: bool },
}

fn plus(p: &[usize], x: usize) -> Vec<usize> {
    let mut v = p.to_vec();
    v.push(x);
    v
}

/// 3-form `Σ_{a<b<c} Σ_{|M| = len} c(a, b, c, M) x^M dX^a∧dX^b∧dX^c`.
fn three_form<F>(dim: usize, len: usize, coef: F) -> Result<PolyForm>
where
    F: Fn(usize, usize, usize, &[usize]) -> Result<ExactScalar>,
{
    let mut out = PolyForm::zero(dim, 3, len as u32);
    for idx in increasing_tuples(dim, 3) {
        let mut p = Poly::zero(dim);
        for m in multisets(dim, len) {
            let c = coef(idx[0], idx[1], idx[2], &m)?;
            if !c.is_zero() {
                p.add_term(MultiIndex::from_multiset(dim, &m), c);
            }
        }
        out.add_term(idx, &p)?;
    }
    Ok(out)
}

/// Closedness propagation for symmetric arrays, checked on one instance.
///
/// With `l = |J| ≥ 3` and `l' = |Λ|`, the derived multi-indices are read as
/// `J' = J` minus its last entry, `J''` minus the last two and `J'''` minus
/// the last three. `x` must carry blocks of shape `(l-1, l')` and
/// `(l-2, l'+1)`. Only the prefix `J''` and the length of `Λ` enter: the
/// form variables range over all index values and the monomial `X^{(Λ)}`
/// over all multisets of size `l'`.
///
/// The hypothesis compares the two 3-forms built from the `(l-1, l')` and
/// `(l-2, l'+1)` blocks with prefix `J''`; when they agree, the conclusion
/// form (prefix `J'''`, coefficients of degree `l'+1`) is tested for closedness.
pub fn closedness_propagation_check(x: &SymArray, j: &[usize], lambda: &[usize]) -> Result<PropagationOutcome> {
    let n = x.dim();
    let l = j.len();
    if l < 3 {
        return Err(Error::InvalidArgument("J needs at least three entries".into()));
    }
    if j.iter().chain(lambda).any(|&i| i >= n) {
        return Err(Error::InvalidArgument(format!("indices must lie in 0..{n}")));
    }
    let lp = lambda.len();
    for shape in [(l - 1, lp), (l - 2, lp + 1)] {
        if !x.blocks.contains_key(&shape) {
            return Err(Error::Shape(format!("array lacks the block of shape {shape:?}")));
        }
    }
    let p = &j[..l - 2];
    let q = &j[..l - 3];
    let lhs = three_form(n, lp, |a, b, c, m| {
        Ok(&(&(&x.get(c, &plus(p, b), a, m)? - &x.get(a, &plus(p, b), c, m)?)
            - &(&x.get(c, &plus(p, a), b, m)? - &x.get(b, &plus(p, a), c, m)?))
            + &(&x.get(a, &plus(p, c), b, m)? - &x.get(b, &plus(p, c), a, m)?))
    })?;
    let rhs = three_form(n, lp, |a, b, c, m| {
        Ok(&(&(&x.get(c, p, b, &plus(m, a))? - &x.get(b, p, c, &plus(m, a))?)
            - &(&x.get(c, p, a, &plus(m, b))? - &x.get(a, p, c, &plus(m, b))?))
            + &(&x.get(b, p, a, &plus(m, c))? - &x.get(a, p, b, &plus(m, c))?))
    })?;
    if lhs != rhs {
        return Ok(PropagationOutcome::HypothesisNotSatisfied);
    }
    let concl = three_form(n, lp + 1, |a, b, c, m| {
        Ok(&(&(&x.get(c, &plus(q, a), b, m)? - &x.get(b, &plus(q, a), c, m)?)
            - &(&x.get(c, &plus(q, b), a, m)? - &x.get(a, &plus(q, b), c, m)?))
            + &(&x.get(b, &plus(q, c), a, m)? - &x.get(a, &plus(q, c), b, m)?))
    })?;
    Ok(PropagationOutcome::Checked { conclusion_closed: is_closed(&concl) })
}

/// Full array `T_{i_1…i_r}` over `0..dim`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingArray {
    pub dim: usize,
    pub rank: usize,
    pub entries: Vec<Poly>,
}

impl AlternatingArray {
    pub fn zeros(dim: usize, rank: usize, nvars: usize) -> Self {
        AlternatingArray { dim, rank, entries: vec![Poly::zero(nvars); dim.pow(rank as u32)] }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Poly {
        &self.entries[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], p: Poly) {
        let o = self.offset(idx);
        self.entries[o] = p;
    }

    /// Extends values given on increasing index tuples by antisymmetry.
    pub fn from_increasing(dim: usize, rank: usize, nvars: usize, values: &[(Vec<usize>, Poly)]) -> Self {
        let mut a = AlternatingArray::zeros(dim, rank, nvars);
        for idx in ordered_tuples(dim, rank) {
            if let Some((key, sign)) = sort_with_sign(idx.clone()) {
                if let Some((_, p)) = values.iter().find(|(k, _)| *k == key) {
                    a.set(&idx, p.scale(&ExactScalar::from_int(sign)));
                }
            }
        }
        a
    }

    pub fn is_antisymmetric(&self) -> bool {
        ordered_tuples(self.dim, self.rank).into_iter().all(|idx| match sort_with_sign(idx.clone()) {
            None => self.get(&idx).is_zero(),
            Some((key, sign)) => *self.get(&idx) == self.get(&key).scale(&ExactScalar::from_int(sign)),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }
}

/// `∂φ_{iθk}/∂z^{l·} - ∂φ_{lθk}/∂z^{i·} + ∂φ_{lik}/∂z^{θ·} - ∂φ_{liθ}/∂z^{k·}` for every `(i, θ, k, l)`.
///
/// `φ` is a rank-3 alternating array over `0..dim`; the partial `∂/∂z^{l·}`
/// acts on variable `direction * dim + l`.
pub fn torsion_residuals(phi: &AlternatingArray, direction: usize) -> Result<AlternatingArray> {
    if phi.rank != 3 {
        return Err(Error::Shape("expected a three-index family".into()));
    }
    if direction > 1 {
        return Err(Error::InvalidArgument("direction must be 0 or 1".into()));
    }
    if !phi.is_antisymmetric() {
        return Err(Error::InvalidArgument("family is not antisymmetric in its indices".into()));
    }
    let n = phi.dim;
    let nvars = phi.entries.first().map_or(2 * n, Poly::nvars);
    if nvars < (direction + 1) * n {
        return Err(Error::Shape("too few variables for the chosen block".into()));
    }
    let var = |i: usize| direction * n + i;
    let mut out = AlternatingArray::zeros(n, 4, nvars);
    for idx in ordered_tuples(n, 4) {
        let (i, th, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let r = &(&(&phi.get(&[i, th, k]).derivative(var(l)) - &phi.get(&[l, th, k]).derivative(var(i)))
            + &phi.get(&[l, i, k]).derivative(var(th)))
            - &phi.get(&[l, i, th]).derivative(var(k));
        out.set(&idx, r);
    }
    assert!(out.is_antisymmetric(), "residual family lost antisymmetry");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn one(n: usize) -> Poly {
        Poly::constant(n, ExactScalar::one())
    }

    #[test]
    fn sign_sorting() {
        assert_eq!(sort_with_sign(vec![2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(vec![1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(vec![1, 1]), None);
    }

    #[test]
    fn small_examples() {
        let f = PolyForm::from_terms(2, 1, 1, [(vec![1], x(2, 0))]).unwrap();
        let df = ext_d(&f);
        assert_eq!(df, PolyForm::from_terms(2, 2, 0, [(vec![0, 1], one(2))]).unwrap());
        assert!(is_closed(&df));
        assert!(!is_closed(&PolyForm::from_terms(2, 1, 1, [(vec![0], x(2, 1))]).unwrap()));
        let u = koszul_solve(&df).unwrap();
        let half = ExactScalar::new(1, 2).unwrap();
        let expect =
            PolyForm::from_terms(2, 1, 1, [(vec![1], x(2, 0).scale(&half)), (vec![0], x(2, 1).scale(&-&half))]).unwrap();
        assert_eq!(u, expect);
        assert!(koszul_solve(&PolyForm::from_terms(2, 1, 1, [(vec![0], x(2, 1))]).unwrap()).is_err());
        assert!(koszul_solve(&PolyForm::from_terms(2, 0, 0, [(vec![], one(2))]).unwrap()).is_err());
    }

    #[test]
    fn rejects_inhomogeneous() {
        let mut f = PolyForm::zero(2, 1, 1);
        assert!(f.add_term(vec![0], &(&x(2, 0) + &one(2))).is_err());
        assert!(f.add_term(vec![2], &x(2, 0)).is_err());
    }

    #[test]
    fn random_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(2..=4);
            let r = rng.gen_range(0..=3.min(n));
            let s = rng.gen_range(0..=3);
            let f = PolyForm::random(n, r, s, 0.7, &mut rng);
            assert!(ext_d(&ext_d(&f)).is_zero());
            let back = euler_contraction(&ext_d(&f));
            let lhs = if r == 0 { back } else { ext_d(&euler_contraction(&f)).add(&back).unwrap() };
            assert_eq!(lhs, f.scale(&ExactScalar::from((s as usize + r) as u64)));
            if r < n && s > 0 {
                let df = ext_d(&f);
                let u = koszul_solve(&df).unwrap();
                assert_eq!(ext_d(&u), df);
                assert!(is_closed(&u.sub(&f).unwrap()));
            }
        }
    }

    #[test]
    fn top_forms_are_closed() {
        let f = PolyForm::from_terms(3, 3, 2, [(vec![0, 1, 2], &x(3, 0) * &x(3, 1))]).unwrap();
        assert!(is_closed(&f));
    }

    fn derivative_data(dim: usize, a_len: usize, b_len: usize, us: &[Poly]) -> impl Fn(usize, &[usize], usize, &[usize]) -> ExactScalar + '_ {
        move |k, a, v, b| {
            let mut idx = a.to_vec();
            idx.push(v);
            idx.extend_from_slice(b);
            debug_assert_eq!(idx.len(), a_len + b_len + 1);
            us[k].derivative_multi(&MultiIndex::from_multiset(dim, &idx)).eval(&vec![ExactScalar::zero(); dim])
        }
    }

    #[test]
    fn propagation_instances() {
        let dim = 4;
        let j = [0, 2, 1];
        let lambda = [3];
        let mut zero = SymArray::new(dim);
        zero.insert_block(2, 1, |_, _, _, _| ExactScalar::zero()).unwrap();
        zero.insert_block(1, 2, |_, _, _, _| ExactScalar::zero()).unwrap();
        assert_eq!(closedness_propagation_check(&zero, &j, &lambda).unwrap(), PropagationOutcome::Checked { conclusion_closed: true });

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let us: Vec<Poly> = (0..dim).map(|_| Poly::random_homogeneous(dim, 4, 4, 0.8, &mut rng)).collect();
        let mut genuine = SymArray::new(dim);
        genuine.insert_block(2, 1, derivative_data(dim, 2, 1, &us)).unwrap();
        genuine.insert_block(1, 2, derivative_data(dim, 1, 2, &us)).unwrap();
        assert_eq!(
            closedness_propagation_check(&genuine, &j, &lambda).unwrap(),
            PropagationOutcome::Checked { conclusion_closed: true }
        );

        let mut random = SymArray::new(dim);
        random.insert_random_block(2, 1, 3, &mut rng);
        random.insert_random_block(1, 2, 3, &mut rng);
        assert_eq!(closedness_propagation_check(&random, &j, &lambda).unwrap(), PropagationOutcome::HypothesisNotSatisfied);

        assert!(closedness_propagation_check(&zero, &[0, 1], &lambda).is_err());
        let mut bad = SymArray::new(2);
        assert!(bad.insert_block(2, 0, |_, a, _, _| ExactScalar::from(a[0] as u64)).is_err());
    }

    #[test]
    fn residuals() {
        let nv = 8;
        let zero = AlternatingArray::zeros(4, 3, nv);
        assert!(torsion_residuals(&zero, 0).unwrap().is_zero());
        let single = AlternatingArray::from_increasing(4, 3, nv, &[(vec![0, 1, 2], x(nv, 3))]);
        assert!(single.is_antisymmetric());
        let r = torsion_residuals(&single, 0).unwrap();
        assert_eq!(*r.get(&[0, 1, 2, 3]), one(nv));
        assert!(torsion_residuals(&single, 1).unwrap().is_zero());
        let mut bad = AlternatingArray::zeros(4, 3, nv);
        bad.set(&[0, 1, 2], one(nv));
        assert!(torsion_residuals(&bad, 0).is_err());
    }
}
