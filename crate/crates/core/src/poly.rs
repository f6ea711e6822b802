//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::exactalg::ExactScalar;
use crate::jets::{MonomialBasis, MultiIndex};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, ExactScalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: ExactScalar) -> Self {
        Self::monomial(MultiIndex::zero(nvars), c)
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(nvars, i), ExactScalar::one())
    }

    pub fn monomial(m: MultiIndex, c: ExactScalar) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, ExactScalar)>>(nvars: usize, it: I) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Coefficient vector against a monomial basis; `None` if some term lies outside it.
    pub fn to_coords(&self, basis: &MonomialBasis) -> Option<Vec<(usize, ExactScalar)>> {
        let mut out: Vec<(usize, ExactScalar)> =
            self.terms.iter().map(|(m, c)| basis.index_of(m).map(|i| (i, c.clone()))).collect::<Option<_>>()?;
        out.sort_by_key(|e| e.0);
        Some(out)
    }

    pub fn from_coords(basis: &MonomialBasis, coords: &[(usize, ExactScalar)]) -> Self {
        Poly::from_terms(basis.nvars(), coords.iter().map(|(i, c)| (basis.monomial(*i).clone(), c.clone())))
    }

    /// Homogeneous polynomial of degree `deg`; each monomial is kept with probability `density`
    /// and gets an integer coefficient in `[-bound, bound]`.
    pub fn random_homogeneous<R: Rng>(nvars: usize, deg: u32, bound: i64, density: f64, rng: &mut R) -> Self {
        let basis = MonomialBasis::shared(nvars, deg);
        let mut p = Poly::zero(nvars);
        for m in basis.monomials() {
            if rng.gen_bool(density) {
                p.add_term(m.clone(), ExactScalar::from_int(rng.gen_range(-bound..=bound)));
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> ExactScalar {
        self.terms.get(m).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn add_term(&mut self, m: MultiIndex, c: ExactScalar) {
        assert_eq!(m.nvars(), self.nvars, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// The common degree when all terms share it (the zero polynomial is homogeneous of any degree).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(MultiIndex::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                out.add_term(m.sub_unit(i), c * ExactScalar::from_int(e as i64));
            }
        }
        out
    }

    /// Iterated partial derivative `∂^{m}`.
    pub fn derivative_multi(&self, m: &MultiIndex) -> Self {
        let mut out = self.clone();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                out = out.derivative(i);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &MultiIndex) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, v)| (k.add(m), v.clone())).collect() }
    }

    pub fn eval(&self, point: &[ExactScalar]) -> ExactScalar {
        assert_eq!(point.len(), self.nvars);
        self.terms.iter().map(|(m, c)| c * m.eval(point)).sum()
    }

    /// Keeps only the terms of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(a.0.cmp(b.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.display_with(names);
            if mono.is_empty() {
                s.push_str(&mag.to_string());
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{mag}*{mono}"));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.add(b), x * y);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
