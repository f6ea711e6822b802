use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{ExactMatrix, ExactScalar};

/// `numerator / denominator` as a power series in `z`, with `denominator(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSeries {
    pub numerator: Vec<ExactScalar>,
    pub denominator: Vec<ExactScalar>,
    pub verified_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesDisplay {
    pub numerator: String,
    pub denominator: String,
}

fn trim(mut v: Vec<ExactScalar>) -> Vec<ExactScalar> {
    while v.last().is_some_and(ExactScalar::is_zero) {
        v.pop();
    }
    v
}

fn poly_string(c: &[ExactScalar]) -> String {
    let mut s = String::new();
    for (k, a) in c.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        let neg = a.is_negative();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let var = match k {
            0 => String::new(),
            1 => "z".into(),
            _ => format!("z^{k}"),
        };
        if var.is_empty() {
            s.push_str(&mag.to_string());
        } else if mag.is_one() {
            s.push_str(&var);
        } else {
            s.push_str(&format!("{mag}{var}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl RationalSeries {
    /// First `count` Taylor coefficients.
    pub fn terms(&self, count: usize) -> Vec<ExactScalar> {
        let d = &self.denominator;
        let mut out: Vec<ExactScalar> = Vec::with_capacity(count);
        for t in 0..count {
            let mut v = self.numerator.get(t).cloned().unwrap_or_else(ExactScalar::zero);
            for k in 1..d.len().min(t + 1) {
                v -= &d[k] * &out[t - k];
            }
            out.push(v);
        }
        out
    }

    /// Splits the denominator as `(1 - z)^k · rest`.
    pub fn denominator_factored(&self) -> (u32, Vec<ExactScalar>) {
        let mut rest = self.denominator.clone();
        let mut k = 0;
        loop {
            if rest.len() <= 1 || !rest.iter().fold(ExactScalar::zero(), |a, b| a + b).is_zero() {
                return (k, rest);
            }
            // synthetic division by (1 - z): q_i = q_{i-1} + r_i
            let mut q = Vec::with_capacity(rest.len() - 1);
            let mut acc = ExactScalar::zero();
            for c in &rest[..rest.len() - 1] {
                acc += c;
                q.push(acc.clone());
            }
            rest = trim(q);
            k += 1;
        }
    }

    pub fn display(&self) -> SeriesDisplay {
        let (k, rest) = self.denominator_factored();
        let mut den = Vec::new();
        if rest.len() > 1 {
            den.push(format!("({})", poly_string(&rest)));
        }
        match k {
            0 => {}
            1 => den.push("(1-z)".into()),
            _ => den.push(format!("(1-z)^{k}")),
        }
        let denominator = if den.is_empty() { "1".into() } else { den.join("") };
        SeriesDisplay { numerator: poly_string(&self.numerator), denominator }
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.display();
        write!(f, "({}) / {}", d.numerator, d.denominator)
    }
}

/// Smallest rational function reproducing `dims`.
///
/// Tries denominators of degree `L = 0..=max_order` (with numerator degree
/// at most `L`), solving the recurrence exactly on terms `L+1..`. At least
/// `2 * max_order + 2` terms are needed so each fit is overdetermined.
pub fn hilbert_series(dims: &[ExactScalar], max_order: usize) -> Result<RationalSeries> {
    let t = dims.len();
    if t < 2 * max_order + 2 {
        return Err(Error::InvalidArgument(format!(
            "{t} terms supplied, need at least {} for recurrences of order {max_order}",
            2 * max_order + 2
        )));
    }
    for l in 0..=max_order {
        // unknowns d_1..d_l; equations Σ_{k=0}^{l} d_k a_{s-k} = 0 for s in l+1..t, d_0 = 1
        let rows: Vec<Vec<ExactScalar>> = (l + 1..t)
            .map(|s| {
                let mut r: Vec<ExactScalar> = (1..=l).map(|k| dims[s - k].clone()).collect();
                r.push(-&dims[s]);
                r
            })
            .collect();
        let d = if l == 0 {
            rows.iter().all(|r| r[0].is_zero()).then(Vec::new)
        } else {
            let (a, b): (Vec<Vec<ExactScalar>>, Vec<ExactScalar>) =
                rows.into_iter().map(|mut r| { let v = r.pop().expect("rhs"); (r, v) }).unzip();
            ExactMatrix::from_dense(&a).solve(&b)
        };
        let Some(d) = d else { continue };
        let mut den = vec![ExactScalar::one()];
        den.extend(d);
        let num: Vec<ExactScalar> = (0..=l)
            .map(|s| (0..=l.min(s)).map(|k| &den[k] * &dims[s - k]).sum())
            .collect();
        let series = RationalSeries { numerator: trim(num), denominator: trim(den), verified_terms: t };
        if series.terms(t) != dims {
            return Err(Error::InvalidArgument("fitted series fails resummation".into()));
        }
        return Ok(series);
    }
    Err(Error::NoRationalFit { max_order, terms: t })
}

pub fn hilbert_series_u64(dims: &[u64], max_order: usize) -> Result<RationalSeries> {
    let v: Vec<ExactScalar> = dims.iter().map(|&x| ExactScalar::from(x)).collect();
    hilbert_series(&v, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<ExactScalar> {
        v.iter().map(|&x| ExactScalar::from_int(x)).collect()
    }

    #[test]
    fn constant_sequence() {
        let s = hilbert_series(&ints(&[1; 8]), 3).unwrap();
        assert_eq!(s.to_string(), "(1) / (1-z)");
        assert_eq!(s.denominator_factored().0, 1);
    }

    #[test]
    fn zero_sequence() {
        let s = hilbert_series(&ints(&[0; 6]), 2).unwrap();
        assert!(s.numerator.is_empty());
        assert_eq!(s.display().numerator, "0");
    }

    #[test]
    fn irregular_head_and_fibonacci() {
        let s = hilbert_series(&ints(&[5, 1, 1, 1, 1, 1]), 2).unwrap();
        assert_eq!(s.to_string(), "(5 - 4z) / (1-z)");
        let fib = ints(&[1, 1, 2, 3, 5, 8, 13, 21]);
        let s = hilbert_series(&fib, 3).unwrap();
        assert_eq!(s.denominator, ints(&[1, -1, -1]));
        assert_eq!(s.display().denominator, "(1 - z - z^2)");
    }

    #[test]
    fn failure_is_reported() {
        let v = ints(&[1, 2, 4, 8, 16, 32 + 1, 7, 100]);
        assert!(matches!(hilbert_series(&v, 1), Err(Error::NoRationalFit { .. })));
        assert!(hilbert_series(&v, 5).is_err());
    }
}
