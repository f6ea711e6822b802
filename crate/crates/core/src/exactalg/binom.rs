//! Binomial coefficients and the summation identities used by the tableau
//! dimension count.
//!
//! Notation: the superscript/subscript binomial `C^a_b` used in the
//! dimension formulas is "b choose a". This is the only place that
//! translation happens; the rest of the crate calls [`choose`].

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Memoized Pascal table of arbitrary-precision binomials.
#[derive(Debug, Default)]
pub struct BinomialTable {
    cache: HashMap<(u64, u64), BigInt>,
}

impl BinomialTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// "b choose a"; zero when `a < 0`, `a > b` or `b < 0`.
    pub fn get(&mut self, b: i64, a: i64) -> BigInt {
        if a < 0 || b < 0 || a > b {
            return BigInt::zero();
        }
        let a = a.min(b - a) as u64;
        let b = b as u64;
        if a == 0 {
            return BigInt::one();
        }
        if let Some(v) = self.cache.get(&(b, a)) {
            return v.clone();
        }
        // multiplicative formula keeps every intermediate an integer
        let mut acc = BigInt::one();
        for i in 0..a {
            acc = acc * BigInt::from(b - i) / BigInt::from(i + 1);
        }
        self.cache.insert((b, a), acc.clone());
        acc
    }

    /// Every cached entry satisfies Pascal's rule against freshly computed neighbours.
    pub fn check_pascal(&mut self) -> bool {
        let keys: Vec<(u64, u64)> = self.cache.keys().copied().collect();
        keys.into_iter().all(|(b, a)| {
            let (b, a) = (b as i64, a as i64);
            self.get(b, a) == self.get(b - 1, a - 1) + self.get(b - 1, a)
        })
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }
}

fn shared() -> &'static RwLock<BinomialTable> {
    static TABLE: OnceLock<RwLock<BinomialTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(BinomialTable::new()))
}

/// "b choose a" as a big integer; zero outside `0 <= a <= b`.
pub fn choose_big(b: i64, a: i64) -> BigInt {
    if a < 0 || b < 0 || a > b {
        return BigInt::zero();
    }
    let key = (b as u64, a.min(b - a) as u64);
    if let Some(v) = shared().read().expect("binomial table lock").cache.get(&key) {
        return v.clone();
    }
    shared().write().expect("binomial table lock").get(b, a)
}

/// "b choose a"; panics if the value does not fit in `u64`.
pub fn choose(b: i64, a: i64) -> u64 {
    choose_big(b, a).to_u64().expect("binomial coefficient overflows u64")
}

/// Which of the six summation identities to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumIdentity {
    /// `sum_{s=0}^{q} C(a+s, a) = C(a+q+1, a+1)`
    HockeyStick { a: i64, q: i64 },
    /// `sum_{s=p}^{q} C(a+s, a) = C(a+q+1, a+1) - C(a+p, a+1)`, `0 <= p <= q`
    PartialHockeyStick { a: i64, p: i64, q: i64 },
    /// `sum_{s=0}^{q} C(a+s, b) = C(a+q+1, b+1) - C(a, b+1)`
    ShiftedHockeyStick { a: i64, b: i64, q: i64 },
    /// `sum_{s=0}^{q} (s+1) C(a+s, a) = (a+1) C(a+q+1, a+2) + C(a+q+1, a+1)`
    Weighted { a: i64, q: i64 },
    /// `sum_{s=0}^{q} (s+1) C(a+s, b) = (b+1)[C(a+q+1,b+2) - C(a,b+2)] + (b-a+1)[C(a+q+1,b+1) - C(a,b+1)]`, `a >= b+2`
    WeightedShifted { a: i64, b: i64, q: i64 },
    /// `sum_{s=0}^{d} C(a+s, a) C(b-s, b-d) = C(a+b+1, a+b+1-d)`, `d <= b`
    Convolution { a: i64, b: i64, d: i64 },
}

impl SumIdentity {
    /// Builds identity `id` (1..=6) from a parameter tuple in the order of the variant fields.
    pub fn from_id(id: u8, params: &[i64]) -> Result<Self> {
        let need = match id {
            1 | 4 => 2,
            2 | 3 | 5 | 6 => 3,
            _ => return Err(Error::InvalidArgument(format!("identity id {id} not in 1..=6"))),
        };
        if params.len() != need {
            return Err(Error::InvalidArgument(format!("identity {id} takes {need} parameters")));
        }
        let p = params;
        let ident = match id {
            1 => SumIdentity::HockeyStick { a: p[0], q: p[1] },
            2 => SumIdentity::PartialHockeyStick { a: p[0], p: p[1], q: p[2] },
            3 => SumIdentity::ShiftedHockeyStick { a: p[0], b: p[1], q: p[2] },
            4 => SumIdentity::Weighted { a: p[0], q: p[1] },
            5 => SumIdentity::WeightedShifted { a: p[0], b: p[1], q: p[2] },
            _ => SumIdentity::Convolution { a: p[0], b: p[1], d: p[2] },
        };
        Ok(ident)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("{self:?}: {msg}")));
        match *self {
            SumIdentity::HockeyStick { a, q } | SumIdentity::Weighted { a, q } if a < 0 || q < 0 => {
                bad("parameters must be non-negative")
            }
            SumIdentity::PartialHockeyStick { a, p, q } if a < 0 || p < 0 || p > q => bad("need a >= 0 and 0 <= p <= q"),
            SumIdentity::ShiftedHockeyStick { a, b, q } if a < 0 || b < 0 || q < 0 => {
                bad("parameters must be non-negative")
            }
            SumIdentity::WeightedShifted { a, b, q } if b < 0 || q < 0 || a < b + 2 => bad("need a >= b + 2"),
            SumIdentity::Convolution { a, b, d } if a < 0 || d < 0 || d > b => bad("need a >= 0 and 0 <= d <= b"),
            _ => Ok(()),
        }
    }

    /// Both sides: direct summation and closed form.
    pub fn sides(&self) -> Result<(BigInt, BigInt)> {
        self.validate()?;
        let c = choose_big;
        let sum = |lo: i64, hi: i64, f: &dyn Fn(i64) -> BigInt| (lo..=hi).map(f).fold(BigInt::zero(), |x, y| x + y);
        Ok(match *self {
            SumIdentity::HockeyStick { a, q } => (sum(0, q, &|s| c(a + s, a)), c(a + q + 1, a + 1)),
            SumIdentity::PartialHockeyStick { a, p, q } => {
                (sum(p, q, &|s| c(a + s, a)), c(a + q + 1, a + 1) - c(a + p, a + 1))
            }
            SumIdentity::ShiftedHockeyStick { a, b, q } => {
                (sum(0, q, &|s| c(a + s, b)), c(a + q + 1, b + 1) - c(a, b + 1))
            }
            SumIdentity::Weighted { a, q } => (
                sum(0, q, &|s| BigInt::from(s + 1) * c(a + s, a)),
                BigInt::from(a + 1) * c(a + q + 1, a + 2) + c(a + q + 1, a + 1),
            ),
            SumIdentity::WeightedShifted { a, b, q } => (
                sum(0, q, &|s| BigInt::from(s + 1) * c(a + s, b)),
                BigInt::from(b + 1) * (c(a + q + 1, b + 2) - c(a, b + 2))
                    + BigInt::from(b - a + 1) * (c(a + q + 1, b + 1) - c(a, b + 1)),
            ),
            SumIdentity::Convolution { a, b, d } => {
                (sum(0, d, &|s| c(a + s, a) * c(b - s, b - d)), c(a + b + 1, a + b + 1 - d))
            }
        })
    }

    pub fn holds(&self) -> Result<bool> {
        let (l, r) = self.sides()?;
        Ok(l == r)
    }
}

/// Checks identity `id` (1..=6) at the given parameters.
pub fn identity_check(id: u8, params: &[i64]) -> Result<bool> {
    SumIdentity::from_id(id, params)?.holds()
}
