//! Exact scalars, sparse matrices, rank/kernel computation over the
//! rationals and large prime fields, and binomial identities.

pub mod binom;
pub mod elim;
mod matrix;
pub mod modp;
mod scalar;

pub use binom::{choose, choose_big, identity_check, BinomialTable, SumIdentity};
pub use matrix::{ExactMatrix, ModularRank, RankOutcome, RankPolicy, Rref};
pub use scalar::ExactScalar;
