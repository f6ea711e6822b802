//! Symbol matrices, graded syzygies, compatibility complexes, jet-level
//! exactness and Hilbert series.

mod chain;
mod exactness;
mod hilbert;
mod symbol;
mod syzygy;

pub use chain::{build_complex, build_complex_from_symbol, ChainEnd, ComplexChain};
pub use exactness::{exactness_check, ExactnessReport, SlotReport};
pub use hilbert::{hilbert_series, hilbert_series_u64, RationalSeries, SeriesDisplay};
pub use symbol::SymbolMatrix;
pub use syzygy::{compatibility_operator, syzygy_generators, GradedSyzygyStage, SyzygyCount, SyzygyDegree};
