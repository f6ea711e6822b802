//! Data-parallel execution switch.
//!
//! Every batch loop in the crate (independent matrix blocks, coordinate
//! samples, modular trials, parameter grids) goes through [`map`]. With the
//! `parallel` feature the default mode fans out over rayon; without it, or
//! after `set_mode(Exec::Sequential)`, the same code runs on the caller's
//! thread. Results are returned in input order in both modes.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

const UNSET: u8 = 0;
const SEQ: u8 = 1;
const PAR: u8 = 2;

static MODE: AtomicU8 = AtomicU8::new(UNSET);

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Overrides the process-wide mode. `Parallel` degrades to sequential when
/// the crate was built without the `parallel` feature.
pub fn set_mode(mode: Exec) {
    MODE.store(if mode == Exec::Parallel { PAR } else { SEQ }, Ordering::Relaxed);
}

pub fn mode() -> Exec {
    match MODE.load(Ordering::Relaxed) {
        SEQ => Exec::Sequential,
        PAR => Exec::Parallel,
        _ => Exec::default(),
    }
}

pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode() {
        #[cfg(feature = "parallel")]
        Exec::Parallel if items.len() > 1 => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}
