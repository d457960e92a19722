//! The bi-homomorphic PRF: public instance, seeds, tree evaluators with
//! memoization, the generator `R`, the families `F` and `F'`, and the
//! homomorphism-defect measurement.

mod eval;
mod harness;
mod instance;
mod prf;
mod prg;
pub mod unwind;

pub use eval::{CacheStats, EvalCache};
pub use harness::{defect_harness, defect_report, defect_trials, sample_defect_tuple, DefectTrial};
pub use instance::{keygen, DerivedMatrices, PrfInstance, Seed};
pub use prf::{combine, combined_symbols, homomorphism_defect, selectors_agree};

#[cfg(test)]
mod tests;
