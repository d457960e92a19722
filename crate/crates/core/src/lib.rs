//! Bi-homomorphic lattice PRF (fully key-homomorphic, partially
//! input-homomorphic, variable input length), the left/right
//! key-homomorphic constrained PRFs built from it, and an updatable
//! encryption scheme with unidirectional updates.
//!
//! Every parameter preset shipped here is a functional, *non-secure*
//! parameter set meant for testing and measurement.

pub mod bench;
pub mod codec;
pub mod cprf;
pub mod entropy;
pub mod error;
pub mod gadget;
pub mod kihprf;
pub mod modmath;
pub mod params;
pub mod report;
pub mod selftest;
pub mod symbols;
pub mod tree;
pub mod ue;

pub use entropy::Entropy;
pub use error::{Error, Result};
pub use gadget::{Decomp, GadgetContext};
pub use kihprf::{combine, homomorphism_defect, DerivedMatrices, EvalCache, PrfInstance, Seed};
pub use modmath::{centered_inf_norm, round_to_p, ModMatrix};
pub use params::{Params, Preset};
pub use report::Report;
pub use symbols::{almost_xor, BitString, Symbol, SymbolString};
pub use tree::FullBinaryTree;
