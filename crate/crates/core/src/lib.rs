//! Sumset computations over small abelian groups.
//!
//! The crate computes h-fold sumsets — both unrestricted (repeats allowed)
//! and restricted (pairwise-distinct summands) — for subsets of Z_n and
//! small products of cyclic groups, evaluates the divisor-based closed-form
//! upper bounds u and u^ for the minimal sumset sizes rho and rho^, builds
//! the witness constructions that attain them, and pins down rho^ itself by
//! symmetry-reduced exhaustive search at small n.
//!
//! Sets are bitmasks over group elements (orders up to 256), so sumset
//! layers move through the group as word-level rotations.

pub mod constructions;
pub mod error;
pub mod formulas;
pub mod groups;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
