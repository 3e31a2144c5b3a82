//! Exact valuations on finite lattices of sets.
//!
//! A finite [`PervinSpace`] carries a lattice of subsets. On it live
//! [`Valuation`]s (strict, monotone, modular maps into `Q+ ∪ {inf}`), lower
//! semicontinuous functions, Choquet integrals, densities `g·μ`, and the
//! Radon-Nikodym machinery of [`radon`]: absolute continuity, Hahn
//! decomposition witnesses and density synthesis. All arithmetic is exact.

pub mod choquet;
pub mod exreal;
pub mod pervin;
pub mod radon;
pub mod valuation;

pub use choquet::{integrate, lsc_check, ChoquetError, LinearFunctional, LscFunction};
pub use exreal::{ExtValue, NumberError, SignedRational};
pub use pervin::{AlgebraElement, Atom, Crescent, Limits, PervinSpace, PointSet, SpaceError};
pub use radon::{DensityResult, NoDensityReason, RadonError};
pub use valuation::{Axiom, AxiomViolation, SignedValuation, Valuation, ValuationError};
