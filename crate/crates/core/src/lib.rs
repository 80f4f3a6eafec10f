//! Finite-truncation constructions of rank-one perturbations `D + u⊗v` of
//! diagonal operators whose point spectrum is empty, together with the
//! numerical checks that certify each step.
//!
//! The pipeline runs: spectrum model, dyadic bookkeeping and range-avoiding
//! vector `u`, non-vanishing partial-fraction coefficients `c`, and the
//! assembled bundle `(λ, u, c, v)` with its eigenvalue test.

pub mod dyadic;
pub mod eigen;
pub mod nonvanishing;
pub mod numeric;
pub mod perturbation;
pub mod point_index;
pub mod selection;
pub mod spectrum;
pub mod vector;

pub use numeric::Rect;
pub use spectrum::{Ball, ComplexPoint, DensityClass, SpectrumModel};
pub use vector::WeightedVector;
