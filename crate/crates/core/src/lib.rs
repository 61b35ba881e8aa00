//! Stable phase retrieval for augmented random frames and discretized
//! L₂ subspace models.
//!
//! The numeric core is generic over [`Real`] (implemented for `f32` and
//! `f64`). Concrete aliases for both precisions live at the crate root;
//! the experiment runner uses the `f64` ones.
//!
//! Module map:
//! - [`distributions`]: random-variable families, seeded sample matrices,
//!   moment and small-ball estimators.
//! - [`subspace`]: the empirical-measure model of `span(yⱼ + 1₍ⱼ,ⱼ₊₁₎)`.
//! - [`frames`]: finite frames, analysis operator, frame bounds.
//! - [`stability`]: sign alignment, lemma checks, stability ratio search,
//!   exact phase-retrieval enumeration, the ℓ₂ instability witness.
//! - [`bounds`]: closed-form constants, tail bounds and sample complexities.
//! - [`nets`]: sphere nets, product nets and J-set counting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod distributions;
mod error;
pub mod frames;
pub mod linalg;
pub mod nets;
mod real;
pub mod rng;
pub mod stability;
pub mod subspace;

pub use error::{Error, Result};
pub use real::Real;

pub use distributions::{DistributionSpec, Family, SampleMatrix};
pub use frames::{Frame, FrameBounds, MeasurementVector, RowLabel};
pub use stability::{PairWitness, PhaseMeasurement, SignAlignment, StabilityReport, Strategy};
pub use subspace::{AugmentedElement, SubspaceModel, TailWeight};

pub type SampleMatrix64 = SampleMatrix<f64>;
pub type SampleMatrix32 = SampleMatrix<f32>;
pub type SubspaceModel64 = SubspaceModel<f64>;
pub type SubspaceModel32 = SubspaceModel<f32>;
pub type Frame64 = Frame<f64>;
pub type Frame32 = Frame<f32>;
pub type StabilityReport64 = StabilityReport<f64>;
pub type StabilityReport32 = StabilityReport<f32>;
pub type PairWitness64 = PairWitness<f64>;
