//! Position-dependent coined quantum walks on the integer lattice.
//!
//! The one-step evolution is `U = SC`: a site-wise coin `C(x) ∈ U(2)` followed
//! by a shift that moves the upper spinor component one site to the left and
//! the lower one one site to the right. Coins are assumed to approach a
//! homogeneous limit `C₀` fast enough that `U − U₀` is trace class.
//!
//! The crate provides:
//!
//! * [`coin`]: coin matrices and coin fields (homogeneous, defects, power-law
//!   decaying perturbations);
//! * [`walk`]: exact evolution on an expanding support window;
//! * [`momentum`]: the band structure of the homogeneous symbol, group
//!   velocities and the free limit velocity law (including the Konno density);
//! * [`measure`]: probability measures on velocity space and their comparison;
//! * [`scattering`]: finite-time wave operators, the perturbed limit law and the
//!   trace-norm diagnostic of `U − U₀`;
//! * [`spectral`]: bound states of `U` by truncated dense diagonalization;
//! * [`experiments`]: config-driven runs that tie everything together.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coin;
pub mod error;
pub mod experiments;
pub mod measure;
pub mod momentum;
pub mod scattering;
pub mod spectral;
pub mod walk;

pub use coin::{CoinField, CoinMatrix, DecayParams, FieldKind, FieldSpec, Mat2};
pub use error::{Error, Result};
pub use measure::VelocityMeasure;
pub use momentum::{BandDecomposition, SymbolSample};
pub use scattering::{TraceNormDiagnostic, WaveProbe};
pub use spectral::{BoundState, BoundStateSet, Boundary, TruncatedEvolution};
pub use walk::{Direction, PositionDistribution, Spinor, WalkState};

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;
