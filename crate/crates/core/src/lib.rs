//! Exact slope-stability calculus for cyclic branched covers of surfaces.
//!
//! Surfaces are modelled by their Néron–Severi lattice ([`lattice`]);
//! sheaves by rank and first Chern class ([`sheaf`]). [`cover`] builds the
//! n-cyclic cover of a surface and its pushforward/pullback invariants,
//! [`criteria`] and [`frobenius`] turn stability criteria into certificates,
//! and [`oracle`] holds brute-force cross-checks.
//!
//! All arithmetic is exact.

pub mod cover;
pub mod criteria;
pub mod error;
pub mod frobenius;
pub mod lattice;
pub mod oracle;
pub mod rational;
pub mod sheaf;

pub use cover::{plane_cover, CyclicCover, SlopeConstant};
pub use criteria::{Certificate, Conclusion, StabilityLevel, TheoremId};
pub use error::{Error, Result};
pub use frobenius::FrobeniusContext;
pub use lattice::{DivisorClass, Preset, SurfaceModel};
pub use rational::Q;
pub use sheaf::{FormalSheaf, HnFiltration, SplitBundle};
