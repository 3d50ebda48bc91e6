//! Fractal interpolation functions on the Sierpinski gasket.
//!
//! * [`address`] — vertex addresses, canonical forms and the level graphs `Γ_m`.
//! * [`harmonic`] — harmonic functions via the 1/5–2/5 rule.
//! * [`fif`] — FIFs built from boundary values, midpoint values and scaling factors.
//! * [`energy`] — graph energies, the level recursion and closed-form totals.
//! * [`laplacian`] — renormalized graph Laplacians and the existence classification.
//! * [`oracle`] — an independent sparse linear solver used for cross-checks.

pub mod address;
pub mod cli;
pub mod energy;
pub mod error;
pub mod fif;
pub mod harmonic;
pub mod laplacian;
pub mod mesh;
pub mod oracle;
pub mod verify;

pub use address::{canonicalize, Address, CanonicalVertex, DepthCap};
pub use energy::{EnergyClass, HarmonicStructure};
pub use error::{Error, Result};
pub use fif::FifSpec;
pub use harmonic::HarmonicFunction;
pub use laplacian::{LaplacianCase, LaplacianClassification};
pub use mesh::{Mesh, VertexFunction};
