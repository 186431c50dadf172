//! Elliptic scaling functions.
//!
//! Compactly supported refinable functions built from real isotropic integer
//! dilation matrices. The pipeline runs
//!
//! 1. [`matana`]: validate the dilation matrix, certify isotropy and solve for
//!    the invariant quadratic form `P(ξ) = ξᵀQ²ξ`;
//! 2. [`digits`]: exact digit sets of `A` and `Aᵀ`;
//! 3. [`trigpoly`]: the trigonometric polynomial `G` and the mask `m₀`;
//! 4. [`spectral`]: `μ`, the infinite product `M`, `φ̂ᵐ`, the supremum `𝓑`
//!    and the Riesz verdict;
//! 5. [`cascade`]: values of `φᵐ` on the lattices `A⁻ᴶℤᵈ`;
//! 6. [`operators`]: the difference operator `𝒢`, the `Δ♯` symbol and the
//!    Green spectrum;
//! 7. [`properties`]: the verification harness tying everything together.
//!
//! ```
//! use esf_core::{fixtures, spectral::SpectralProfile};
//!
//! let profile = SpectralProfile::new(&fixtures::quincunx(), 1).unwrap();
//! assert!((profile.phi_hat(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
//! ```

pub mod cascade;
pub mod digits;
mod error;
pub mod fixtures;
pub mod format;
pub mod intmat;
pub mod matana;
pub mod operators;
pub mod polynomial;
pub mod properties;
pub mod spectral;
pub mod trigpoly;

pub use cascade::{LatticeGrid, SupportBox};
pub use digits::DigitSet;
pub use error::{Error, Result};
pub use intmat::IntMatrix;
pub use matana::{DilationMatrix, IsotropyCertificate, OrthogonalPart, QuadraticForm};
pub use operators::DifferenceStencil;
pub use polynomial::Polynomial;
pub use properties::PropertyReport;
pub use spectral::SpectralProfile;
pub use trigpoly::{RefinementCoefficients, TrigPoly};
