//! Bi-orthogonal continuous wavelet transform for non-admissible analyzing
//! wavelets, and its application to the bound spectrum of relativistic
//! hydrogen-like atoms.
//!
//! The forward map is
//!
//! ```text
//! F(ζ̄) = ℒ^γ(f)(ζ̄) = ∫₀^∞ dq e^{−iζ̄q} q^γ f(q),     Im ζ̄ < 0,
//! ```
//!
//! the analytic factor of the wavelet coefficient of `f` against the
//! "ax+b" family generated by `ψ^γ(q) = q^{γ−2} e^{−q}`. For `0 < γ < 1` the
//! wavelet is not admissible, and the map is inverted on the right with the
//! reconstruction wavelet `χ^γ(q) = 1/(2πΓ(γ))`.
//!
//! Module map:
//!
//! - [`domain`]: shared types ([`HalfPlanePoint`], [`Atom`], [`RadialFunction`],
//!   [`AnalyticCoefficient`]) and the principal-branch power.
//! - [`specfun`]: complex gamma and polynomial ₂F₁ / ₁F₁.
//! - [`transform`]: the forward map, operator maps, decay diagnostics.
//! - [`reconstruct`]: the bi-orthogonal right inverse and the admissible inverse.
//! - [`norms`]: weighted L² and Bergman norms, isometry checks.
//! - [`dirac`]: spectrum and eigenfunctions of the radial Dirac problem.
//! - [`oracle`]: shooting solver for the same problem, independent of the transform.
//! - [`verify`]: the aggregated check suite behind `biwave verify`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod dirac;
pub mod domain;
pub mod error;
pub mod norms;
pub mod numdiff;
pub mod oracle;
pub mod quad;
pub mod reconstruct;
pub mod roots;
pub mod specfun;
pub mod transform;
pub mod verify;

pub use dirac::{BoundState, DiracMatrices, DiracParams, Matrix2, RadialEigenstate};
pub use domain::{
    principal_power, validate_params, AnalyticCoefficient, Atom, Classification,
    HalfPlanePoint, ParamsRef, PoleTerm, RadialFunction, SampledFunction, WaveletClass,
    WaveletParams,
};
pub use error::{Error, Result};
pub use norms::BergmanNorm;
pub use oracle::ShootingConfig;
pub use quad::Estimate;
pub use reconstruct::ReconstructionWavelet;
pub use transform::HalfPlaneGrid;

pub use num_complex::Complex64;

/// Electron rest energy in eV, used when energies are reported in physical units.
pub const ELECTRON_MASS_EV: f64 = 510_998.95;

/// Fine-structure constant, `λ = Nα`.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.0;
