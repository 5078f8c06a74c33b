//! Constructive toolkit for ideal MHD in the Tartar framework.
//!
//! The crate decides wave-cone membership of pointwise states, builds and
//! verifies laminate certificates of lamination-hull membership with the
//! explicit smallness constants of the hull construction, generates smooth
//! compactly supported strict subsolutions from potentials, and computes
//! the conserved-quantity diagnostics of ideal MHD (magnetic helicity,
//! cross helicity, mean-square magnetic potential) spectrally on the torus.
//!
//! Pointwise algebra is generic over a scalar backend: `f64` for spectral
//! and exploratory work, arbitrary-precision rationals ([`scalar::Rat`])
//! for certificates, where the relevant constants are of order `1e-25` and
//! float tolerances would be meaningless.

pub mod cone;
pub mod hull;
pub mod linalg;
pub mod pfld;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod state;
pub mod subsolution;

pub use scalar::{Rat, Scalar};
