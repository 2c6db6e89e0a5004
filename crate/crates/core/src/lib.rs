//! Resonance (Gamow) states of a solvable scattering model and the competing
//! definitions of their mean energy.
//!
//! * [`numerics`]: quadrature, principal values, Fourier amplitudes, Newton.
//! * [`hardy`]: rational Hardy-class test functions and Cauchy boundary integrals.
//! * [`gamow`]: resonance poles and normalized Lorentzian Gamow vectors.
//! * [`averages`]: zero, complex, Lorentzian (Bohm) and Berggren averages.
//! * [`model`]: the s-wave delta-shell Jost function, S-matrix and poles.
//! * [`survival`]: non-decay amplitudes and probabilities.

pub mod averages;
pub mod gamow;
pub mod hardy;
pub mod model;
pub mod numerics;
pub mod survival;

pub use num_complex::Complex64;
