//! Fourier multipliers built from Lévy processes.
//!
//! The crate evaluates the Lévy–Khinchine exponent Ψ, its modulated
//! version Ψ̃ and the symbols m(ξ) they generate, applies the resulting
//! multipliers on periodic grids and checks the martingale representation
//! of the bilinear pairing by Monte Carlo.

pub mod error;
pub mod io;
pub mod levy;
pub mod mc;
pub mod quad;
pub mod selftest;
pub mod spectral;
pub mod symbol;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use levy::{
    Atom, DirectionAtom, JumpModulator, LevyData, LevyMeasure, Modulator, RadialProduct,
    RadialProfile, SphereModulator, SphericalMeasure,
};
pub use spectral::SampledField;
pub use symbol::{GridSpec, SymbolGrid};
pub use symbol::SymbolSpec;
