//! Exact canonical-ensemble thermodynamics for a handful of particles in a
//! one-dimensional infinite square well that can be split in half by a wall.
//!
//! The crate answers one family of questions: if `N` particles start in the
//! two halves of a box of width `l` at inverse temperature `beta`, and the
//! wall is removed isothermally, how do the partition function, entropy and
//! free energy change — and how does the answer depend on whether the
//! particles are bosons, fermions or distinguishable, and on whether they
//! carry a two-valued internal "color" label tied to their starting side?
//!
//! Everything is expressed through the Boltzmann base `q = exp(-beta
//! pi^2 / (2 l^2))` in reduced units (`k_B = hbar = M = 1`). Single-particle
//! levels of the full well carry weight `q^(n^2)`, levels of a half well
//! `q^(4 n^2)`, so every many-body Boltzmann weight is `q^e` with an exact
//! integer exponent `e`.
//!
//! Module map:
//!
//! * [`model`] — reduced units, wells, statistics and scenario vocabulary.
//! * [`series`] — theta-style series `theta3`, `z1`, `weighted_series` with
//!   certified truncation bounds and the modular (duality) transform for
//!   nomes near 1.
//! * [`qpoly`] — exact integer-exponent polynomials in `q`, the
//!   cancellation-free backend for cold spectra.
//! * [`ensembles`] — the cycle-index recursion building N-particle canonical
//!   partition functions and every mixing scenario.
//! * [`thermo`] — entropy, mixing entropy, isothermal work, mean energy and
//!   high-temperature power-law fits.
//! * [`oracle`] — brute-force state enumeration used to validate everything
//!   else by direct summation.
//! * [`verify`] — the self-check suite behind the CLI `verify` subcommand.
//!
//! Scalar types are generic over [`Float`] (`f32` or `f64`); the `*64`
//! aliases at the crate root pin the default double-precision instantiation.

pub mod ensembles;
pub mod error;
pub mod model;
pub mod oracle;
pub mod qpoly;
pub mod series;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    level_weight_exponent, LabelMode, PhysicalConfig, Scenario, ScenarioPair, Stage, Statistics,
    Well,
};

use core::fmt;

/// Scalar abstraction for all series and thermodynamic arithmetic.
///
/// Blanket-implemented for any IEEE float with the needed constants and
/// conversions, in practice `f32` and `f64`. Certified truncation bounds are
/// about the series tail only, so coarse scalars simply need coarser
/// tolerances.
pub trait Float:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + fmt::Debug
    + fmt::Display
    + 'static
{
}

impl<T> Float for T where
    T: num_traits::Float
        + num_traits::FloatConst
        + num_traits::FromPrimitive
        + fmt::Debug
        + fmt::Display
        + 'static
{
}

/// Convert an `f64` constant into the working scalar.
pub(crate) fn cast<F: Float>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in the working float type")
}

pub type PhysicalConfig64 = model::PhysicalConfig<f64>;
pub type SeriesValue64 = series::SeriesValue<f64>;
pub type PartitionResult64 = ensembles::PartitionResult<f64>;
pub type ThermoReport64 = thermo::ThermoReport<f64>;
pub type PowerLawFit64 = thermo::PowerLawFit<f64>;
