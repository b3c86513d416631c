//! Secular master equations for `N` molecular vibrations collectively coupled
//! to a resonant cavity mode.
//!
//! The crate builds the polariton/dark eigenbasis ([`model`]), derives the
//! relaxation rates from a bath spectral function ([`bath`]), assembles the
//! closed-form Lindblad generators ([`generators`]) and an independent secular
//! Redfield generator ([`redfield`]), propagates density matrices
//! ([`dynamics`]) and checks the equations of motion coefficient by
//! coefficient ([`verify`]).

pub mod bath;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod model;
pub mod operator;
pub mod redfield;
pub mod superop;
pub mod verify;

pub use bath::{rates_from_spectrum, validate_rates, BathTopology, RateSet, SpectralFunction};
pub use dynamics::{propagate, propagate_reduced, Picture, TimeGrid, Trajectory};
pub use error::{Error, Result};
pub use generators::{assemble_generator, GeneratorKind, Liouvillian, Variant};
pub use model::{build_basis, ModelBasis, ModelParams, StateLabel};
pub use redfield::assemble_redfield;
pub use verify::{compare_generators, eom_row, table1_report};
