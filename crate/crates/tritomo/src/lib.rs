//! Simulation and inversion of tomograms for ensembles of three-level atoms.
//!
//! An ensemble of `A` identical three-level atoms carries the symmetric
//! irrep of u(3). Probing it with sequences of resonant and dispersive
//! pulses and recording the population of a reference state yields a
//! tomogram — a probability surface over the pulse parameters. This
//! crate builds the collective operators, the Wigner D-functions and
//! exact group-integration grids, the SU(3) coupling tables, and the
//! group-integral inversion formulas that recover the density matrix
//! from tomograms in three level configurations:
//!
//! * **non-degenerate** — both transitions individually addressable;
//!   the full SU(3) orbit is available and every matrix element is
//!   recoverable;
//! * **Λ** — degenerate lower doublet; the dynamics is an SU(2)
//!   subgroup, dark states decouple, and only a block is recoverable;
//! * **Ξ** — equally spaced cascade; the dynamics is the SO(3)
//!   subgroup, acting within fixed angular-momentum blocks.
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability, or the `tritomo` binary for the file-based pipeline.

pub mod cg;
pub mod cli;
pub mod dynamics;
pub mod fixtures;
pub mod formats;
pub mod linalg;
pub mod quad;
pub mod su3;
pub mod tomography;
pub mod wigner;

use thiserror::Error;

/// Errors surfaced by fallible operations across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generators do not satisfy the su(2) relations (defect {0:.3e})")]
    BadSu2Generators(f64),
    #[error("spin labels have mismatched integrality: 2I={two_i}, 2m={two_m}, 2m'={two_mp}")]
    SpinIntegrality { two_i: i32, two_m: i32, two_mp: i32 },
    #[error("index out of range for the irrep basis: {0}")]
    IndexOutOfRange(usize),
    #[error("highest-weight space for sigma={sigma} has dimension {found}, expected 1")]
    HighestWeightDegenerate { sigma: u32, found: usize },
    #[error("coupling coefficient has non-real part {0:.3e}")]
    NonRealCoefficient(f64),
    #[error("no SU(2) Clebsch-Gordan coefficient is nonzero for the requested labels")]
    VanishingSu2Block,
    #[error("coupled-subspace restriction is not closed (defect {0:.3e})")]
    RestrictionNotClosed(f64),
    #[error("density matrix fails {check}: defect {defect:.3e}")]
    DensityInvariant { check: &'static str, defect: f64 },
    #[error("basis tag {found} does not match the {expected} expected by this configuration")]
    BasisMismatch { expected: &'static str, found: String },
    #[error("invalid angular momentum labels L={l}, M={m} for ensemble size {a}")]
    InvalidLm { a: u32, l: i32, m: i32 },
    #[error("sample grid does not match the declared quadrature ({0})")]
    GridMismatch(String),
    #[error("unknown basis transform {from} -> {to}")]
    UnknownTransform { from: String, to: String },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
