//! Simulation and verification toolkit for the fixed-length abelian lattice
//! Higgs model on `Z^4` with structure group `Z_n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`cellcomplex`]: oriented cells of a box, chains, boundary and coboundary.
//! * [`forms`]: `Z_n`-valued forms, exterior derivative, partial order,
//!   decompositions, antiderivatives and surfaces.
//! * [`gibbs`]: the unitary-gauge measure, heat-bath sampler, Wilson lines,
//!   estimators and an exact enumeration oracle.
//! * [`spinmodel`]: the dual vertex spin model at `beta = infinity`.
//! * [`clusters`]: edge graphs, clusters, E-sets and distances.
//! * [`couplings`]: the Z-Z and LGT-Z couplings and event indicators.
//! * [`vortices`]: vortex extraction, corner edges and the line reduction.
//! * [`theory`]: closed-form constants, predictions and bounds.
//! * [`harness`]: configuration, experiments, reports and acceptance checks.

pub mod cellcomplex;
pub mod clusters;
pub mod couplings;
pub mod error;
pub mod forms;
pub mod gibbs;
pub mod harness;
pub mod mc;
pub mod spinmodel;
pub mod theory;
pub mod vortices;

pub use error::{Error, Result};
