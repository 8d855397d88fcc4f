//! Classical mechanics of two ring-shaped potentials: the oscillatory
//! ½Ω²r² + ½Q/ρ² and the coulombic (Hartmann) −Z/r + ½Q/ρ².
//!
//! Units are atomic-style with unit mass throughout.

mod error;
mod orbit;
mod params;
mod phase;
mod potential;
mod rational;

pub mod coulomb;
pub mod frenet;
pub mod oracle;
pub mod oscillator;
pub mod verify;

pub use error::{Error, Result};
pub use orbit::{
    EquipotentialCurve, EquipotentialKind, OrbitSample, Periodicity, Planarity, PlanarityVerdict,
    RATIONAL_MAX_DEN, RATIONAL_TOL, TORSION_TOL,
};
pub use params::{CoulParams, MotionConstants, OscParams, Sense};
pub use phase::{
    angular_momentum, from_cylindrical, from_spherical, to_cylindrical, to_spherical, Cylindrical,
    PhaseState, Spherical,
};
pub use potential::{
    finite_difference_model, FiniteDifferenceModel, FreeParticle, PotentialModel, SINGULARITY_GUARD,
};
pub use rational::{best_rational, RationalApprox};
