//! Bertrand superintegrable Hamiltonians on curved spaces.
//!
//! The crate builds the two Perlick families of spherically symmetric
//! metrics and potentials, rewrites them as position-dependent-mass (PDM)
//! Hamiltonians through a conformal change of radial variable, integrates
//! their dynamics while tracking the conserved quantities, and checks the
//! exact discrete spectrum of the quantum Darboux III oscillator against a
//! finite-difference eigensolver.
//!
//! Module map:
//!
//! * [`geometry`]: metric profiles `h(r)`, potentials, Green functions.
//! * [`pdm_map`]: `r ↔ |q|` maps, mass functions, PDM Hamiltonians.
//! * [`dynamics`]: integrators, integrals of motion, orbit analysis.
//! * [`quantum`]: analytic and numerical Darboux III spectrum.
//! * [`numerics`]: quadrature, root finding, tridiagonal eigenvalues.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod pdm_map;
pub mod quantum;

pub use dynamics::{PhaseState, Trajectory};
pub use error::{Error, Result};
pub use geometry::{
    darboux_curvature_origin, darboux_profile, green_u, intrinsic_potential, preset_families,
    random_family, validity_intervals, verify_intrinsic_potentials, BertrandFamily, Branch,
    FamilyKind, Interval, IntrinsicFitReport, IntrinsicPotentialSpec, PotentialKind, RadialProfile,
};
pub use pdm_map::{check_relations, CoordinateMap, MassFunction, PdmKind, PdmSystem};
pub use quantum::{QuantumParams, RadialGrid, SpectrumResult};

/// Serialize non-finite floats as `null` so JSON stays valid.
pub(crate) mod serde_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
