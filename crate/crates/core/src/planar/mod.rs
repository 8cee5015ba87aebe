//! Energies of planar domains and of their boundary curves.

pub mod energy;
pub mod lines;
pub mod mutual;
pub mod nt;
pub mod potential;
pub mod tangent;

pub use energy::{
    boundary_energy, curve_energy, curve_energy_cutoff, curve_energy_cutoff_diagnostic, domain_energy,
    domain_energy_diagnostic, CutoffEnergy, CutoffForm,
};
pub use lines::{convex_chord_energy, crofton_measure, segment_energy, LineSlicer};
pub use mutual::{mutual_energy_area, mutual_energy_contour, ContourForm};
pub use nt::{nt_energy, NtEstimate};
pub use tangent::{pair_theta_energy, tangent_circle_energy, PairThetaEnergy, TangentCircleEnergy};
pub use potential::{potential, potential_asymptotics, PotentialEvaluator, PotentialProfile};

use crate::curve::ClosedCurve;
use serde::Serialize;

/// A quadrature result with its resolution and an error estimate.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub n: usize,
}

impl From<crate::cutoff::Converged> for Estimate {
    fn from(c: crate::cutoff::Converged) -> Self {
        Estimate { value: c.value, error: c.error, n: c.n }
    }
}

pub use crate::cutoff::{curve_system_reach, system_diameter};

pub(crate) fn max_modes(curves: &[&ClosedCurve]) -> usize {
    curves.iter().map(|c| c.modes()).max().unwrap_or(1)
}
