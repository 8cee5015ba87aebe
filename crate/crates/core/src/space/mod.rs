//! The energy, mutual energy and writhe of closed space curves.

pub mod energy;
pub mod writhe;

pub use energy::{
    additivity_check, mutual_energy_space, space_energy, space_energy_cutoff, space_energy_cutoff_diagnostic,
    space_energy_parallel, space_energy_parallel_diagnostic, Additivity, MutualReport,
};
pub use writhe::{linking_number, projection_writhe, writhe};

use crate::renorm::RenormResult;
use serde::Serialize;

/// Value of one route to a space-curve functional.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub route: String,
    pub value: f64,
    pub error: f64,
    /// Grid size per curve of the final quadrature, or the number of
    /// ladder rungs for extrapolated routes.
    pub n: usize,
    pub renorm: Option<RenormResult>,
    /// Largest magnitude of the diagonal fill values.
    pub diagonal_fill: f64,
    pub warnings: Vec<String>,
}
