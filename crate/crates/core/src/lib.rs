//! Moebius-invariant energies of planar domains and closed space curves.
//!
//! The crate evaluates renormalized r⁻⁴ potentials and energies of planar
//! domains, the energy of their boundary curves, the corresponding energy
//! and writhe of closed space curves, and checks them against Monte Carlo
//! integral geometry over circles and lines.  Curves are truncated Fourier
//! series, so spectral quadrature applies throughout.

pub mod cli;
pub mod corpus;
pub mod crossratio;
pub mod curve;
pub mod cutoff;
pub mod domain;
pub mod error;
pub mod ig;
pub mod io;
pub mod moebius;
pub mod planar;
pub mod quad;
pub mod renorm;
pub mod rng;
pub mod space;

pub use curve::{ChordData, ClosedCurve, Frame, Vec3};
pub use domain::PlanarDomain;
pub use error::{Error, Result};
pub use renorm::{DivergenceModel, RenormResult};
