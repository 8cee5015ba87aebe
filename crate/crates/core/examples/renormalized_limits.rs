//! Extrapolating cutoff families to their renormalized limits.

use moebius_energy::renorm::{default_ladder, extrapolate};
use moebius_energy::{ClosedCurve, DivergenceModel, PlanarDomain};
use moebius_energy::planar::{curve_energy_cutoff_diagnostic, domain_energy, CutoffForm};

fn main() -> moebius_energy::Result<()> {
    // A synthetic family 1/ε + 7 + 3ε².
    let samples: Vec<(f64, f64)> = default_ladder(1.0).into_iter().map(|e| (e, 1.0 / e + 7.0 + 3.0 * e * e)).collect();
    let fit = extrapolate(&samples, &DivergenceModel::new(&[-1, 2]))?;
    println!("synthetic: value {:.12}, 1/eps coefficient {:?}", fit.value, fit.coefficient(-1));

    let disk = PlanarDomain::disk(0.0, 0.0, 1.0)?;
    let e = domain_energy(&disk)?;
    println!("E(unit disk) = {:.9} ± {:.1e} from {} rungs", e.value, e.error_estimate, e.ladder.len());
    println!("{}", serde_json::to_string_pretty(&e)?);

    let ellipse = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0)?;
    let d = curve_energy_cutoff_diagnostic(&[&ellipse], CutoffForm::Coscos)?;
    println!("free fit of the cos-cos cutoff: 1/eps coefficient {:?}, length {:.9}", d.coefficient(-1), ellipse.arclength());
    Ok(())
}
