//! Mutual energy of two disjoint disks by five formulas.

use moebius_energy::planar::{mutual_energy_area, mutual_energy_contour, pair_theta_energy, ContourForm};
use moebius_energy::PlanarDomain;

fn main() -> moebius_energy::Result<()> {
    let a = PlanarDomain::disk(0.0, 0.0, 1.0)?;
    let b = PlanarDomain::disk(3.0, 0.5, 0.7)?;
    let (ka, kb) = (a.boundaries()[0], b.boundaries()[0]);
    for form in [ContourForm::Rere, ContourForm::Imim, ContourForm::Dots] {
        let e = mutual_energy_contour(ka, kb, form)?;
        println!("{form:?}: {:.12} (n = {})", e.value, e.n);
    }
    println!("area integral: {:.12}", mutual_energy_area(&a, &b)?.value);
    let t = pair_theta_energy(&a, &b)?;
    println!("tangent-circle angles: {:.12}", t.value);
    Ok(())
}
