//! Moebius maps acting on curves and domains, and empirical invariance.

use moebius_energy::moebius::{invariance_suite, safe_inversion_center, Functional, MoebiusMap, Subject};
use moebius_energy::space::{mutual_energy_space, space_energy};
use moebius_energy::{corpus, ClosedCurve, Vec3};

fn main() -> moebius_energy::Result<()> {
    let k = ClosedCurve::trefoil();
    let (center, diam) = safe_inversion_center(&k, 5)?;
    let map = MoebiusMap::inversion(center, diam)?;
    let image = map.apply(&k)?;
    println!(
        "inverting about {:?}: {} modes, energy {:.10} -> {:.10}",
        center.as_slice(),
        image.modes(),
        space_energy(&[&k])?.value,
        space_energy(&[&image])?.value
    );

    let circle = MoebiusMap::inversion(Vec3::new(3.0, 0.0, 0.0), 2.0)?.apply(&corpus::unit_circle_space())?;
    println!("an inverted circle is a circle of diameter {:.10}", circle.diameter());

    let r = invariance_suite(Functional::Writhe, &Subject::Curves(vec![k]), 10, 3)?;
    println!("writhe over {} random maps: base {:.10}, max deviation {:.1e}", r.trials.len(), r.base_value, r.max_deviation);

    for rho in [2.0, 4.0, 8.0] {
        let (a, b) = corpus::conjugate_pair(rho)?;
        println!("conjugate pair rho={rho}: mutual energy {:.1e}", mutual_energy_space(&a, &b)?.value);
    }
    Ok(())
}
