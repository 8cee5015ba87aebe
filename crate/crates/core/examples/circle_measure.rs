//! Monte Carlo over the invariant measure on circles: linking counts,
//! hit counts, the circle form of the energy and of the mutual energy.

use moebius_energy::ig::circles::{
    hits_measure, linking_circle, mc_energy_circles, mc_mutual_circles, sample_circles, Circle3, CircleSampler, RadiusLaw,
};
use moebius_energy::space::{mutual_energy_space, space_energy};
use moebius_energy::{corpus, Vec3};
use std::f64::consts::PI;

fn main() -> moebius_energy::Result<()> {
    let k = corpus::unit_circle_space();
    let gamma = Circle3::new(Vec3::new(1.0, 0.0, 0.0), 0.5, Vec3::y())?;
    println!("small circle around the rim: (linking, hits) = {:?}", linking_circle(&gamma, &k)?);

    let sampler = CircleSampler::new(&[&k], RadiusLaw::LogUniform { min: 0.01, max: 100.0 })?;
    for (c, w) in sample_circles(&sampler, 3, 9) {
        println!("  drew radius {:.4} centred at {:?} with weight {w:.4}", c.radius, c.center.as_slice());
    }

    let l = k.arclength();
    for eps in [0.05, 0.1] {
        let e = hits_measure(&[&k], eps, 2000.0, 200_000, 1)?;
        println!("hits measure eps={eps}: {:.3} + tail {:.3} vs 2 pi^2 L / eps = {:.3}", e.mean, e.tail_bound, 2.0 * PI * PI * l / eps);
    }

    let t = corpus::trefoil();
    let mc = mc_energy_circles(&[&t], 200_000, 2)?;
    println!("trefoil: circles {:.3} ± {:.3}, quadrature {:.6}", mc.mean, mc.std_error, space_energy(&[&t])?.value);

    let (a, b) = corpus::hopf_pair();
    let mc = mc_mutual_circles(&a, &b, 200_000, 3)?;
    println!("Hopf pair: circles {:.4} ± {:.4}, quadrature {:.6}", mc.mean, mc.std_error, mutual_energy_space(&a, &b)?.value);
    Ok(())
}
