//! Potential, domain energy and boundary-curve energy of planar domains.

use moebius_energy::planar::{
    boundary_energy, convex_chord_energy, curve_energy_cutoff, domain_energy, nt_energy, potential,
    potential_asymptotics, segment_energy, tangent_circle_energy, CutoffForm,
};
use moebius_energy::{corpus, ClosedCurve, PlanarDomain, Vec3};
use std::f64::consts::PI;

fn main() -> moebius_energy::Result<()> {
    let disk = corpus::disk();
    for rho in [0.0, 0.5, 0.9] {
        let v = potential(&Vec3::new(rho, 0.0, 0.0), &disk)?;
        println!("V at distance {rho} from the centre: {v:.10} (closed form {:.10})", -PI / (1.0 - rho * rho).powi(2));
    }

    let ellipse = PlanarDomain::simple(ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0)?)?;
    let p = potential_asymptotics(&ellipse, 0, 0.0)?;
    println!("near the vertex: c2 = {:.6} (-pi/4 = {:.6}), c1 = {:.6} (-kappa pi/4 = {:.6})", p.c2, -PI / 4.0, p.c1, -p.curvature * PI / 4.0);

    println!("\nroute            E(K)");
    let k = ellipse.boundaries();
    println!("sin-sin          {:.10}", boundary_energy(&ellipse)?.value);
    println!("cos-cos cutoff   {:.10}", curve_energy_cutoff(&k, CutoffForm::Coscos)?.e_curve);
    println!("dot cutoff       {:.10}", curve_energy_cutoff(&k, CutoffForm::Dots)?.e_curve);
    println!("segments         {:.10}", segment_energy(&k)?.value);
    println!("convex chords    {:.10}", convex_chord_energy(&ellipse)?.value);
    let nt = nt_energy(&ellipse, 200_000, 1)?;
    println!("NT pairs (MC)    {:.4} ± {:.4}", nt.value, nt.std_error);
    println!("E(Omega) by V    {:.10}", domain_energy(&ellipse)?.value);
    println!("tangent circles  {:.10}", tangent_circle_energy(&ellipse)?.value);

    println!("\nE(Omega) - E(K) against pi^2 chi / 4:");
    for (name, d) in [("disk", corpus::disk()), ("annulus", corpus::annulus()), ("two holes", corpus::two_hole())] {
        let diff = domain_energy(&d)?.value - boundary_energy(&d)?.value;
        println!("  {name:10} {diff:+.8}  {:+.8}", PI * PI * d.euler_characteristic() as f64 / 4.0);
    }
    Ok(())
}
