//! The energy of the trefoil by the quadrature routes, plus additivity on a linked pair.

use moebius_energy::planar::CutoffForm;
use moebius_energy::space::{additivity_check, space_energy, space_energy_cutoff, space_energy_parallel};
use moebius_energy::{corpus, ClosedCurve};
use std::time::Instant;

fn main() -> moebius_energy::Result<()> {
    let k = ClosedCurve::trefoil();
    let t = Instant::now();
    let direct = space_energy(&[&k])?;
    println!("direct   {:.10}  ({:?})", direct.value, t.elapsed());
    for form in [CutoffForm::Coscos, CutoffForm::Dots] {
        let t = Instant::now();
        let r = space_energy_cutoff(&[&k], form)?;
        println!("{:8} {:.10}  ({:?})", r.route, r.value, t.elapsed());
    }
    if std::env::args().any(|a| a == "--parallel") {
        let t = Instant::now();
        let r = space_energy_parallel(&k)?;
        println!("parallel {:.10}  ({:?})", r.value, t.elapsed());
    } else {
        println!("(pass --parallel for the offset-curve route, which takes longer)");
    }
    let (a, b) = corpus::hopf_pair();
    let add = additivity_check(&a, &b)?;
    println!("E(A u B) = {:.10}, E(A) + E(B) + 2 E(A,B) = {:.10}", add.union, add.e1 + add.e2 + 2.0 * add.mutual);
    Ok(())
}
