//! Writhe by the double integral and by averaging projection crossings.

use moebius_energy::space::{linking_number, projection_writhe, writhe};
use moebius_energy::{corpus, ClosedCurve, Vec3};
use nalgebra::Matrix3;

fn main() -> moebius_energy::Result<()> {
    let k = ClosedCurve::trefoil();
    let w = writhe(&k)?;
    let p = projection_writhe(&k, 1000, 1024)?;
    println!("trefoil writhe {:.10} ± {:.1e}; projections {:.4} ± {:.4}", w.value, w.error, p.value, p.error);
    let mirror = k.affine(&Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0)), Vec3::zeros())?;
    println!("mirror image {:.10}", writhe(&mirror)?.value);
    println!("planar ellipse {:.1e}", writhe(&corpus::ellipse())?.value);
    let (a, b) = corpus::hopf_pair();
    println!("linking number of the Hopf pair {:.10}", linking_number(&a, &b)?);
    Ok(())
}
