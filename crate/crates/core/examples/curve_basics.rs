//! Fourier curves: frames, length, chord angles, offsets and the JSON form.

use moebius_energy::io::{parse_document, to_pretty, CurveJson};
use moebius_energy::{ClosedCurve, PlanarDomain};

fn main() -> moebius_energy::Result<()> {
    let ellipse = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0)?;
    let f = ellipse.eval_frame(0.0)?;
    println!("ellipse at t=0: point {:?}, tangent {:?}, curvature {:.6}", f.point.as_slice(), f.tangent.as_slice(), f.curvature);
    println!("ellipse length {:.12}", ellipse.arclength());

    let ch = ellipse.chord_data(0.3, 2.0)?;
    println!("chord r={:.6}, theta_p={:.6}, theta_q={:.6}", ch.r, ch.theta_p, ch.theta_q);

    let domain = PlanarDomain::simple(ellipse.clone())?;
    let inner = domain.parallel_curve2(0.1)?;
    println!("inner offset at 0.1 has {} modes, length {:.6}", inner[0].modes(), inner[0].arclength());

    let trefoil = ClosedCurve::trefoil();
    let (offset, residual) = trefoil.parallel_curve3(0.05)?;
    println!("trefoil principal-normal offset: {} modes, refit residual {residual:.1e}", offset.modes());
    let ch = trefoil.chord_data(0.4, 3.0)?;
    println!("trefoil chord: cos tau {:.6}, sin tau {:.6}", ch.cos_tau, ch.sin_tau);

    let text = to_pretty(&CurveJson::from_curve(&trefoil))?;
    let back = parse_document(&text)?;
    println!("JSON round trip keeps {} curve(s), {} bytes", back.curves().len(), text.len());
    Ok(())
}
