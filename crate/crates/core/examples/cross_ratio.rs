//! The infinitesimal cross ratio on tangent vectors to pairs of points.

use moebius_energy::crossratio::{eval_omega_cr, push_forward, squares, TangentPairFrame};
use num_complex::Complex64;

fn main() -> moebius_energy::Result<()> {
    let c = Complex64::new;
    let frame = TangentPairFrame { w: c(0.2, 0.1), z: c(1.5, -0.4), v1: (c(1.0, 0.3), c(-0.2, 0.7)), v2: (c(0.4, -1.0), c(0.9, 0.2)) };
    let omega = eval_omega_cr(&frame)?;
    let (a, b, cc, d) = (c(1.0, 2.0), c(0.3, 0.0), c(-0.5, 0.1), c(1.0, -1.0));
    let moved = push_forward(&frame, |x| (a * x + b) / (cc * x + d), |x| (a * d - b * cc) / ((cc * x + d) * (cc * x + d)));
    println!("omega = {omega:.12}");
    println!("after a Moebius map: {:.12}", eval_omega_cr(&moved)?);

    let v = [frame.v1, frame.v2, (c(0.0, 1.0), c(1.0, 0.0)), (c(0.5, 0.5), c(-1.0, 0.3))];
    let (re, im, rhs) = squares(frame.w, frame.z, v)?;
    println!("Re w ^ Re w = {re:.12}, Im w ^ Im w = {im:.12}, area form = {rhs:.12}");
    Ok(())
}
