//! Line measures: Crofton lengths in the plane, and the linking identity
//! for lines in space after a one-off calibration.

use moebius_energy::ig::lines3::{bp_lines_check, calibrate_line_measure, crofton_length};
use moebius_energy::{corpus, ClosedCurve};

fn main() -> moebius_energy::Result<()> {
    let e = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0)?;
    let c = crofton_length(&[&e], 200_000, 1)?;
    println!("Crofton: half the line-hit measure {:.4} ± {:.4}, length {:.6}", c.mean / 2.0, c.std_error / 2.0, e.arclength());

    let cal = calibrate_line_measure(400_000, 2)?;
    println!("calibrated constant {:.4} ± {:.4}", cal.constant, cal.std_error);
    let (a, b) = corpus::hopf_pair();
    let pair = bp_lines_check(&a, Some(&b), &cal, 400_000, 3)?;
    println!("Hopf pair: lines {:.4} ± {:.4}, double integral {:.6}", pair.lhs, pair.lhs_std_error, pair.rhs);
    let single = bp_lines_check(&corpus::trefoil(), None, &cal, 400_000, 4)?;
    println!("trefoil:   lines {:.3} ± {:.3}, double integral {:.4}", single.lhs, single.lhs_std_error, single.rhs);
    Ok(())
}
