//! Chord-length distribution and the measure of linked circles of one radius.

use moebius_energy::ig::chords::{chord_distribution, chord_limit, dcb_radius_measure};
use moebius_energy::ig::circles::linked_measure_fixed_radius;
use moebius_energy::ClosedCurve;

fn main() -> moebius_energy::Result<()> {
    let k = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0)?;
    let grid: Vec<f64> = (0..=8).map(|i| 0.5 * i as f64).collect();
    println!("s      A(s)");
    for (s, a) in chord_distribution(&k, &grid)? {
        println!("{s:<6} {a:.6}");
    }
    let lim = chord_limit(&k)?;
    println!("A(0+) = {:.6}, 2L = {:.6}", lim.intercept, lim.twice_length);

    println!("\nr      f(r)         Monte Carlo");
    for r in [0.3, 0.6, 1.2] {
        let f = dcb_radius_measure(&k, r)?;
        let mc = linked_measure_fixed_radius(&k, r, 200_000, 7)?;
        println!("{r:<6} {f:<12.6} {:.4} ± {:.4}", mc.mean, mc.std_error);
    }
    Ok(())
}
