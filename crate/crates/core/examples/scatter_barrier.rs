// Transmission through a rectangular barrier from the exact transfer-matrix
// solver, compared against the textbook closed form.

use gencont::numerics::Grid;
use gencont::potentials::PotentialProfile;
use gencont::stationary::{solve_scattering, Incidence};
use gencont::C64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (width, height) = (2.0, 1.0);
    let barrier = PotentialProfile::barrier(0.0, width, height)?;
    let grid = Grid::with_spacing(-10.0, 12.0, 1e-2)?;

    println!(
        "{:>6} {:>12} {:>12} {:>14}",
        "E", "|t|^2", "closed form", "|r|^2+|t|^2-1"
    );
    for e in [0.2, 0.5, 0.9, 1.0, 1.5, 3.0] {
        let sol = solve_scattering(&barrier, e, &grid, Incidence::Left)?;
        let exact = closed_form_transmission(e, height, width);
        let t2 = sol.t().norm_sqr();
        println!(
            "{e:>6.2} {t2:>12.8} {exact:>12.8} {:>14.3e}",
            sol.unitarity() - 1.0
        );
        if (t2 - exact).abs() > 1e-10 {
            return Err(format!("transmission mismatch at E = {e}").into());
        }
    }
    Ok(())
}

/// `|t|²` of a barrier of height `v` and width `a`, with `κ² = 2(V − E)`
/// continued to imaginary values above the barrier.
fn closed_form_transmission(e: f64, v: f64, a: f64) -> f64 {
    let k = (2.0 * e).sqrt();
    let kappa = C64::new(2.0 * (v - e), 0.0).sqrt();
    if kappa.norm() < 1e-12 {
        return 1.0 / (1.0 + k * k * a * a / 4.0);
    }
    let s = (kappa * a).sinh();
    let num = (C64::new(k * k, 0.0) + kappa * kappa).norm_sqr() * s.norm_sqr();
    1.0 / (1.0 + num / (4.0 * k * k * kappa.norm_sqr()))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
