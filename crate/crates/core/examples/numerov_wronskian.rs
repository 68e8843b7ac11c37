// Numerov integration of a scattering state against the exact transfer-matrix
// field, and the constant Wronskian of a sub-domain second solution.

use gencont::numerics::{numerov_integrate, Grid};
use gencont::potentials::{PotentialProfile, Segment, SymmetryDomain};
use gencont::stationary::{second_solution, solve_scattering, Incidence};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let profile = PotentialProfile::new(vec![
        Segment::new(-1.5, -0.5, 0.9),
        Segment::new(-0.5, 0.5, 0.2),
        Segment::new(0.5, 1.5, 0.9),
    ])?;
    let e = 0.5;
    for n in [2001, 4001, 8001] {
        let grid = Grid::new(-4.0, 4.0, n)?;
        let exact = solve_scattering(&profile, e, &grid, Incidence::Left)?;
        let cell = |x: f64| profile.cell_average(x, grid.dx());
        let num = numerov_integrate(
            &cell,
            e,
            &grid,
            exact.field().values()[0],
            exact.derivative_field().values()[0],
        )?;
        let err = exact
            .field()
            .values()
            .iter()
            .zip(num.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        println!("n = {n:5}: max |Φ_numerov − Φ_exact| = {err:.3e}");
    }

    let grid = Grid::new(-4.0, 4.0, 8001)?;
    let sol = solve_scattering(&profile, e, &grid, Incidence::Left)?;
    let chi = second_solution(&profile, e, SymmetryDomain::new(-1.0, 2.0)?, &sol)?;
    let w = chi.wronskian_series(&sol)?;
    let spread = w
        .values()
        .iter()
        .map(|z| (z - chi.wronskian_with_primary()).norm())
        .fold(0.0, f64::max);
    println!(
        "Wronskian {:.10}, spread over the domain {spread:.1e}",
        chi.wronskian_with_primary()
    );
    if spread > 1e-10 {
        return Err("Wronskian is not constant".into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
