// Two landscapes share a sub-landscape: the two-field current is constant on
// every equality domain, and the sub-domain Wronskian `Jχ` together with the
// fit `Φ2 = c1 Φ1 + c2 χ2` reproduces it.

use gencont::currents::{current_j12, equality_domain_currents};
use gencont::numerics::Grid;
use gencont::potentials::{
    find_difference_domains, find_equality_domains, PotentialProfile, Segment,
};
use gencont::stationary::{solve_scattering, Incidence};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let shared = vec![Segment::new(-1.0, 0.0, 0.6), Segment::new(0.0, 1.0, -0.3)];
    let p1 = PotentialProfile::new(shared)?;
    let p2 = p1.with_segment(Segment::new(2.5, 3.5, 1.1))?;
    let grid = Grid::with_spacing(-8.0, 10.0, 1e-3)?;
    let e = 0.7;
    let s1 = solve_scattering(&p1, e, &grid, Incidence::Left)?;
    let s2 = solve_scattering(&p2, e, &grid, Incidence::Left)?;

    for d in find_equality_domains(&p1, &p2, grid.x_min(), grid.x_max()) {
        let r = equality_domain_currents(&s1, &s2, d, 1e-8)?;
        println!(
            "equality   [{:6.2}, {:6.2}]  J12 = {:.10}  rel dev {:.1e}  Jχ dev {:.1e}  fit {:.1e}",
            d.a(),
            d.b(),
            r.j12.mean_value,
            r.j12.relative_deviation,
            r.jchi.relative_deviation,
            r.fit.residual
        );
        if !r.passed(1e-8) {
            return Err("current not constant on an equality domain".into());
        }
    }
    let j12 = current_j12(&s1, &s2)?;
    for d in find_difference_domains(&p1, &p2, grid.x_min(), grid.x_max()) {
        let r = j12.constancy(d, 1e-8)?;
        println!(
            "difference [{:6.2}, {:6.2}]  rel dev {:.3e}",
            d.a(),
            d.b(),
            r.relative_deviation
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
