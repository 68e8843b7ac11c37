// Region-II amplitudes of a composite landscape predicted from the
// reflection and transmission of its parts, checked against a direct solve,
// with the transparency condition as a function of energy.

use gencont::currents::run_fig1_scenario;
use gencont::numerics::Grid;
use gencont::potentials::{PotentialProfile, Segment};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p1 = PotentialProfile::barrier(0.0, 1.0, 1.3)?;
    let p2 = p1.with_segment(Segment::new(2.5, 3.2, 0.6))?;
    let grid = Grid::with_spacing(-10.0, 13.2, 1e-2)?;

    println!(
        "{:>5} {:>24} {:>10} {:>10} {:>10} {:>12}",
        "E", "A predicted", "|A-A'|", "|B|", "||B|-|B'||", "transparency"
    );
    for e in [0.3, 0.6, 0.8, 1.2, 2.0] {
        let r = run_fig1_scenario(&p1, &p2, e, &grid)?;
        println!(
            "{e:>5.2} {:>24.8} {:>10.1e} {:>10.6} {:>10.1e} {:>12}",
            r.a_predicted,
            r.a_error(),
            r.b_modulus_predicted,
            r.b_modulus_error(),
            r.transparency_residual
                .map_or("n/a".to_string(), |v| format!("{v:.3e}"))
        );
        if r.a_error() > 1e-8 || r.b_modulus_error() > 1e-8 {
            return Err(format!("reconstruction failed at E = {e}").into());
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
