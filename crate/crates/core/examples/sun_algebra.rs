// SU(N) Cartan decomposition of a diagonal potential operator, the ladder
// commutator identities, and the coefficient comparison table.

use gencont::sun::{build_basis, coefficient_table, commutator_check, decompose, pair_count};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let values = [0.4, 1.1, -0.7, 2.0];
    let n = values.len();
    let basis = build_basis(n)?;
    println!(
        "SU({n}): {} Cartan + {} ladder generators",
        basis.cartan().len(),
        2 * basis.ladders().len()
    );

    let d = decompose(&values)?;
    println!(
        "mean {:.6}, c = {:?}, reconstruction {:.1e}",
        d.mean_coefficient, d.c, d.reconstruction_error
    );

    let mut worst = 0.0f64;
    for i in 1..=n {
        for j in i + 1..=n {
            let (e1, e2) = commutator_check(&values, i, j)?;
            worst = worst.max(e1).max(e2);
        }
    }
    println!(
        "{} pairs, worst commutator residual {worst:.1e}",
        pair_count(n)
    );

    println!(
        "{:>3} {:>12} {:>12} {:>12}",
        "k", "projection", "sum", "average"
    );
    for row in coefficient_table(&values, 1e-12)? {
        println!(
            "{:>3} {:>12.6} {:>12.6} {:>12.6}",
            row.k, row.projection, row.printed, row.printed_as_average
        );
    }
    if d.reconstruction_error > 1e-13 || worst > 1e-13 {
        return Err("algebra identities violated".into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
