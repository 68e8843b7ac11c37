// Drive the library through a scenario file, as the command-line tool does.

use gencont::scenario::{parse_scenario, run};

const SCENARIO: &str = r#"{
  "kind": "fig1",
  "energy": 0.8,
  "grid": { "dx": 0.01 },
  "potentials": [
    { "segments": [ { "left": 0.0, "right": 1.0, "value": 1.3 } ] },
    { "segments": [ { "left": 0.0, "right": 1.0, "value": 1.3 },
                    { "left": 2.5, "right": 3.2, "value": 0.6 } ] }
  ]
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = parse_scenario(SCENARIO)?;
    let out = std::env::temp_dir().join(format!("gencont-scenario-{}", std::process::id()));
    let report = run(&scenario, &out)?;
    for c in &report.checks {
        println!(
            "{:<22} {:.3e} <= {:.0e}: {}",
            c.name, c.value, c.tolerance, c.passed
        );
    }
    for p in &report.outputs {
        println!("wrote {}", p.display());
    }
    std::fs::remove_dir_all(&out)?;
    if report.exit_code() != 0 {
        return Err("scenario checks failed".into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
