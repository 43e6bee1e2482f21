use primrows::lattice::EnumConfig;
use primrows::verify::{run_suite, summary_json};

pub fn run_example() -> primrows::Result<()> {
    let cfg = EnumConfig::default();
    let reports = ["closed-forms", "logconcavity", "menon"]
        .iter()
        .map(|s| run_suite(s, &cfg))
        .collect::<primrows::Result<Vec<_>>>()?;
    for r in &reports {
        println!("{:<14} passed={} checks={}", r.name, r.passed, r.checks);
        for note in &r.notes {
            println!("  {note}");
        }
    }
    println!("{}", summary_json(&reports)["passed"]);
    Ok(())
}

fn main() -> primrows::Result<()> {
    run_example()
}
