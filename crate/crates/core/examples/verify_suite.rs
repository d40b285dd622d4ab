// Runs one verification suite and prints the JSON report.
//
//   cargo run --example verify_suite -- power 7

use cstar_seminorms::verify::{run_suite, Suite, SuiteConfig};

fn main() -> cstar_seminorms::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("blowup").parse()?;
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = SuiteConfig {
        seed,
        trials: 50,
        ..SuiteConfig::default()
    };
    let report = run_suite(suite, &config)?;
    print!("{}", report.to_json()?);
    eprintln!("{} checks, {} failures", report.checks, report.failures.len());
    Ok(())
}
