//! The full verification pipeline through the run API, as the `verify`
//! subcommand does it, with artifacts written to a directory.
//!
//! cargo run --release --example verify_domain -- K1_n2_nc ellipse:0.6,0.3 [out_dir]

use rank1_neumann::run::{run_verify, Command, RunConfig};

fn main() -> rank1_neumann::Result<()> {
    let mut args = std::env::args().skip(1);
    let space = args.next().unwrap_or_else(|| "K1_n2_nc".into());
    let domain = args.next().unwrap_or_else(|| "ellipse:0.6,0.3".into());
    let config = RunConfig {
        spaces: vec![space],
        domain: Some(domain),
        target_h: 0.04,
        ..RunConfig::new(Command::Verify)
    };
    let (report, artifacts) = run_verify(&config)?;
    for c in &report.checks {
        println!("{:<32} {:?} margin {:+.3e}", c.id, c.status, c.margin);
    }
    println!("config hash {}", report.config_hash);
    if let Some(dir) = args.next() {
        artifacts.write(dir.as_ref(), &report.config_hash)?;
        report.write(&std::path::Path::new(&dir).join("report.json"))?;
    }
    Ok(())
}
