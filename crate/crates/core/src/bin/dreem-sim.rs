use std::process::ExitCode;

use clap::Parser;
use dreem_core::cli::{run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(manifest) => {
            for (protocol, out) in &manifest.outputs {
                println!(
                    "{:<22} runs={} first death rounds={:?}",
                    protocol.label(),
                    out.runs.len(),
                    out.first_node_death_rounds
                );
            }
            println!("wrote {}", args.out.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
