use clap::Parser;

use freqbench::cli::{self, RunConfig};

fn main() {
    let config = RunConfig::parse();
    if let Err(err) = cli::run(config) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}
