use clap::Parser;
use womp_core::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
