use clap::Parser;

use motorflux::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
