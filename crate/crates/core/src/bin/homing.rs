use clap::Parser;
use visual_homing::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
