//! Command-line front end: configuration, single-image runs, corpus
//! benchmarks and report formats.

pub mod args;
pub mod benchmark;
pub mod commands;
pub mod config;
pub mod report;

use anyhow::Result;

use args::{Cli, Command};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Mask(a) => commands::cmd_mask(a),
        Command::Inpaint(a) => commands::cmd_inpaint(a),
        Command::Benchmark(a) => commands::cmd_benchmark(a),
        Command::Metrics(a) => commands::cmd_metrics(a),
        Command::DepthProxy(a) => commands::cmd_depth_proxy(a),
        Command::Synth(a) => commands::cmd_synth(a),
        Command::ShowConfig(a) => commands::cmd_show_config(a),
    }
}
