use clap::Parser;
use quatpaint_cli::args::Cli;

fn main() -> std::process::ExitCode {
    match quatpaint_cli::run(&Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
