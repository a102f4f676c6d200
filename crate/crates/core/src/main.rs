use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(navgraph::cli::run(std::env::args_os()))
}
