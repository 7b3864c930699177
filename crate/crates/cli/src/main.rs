use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = selfdual_cli::Cli::parse();
    let code = selfdual_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
