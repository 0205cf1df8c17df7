use clap::error::ErrorKind;
use clap::Parser;
use wrange_cli::{exit_code, run, Cli, EXIT_OK, EXIT_PARSE};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = run(&cli);
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    std::process::exit(exit_code(&outcome));
}
