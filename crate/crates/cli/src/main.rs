mod args;
mod run;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Err(e) = run::run(&cli.command) {
        eprintln!("error: {e}");
        if let Some(hint) = e.hint() {
            eprintln!("hint: {hint}");
        }
        std::process::exit(e.exit_code());
    }
}
