use clap::Parser;
use qvbb_lab::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli, &mut std::io::stdout()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("qvbb: {e}");
            std::process::exit(2);
        }
    }
}
