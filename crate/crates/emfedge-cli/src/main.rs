use clap::Parser;

fn main() {
    // clap exits with code 2 and usage text on unknown flags
    let cli = emfedge_cli::cli::Cli::parse();
    match emfedge_cli::cli::execute(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
