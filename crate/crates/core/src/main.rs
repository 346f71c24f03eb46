use clap::Parser;

fn main() {
    let cli = fasaco::cli::Cli::parse();
    match fasaco::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
