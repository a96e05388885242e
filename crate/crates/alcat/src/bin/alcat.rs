use clap::Parser;

fn main() {
    let cli = alcat::cli::Cli::parse();
    match alcat::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
