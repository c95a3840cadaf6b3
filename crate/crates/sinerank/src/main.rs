use clap::Parser;

fn main() {
    let cli = sinerank::cli::Cli::parse();
    match sinerank::cli::run(cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
