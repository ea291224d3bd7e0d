use clap::Parser;

fn main() {
    let cli = sumrange_cli::Cli::parse();
    match sumrange_cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
