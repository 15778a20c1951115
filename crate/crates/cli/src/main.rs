use clap::Parser;

fn main() {
    let cli = acsqc_cli::Cli::parse();
    match acsqc_cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
