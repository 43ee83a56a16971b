use clap::Parser;

fn main() {
    let cli = pinlab::Cli::parse();
    if let Err(err) = pinlab::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(pinlab::exit_code_for(&err));
    }
}
