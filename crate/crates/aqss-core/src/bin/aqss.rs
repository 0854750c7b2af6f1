use aqss_core::cli::{self, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    let (report, code) = cli::run(&cli);
    match report {
        Ok(report) => println!("{}", report.render(pretty)),
        Err(e) => eprintln!("error: {e}"),
    }
    std::process::exit(code);
}
