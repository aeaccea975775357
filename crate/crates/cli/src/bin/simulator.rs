use clap::Parser;
use quokka_cli::{run_simulator, SimArgs};

#[derive(Parser)]
#[command(name = "Quokka", version, about = "Simulate an optimized circuit: Quokka -i CONFIG.ini -c CIRCUIT.txt")]
struct Quokka {
    #[command(flatten)]
    args: SimArgs,
}

fn main() {
    let q = Quokka::parse();
    match run_simulator(&q.args) {
        Ok(report) => print!("{report}"),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
