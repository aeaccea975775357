use clap::Parser;
use quokka_cli::{run_finder, FinderArgs};

/// finder [target file] [cache size] [rank size] [qubit size] [apply in-memory swapping]
/// [apply cross-rank swapping] [fusion size] [apply fusion technique]
#[derive(Parser)]
#[command(name = "finder", version, about = "Optimize a raw circuit into gate blocks and swaps")]
struct Finder {
    #[command(flatten)]
    args: FinderArgs,
}

fn main() {
    let f = Finder::parse();
    match run_finder(&f.args) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
