use clap::Parser;
use ratdyn_cli::{init_threads, run, Cli, THREADS_ENV};

fn main() {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    let result = init_threads(threads.as_deref()).and_then(|_| run(&cli));
    if let Err(e) = result {
        eprintln!("ratdyn: {e}");
        std::process::exit(e.exit_code());
    }
}
