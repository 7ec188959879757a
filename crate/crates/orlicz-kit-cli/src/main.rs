use clap::Parser;
use orlicz_kit_cli::{configure_threads, run, Cli, EXIT_INPUT, THREADS_VAR};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let threads = std::env::var(THREADS_VAR).ok();
    let result = configure_threads(threads.as_deref()).and_then(|()| run(&cli, &mut std::io::stdout().lock()));
    if let Err(e) = result {
        eprintln!("orlicz-kit: {e}");
        std::process::exit(e.exit_code());
    }
}
