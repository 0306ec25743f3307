use clap::Parser;
use hlc_cli::{exit_code, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(err) = run(&cli, &mut stdout.lock()) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
