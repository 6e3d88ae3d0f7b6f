use clap::Parser;
use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter_or("GALIMECH_LOG", "warn")).init();
    let cli = galimech_cli::Cli::parse();
    std::process::exit(galimech_cli::run(&cli));
}
