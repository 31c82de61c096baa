mod args;
mod commands;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::Failure;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ROBUSTFLOW_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => fail(Failure::Usage(e.render().to_string().trim().to_string())),
        },
    };
    if let Err(f) = commands::run(cli.command) {
        fail(f);
    }
}

fn fail(f: Failure) -> ! {
    eprintln!("{}", f.to_json());
    std::process::exit(f.code())
}
