use clap::Parser;

fn main() {
    let cli = tailind_cli::args::Cli::parse();
    std::process::exit(tailind_cli::main_with(cli));
}
