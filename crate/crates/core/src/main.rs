use clap::Parser;

fn main() {
    let args = dualdyson::cli::Args::parse();
    std::process::exit(dualdyson::cli::main_with_args(args));
}
