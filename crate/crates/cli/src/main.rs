fn main() {
    std::process::exit(swapsched_cli::run(std::env::args_os()));
}
