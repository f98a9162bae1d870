fn main() {
    std::process::exit(swarmbeam_cli::run_cli(std::env::args_os()));
}
