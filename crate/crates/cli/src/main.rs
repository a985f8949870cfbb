fn main() {
    std::process::exit(cdcqed_cli::run(std::env::args_os()));
}
