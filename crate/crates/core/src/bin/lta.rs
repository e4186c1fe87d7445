fn main() {
    std::process::exit(lta::cli::run(std::env::args_os()));
}
