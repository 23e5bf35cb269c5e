fn main() {
    std::process::exit(rmtkit::cli::run(std::env::args_os()));
}
