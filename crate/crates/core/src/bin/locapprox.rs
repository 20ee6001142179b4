fn main() {
    std::process::exit(locapprox::cli::run(std::env::args_os()));
}
