fn main() {
    std::process::exit(qwave::cli::run(std::env::args_os()));
}
