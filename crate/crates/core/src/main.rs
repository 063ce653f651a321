fn main() {
    std::process::exit(qmarginal::cli::run(std::env::args_os()));
}
