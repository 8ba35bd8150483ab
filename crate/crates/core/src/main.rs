fn main() {
    std::process::exit(scorekit::cli::main_with_args(std::env::args_os()));
}
