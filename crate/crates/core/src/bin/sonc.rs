fn main() {
    std::process::exit(sonc::cli::main_from_args(std::env::args_os()));
}
