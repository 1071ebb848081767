fn main() {
    std::process::exit(univalence::cli::run(std::env::args_os()));
}
