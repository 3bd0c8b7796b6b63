fn main() {
    std::process::exit(parse_ensemble::cli::run(std::env::args_os()));
}
