fn main() {
    std::process::exit(primrows::cli::run(std::env::args_os()));
}
