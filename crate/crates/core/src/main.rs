fn main() {
    std::process::exit(psmono::cli::run(std::env::args_os()));
}
