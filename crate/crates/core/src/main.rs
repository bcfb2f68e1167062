fn main() {
    std::process::exit(phireg::cli::run(std::env::args_os()));
}
