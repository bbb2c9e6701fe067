fn main() {
    std::process::exit(quotient_invariants::cli::run(std::env::args_os()));
}
