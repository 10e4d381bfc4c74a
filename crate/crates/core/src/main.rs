fn main() {
    std::process::exit(blaschke::cli::run(std::env::args_os()));
}
