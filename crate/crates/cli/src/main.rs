fn main() {
    std::process::exit(hadamard6_cli::run(std::env::args_os()));
}
