fn main() {
    std::process::exit(qubit_majorization::harness::cli::run(std::env::args_os()));
}
