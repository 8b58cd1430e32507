fn main() {
    std::process::exit(fphi_cli::main_with_args(std::env::args().collect()));
}
