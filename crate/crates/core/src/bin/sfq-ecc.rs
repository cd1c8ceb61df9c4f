fn main() {
    std::process::exit(sfq_ecc::cli::main_with_args(std::env::args_os()));
}
