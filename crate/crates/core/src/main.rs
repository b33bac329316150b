fn main() {
    std::process::exit(itp_core::cli::main_with_args(std::env::args_os()));
}
