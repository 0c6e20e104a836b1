fn main() {
    std::process::exit(rabi_core::cli::run(std::env::args_os()));
}
