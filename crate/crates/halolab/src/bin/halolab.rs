fn main() {
    std::process::exit(halolab::cli::main_with_args(std::env::args_os()));
}
