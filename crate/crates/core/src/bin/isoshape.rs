fn main() {
    std::process::exit(isoshape::cli::main_with_args(std::env::args_os()));
}
