fn main() {
    std::process::exit(collar::cli::main_with_args(std::env::args_os()));
}
