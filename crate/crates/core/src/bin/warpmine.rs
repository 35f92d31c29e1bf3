fn main() {
    std::process::exit(warpmine::cli::main_with_args(std::env::args_os()));
}
