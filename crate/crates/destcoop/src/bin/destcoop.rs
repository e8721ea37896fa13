fn main() {
    std::process::exit(destcoop::cli::run_with_args(std::env::args_os()));
}
