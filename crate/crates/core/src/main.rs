fn main() {
    std::process::exit(qualmetrics::cli::main_with_args(std::env::args_os()));
}
