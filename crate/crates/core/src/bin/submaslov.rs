fn main() {
    std::process::exit(submaslov::cli::main_with_args(std::env::args_os()));
}
