fn main() {
    std::process::exit(raindrop::cli::main_from_args(std::env::args_os()));
}
