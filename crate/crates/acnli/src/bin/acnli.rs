fn main() {
    std::process::exit(acnli::cli::main_with_args(std::env::args_os()));
}
