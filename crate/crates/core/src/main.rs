fn main() {
    std::process::exit(mwu::cli::main_with_args(std::env::args_os()));
}
