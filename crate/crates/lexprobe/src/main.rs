fn main() {
    std::process::exit(lexprobe::cli::main_with_args(std::env::args_os()));
}
