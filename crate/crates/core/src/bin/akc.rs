fn main() {
    std::process::exit(antikaehler::cli::main_with_args(std::env::args_os()));
}
