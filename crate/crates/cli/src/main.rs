fn main() {
    std::process::exit(spin1_cli::run(std::env::args_os()));
}
