fn main() {
    std::process::exit(hookeon_cli::run(std::env::args_os()));
}
