fn main() {
    std::process::exit(flrank::cli::run_command(std::env::args_os()));
}
