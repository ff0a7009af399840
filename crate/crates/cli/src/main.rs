fn main() {
    std::process::exit(sckerr_cli::run(std::env::args_os()));
}
