fn main() {
    std::process::exit(dressed_rf::cli::run(std::env::args_os()));
}
