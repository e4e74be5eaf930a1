fn main() {
    std::process::exit(tpwa::cli::run(std::env::args_os()));
}
