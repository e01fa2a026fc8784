fn main() {
    std::process::exit(dsverify::cli::run(std::env::args_os()));
}
