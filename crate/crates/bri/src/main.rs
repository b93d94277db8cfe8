fn main() {
    std::process::exit(bri::cli::run(std::env::args_os()));
}
