fn main() {
    std::process::exit(polarenc::cli::run());
}
