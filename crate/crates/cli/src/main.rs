fn main() {
    std::process::exit(spinlie_cli::run());
}
