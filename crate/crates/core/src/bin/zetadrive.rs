fn main() {
    std::process::exit(zetadrive::cli::run());
}
