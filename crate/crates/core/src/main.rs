fn main() {
    std::process::exit(arsent::cli::run());
}
