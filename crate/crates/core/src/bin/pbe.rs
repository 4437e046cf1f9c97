fn main() {
    std::process::exit(pbe::cli::run());
}
