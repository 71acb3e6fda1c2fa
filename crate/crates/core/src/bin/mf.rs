fn main() {
    std::process::exit(mf_core::cli::run());
}
