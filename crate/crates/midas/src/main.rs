fn main() {
    std::process::exit(midas::cli::run_from_env());
}
