fn main() {
    std::process::exit(intersim::cli::run_cli());
}
