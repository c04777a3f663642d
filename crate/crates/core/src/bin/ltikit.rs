fn main() {
    std::process::exit(ltikit::cli::main());
}
