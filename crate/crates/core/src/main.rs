fn main() {
    std::process::exit(ffa::cli::main());
}
