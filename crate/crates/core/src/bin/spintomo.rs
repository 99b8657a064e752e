fn main() {
    std::process::exit(spintomo::cli::main());
}
