fn main() {
    std::process::exit(eqa::cli::main());
}
