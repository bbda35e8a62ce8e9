fn main() {
    std::process::exit(newcomb_bell::cli::main());
}
