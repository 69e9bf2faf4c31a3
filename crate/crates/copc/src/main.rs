fn main() {
    std::process::exit(copc::cli::main_entry());
}
