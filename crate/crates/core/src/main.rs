fn main() {
    std::process::exit(decoshield::cli::main_with_env());
}
