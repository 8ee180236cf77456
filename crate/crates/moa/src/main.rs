fn main() {
    std::process::exit(moa::cli::main_from_env());
}
