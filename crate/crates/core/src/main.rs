fn main() {
    std::process::exit(heisenberg_cf::cli::main_with(std::env::args_os()));
}
