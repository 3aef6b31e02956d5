fn main() {
    std::process::exit(distil::cli::main_with(std::env::args_os()));
}
