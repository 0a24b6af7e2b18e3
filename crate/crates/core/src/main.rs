fn main() {
    std::process::exit(fracstab::cli::main_with_args(std::env::args_os()));
}
