fn main() {
    std::process::exit(prescribed_zeros::cli::run(std::env::args_os()));
}
