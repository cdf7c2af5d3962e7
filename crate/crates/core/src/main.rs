fn main() {
    std::process::exit(credalk_core::cli::run(std::env::args_os()));
}
