fn main() {
    std::process::exit(ddd_core::cli::cli_main(std::env::args_os()));
}
