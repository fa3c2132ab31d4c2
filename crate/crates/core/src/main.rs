fn main() {
    std::process::exit(trispec::cli::cli_main(std::env::args_os()));
}
