fn main() {
    std::process::exit(l1forge_cli::run(std::env::args_os()));
}
