fn main() {
    std::process::exit(codesw_cli::run(std::env::args_os(), &mut std::io::stdout()));
}
