fn main() {
    let code = isingpath_cli::run(std::env::args_os().collect());
    std::process::exit(code);
}
