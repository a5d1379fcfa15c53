fn main() {
    let code = transduction_cli::main_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
