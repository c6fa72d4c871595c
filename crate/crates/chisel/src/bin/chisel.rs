fn main() {
    let code = chisel::harness::run_cli(std::env::args_os());
    std::process::exit(code);
}
