fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(twomirror::sweep_io::cli_main(&args));
}
