fn main() {
    std::process::exit(xorlab_cli::run(std::env::args_os()));
}
