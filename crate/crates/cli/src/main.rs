fn main() {
    std::process::exit(kl_strip_cli::run(std::env::args_os()));
}
