fn main() {
    std::process::exit(pcflab::run(std::env::args_os()));
}
