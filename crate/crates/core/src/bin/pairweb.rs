fn main() {
    std::process::exit(pairweb::experiments::main_with_args(std::env::args_os()));
}
