fn main() {
    std::process::exit(tqd::main_with_args(std::env::args_os()));
}
