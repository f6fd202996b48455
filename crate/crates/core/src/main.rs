fn main() {
    std::process::exit(maxlab::cli::run(std::env::args_os().skip(1)));
}
