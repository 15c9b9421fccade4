fn main() {
    std::process::exit(ialut::cli::run(std::env::args_os()));
}
