fn main() {
    std::process::exit(lfid::cli::run(std::env::args_os()));
}
