fn main() {
    std::process::exit(chvatal::cli::run(std::env::args_os()));
}
