fn main() {
    std::process::exit(core_entropy::cli::run(std::env::args_os()));
}
