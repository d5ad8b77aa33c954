fn main() {
    std::process::exit(saw_optomech::cli::run_from(std::env::args_os()));
}
