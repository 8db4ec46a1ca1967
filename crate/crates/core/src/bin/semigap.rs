fn main() {
    std::process::exit(semigap::cli::run(std::env::args_os()));
}
