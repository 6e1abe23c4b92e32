fn main() {
    std::process::exit(twoprover::cli::run(std::env::args_os()));
}
