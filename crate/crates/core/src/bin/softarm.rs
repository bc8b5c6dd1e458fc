fn main() {
    std::process::exit(softarm::cli::run(std::env::args_os()));
}
