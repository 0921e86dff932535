fn main() {
    std::process::exit(gridfreq::cli::run(std::env::args_os()));
}
