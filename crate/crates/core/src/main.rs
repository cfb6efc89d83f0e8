fn main() {
    std::process::exit(lazutkin_ellipse::cli::run(std::env::args_os()));
}
