fn main() {
    std::process::exit(brownian_hull::cli::run());
}
