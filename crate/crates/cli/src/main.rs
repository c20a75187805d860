fn main() {
    std::process::exit(infoplan_cli::run(std::env::args().collect()));
}
