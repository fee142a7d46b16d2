fn main() {
    env_logger::init();
    std::process::exit(rge::cli::run(std::env::args_os()));
}
