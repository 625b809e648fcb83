fn main() {
    std::process::exit(topicforge::cli::run(std::env::args_os()));
}
