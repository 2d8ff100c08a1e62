fn main() {
    std::process::exit(bias_learn::cli::run(std::env::args_os()));
}
