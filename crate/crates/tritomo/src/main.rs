fn main() { std::process::exit(tritomo::cli::run()); }
