fn main() { std::process::exit(urblock::cli::main()); }
