fn main() {
    std::process::exit(salience::report::cli::run(std::env::args_os()));
}
