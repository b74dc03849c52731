fn main() {
    std::process::exit(phenotopo::cli::execute(std::env::args_os()));
}
