fn main() {
    std::process::exit(scfact::cli::run(std::env::args_os()));
}
