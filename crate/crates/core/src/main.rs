fn main() {
    std::process::exit(nlstw::cli::run(std::env::args_os()));
}
