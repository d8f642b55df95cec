fn main() {
    std::process::exit(witsenhausen_zec::cli::run(std::env::args_os()));
}
