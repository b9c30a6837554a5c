fn main() {
    std::process::exit(deim_cur::cli::run(std::env::args_os()));
}
