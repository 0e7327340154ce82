fn main() {
    std::process::exit(sapaugment::cli::dispatch(std::env::args_os()));
}
