fn main() {
    std::process::exit(gaussvol::report::run_cli(std::env::args_os()));
}
