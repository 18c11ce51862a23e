fn main() {
    std::process::exit(qswitch_cli::cli::run(std::env::args_os()));
}
