fn main() {
    std::process::exit(seizure_cli::main_with_args(std::env::args_os()));
}
