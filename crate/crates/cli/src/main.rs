fn main() -> std::process::ExitCode {
    ermodes_cli::cli::run(std::env::args_os())
}
