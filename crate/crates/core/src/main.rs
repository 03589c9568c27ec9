fn main() -> std::process::ExitCode {
    curvsense::cli::app::main()
}
