fn main() -> std::process::ExitCode {
    plcob::cli::main()
}
