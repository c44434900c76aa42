fn main() -> std::process::ExitCode {
    bicoeff::cli::main()
}
