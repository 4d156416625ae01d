fn main() -> std::process::ExitCode {
    cocoonsim::cli::main()
}
