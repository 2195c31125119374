fn main() -> std::process::ExitCode {
    greedy_lab::cli::main()
}
