fn main() -> std::process::ExitCode {
    carpet_quant::cli::main_exit()
}
