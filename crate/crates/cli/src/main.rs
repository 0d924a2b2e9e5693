fn main() {
    std::process::exit(tdvmm_cli::main_with_args(std::env::args_os()));
}
