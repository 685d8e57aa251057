fn main() {
    std::process::exit(bitext_filter::cli::main_with_args(std::env::args_os()));
}
