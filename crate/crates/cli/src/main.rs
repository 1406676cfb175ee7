fn main() {
    std::process::exit(geninv_cli::main_with(std::env::args_os()));
}
