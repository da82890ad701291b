fn main() {
    std::process::exit(oper_slope_cli::run(std::env::args_os()));
}
