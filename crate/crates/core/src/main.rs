fn main() {
    std::process::exit(ce_adversary::cli::run(std::env::args_os()));
}
