fn main() {
    std::process::exit(npp_lab::run(std::env::args_os()));
}
