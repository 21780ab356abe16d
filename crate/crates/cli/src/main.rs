fn main() {
    std::process::exit(qcircle::run(std::env::args_os()));
}
