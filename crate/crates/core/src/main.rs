fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(s5seq::cli::run(&args));
}
