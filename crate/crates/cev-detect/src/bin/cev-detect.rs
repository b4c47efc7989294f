fn main() {
    if let Err(e) = cev_detect::cli::run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
