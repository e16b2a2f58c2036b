fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(boussinesq_core::cli::dispatch(&argv));
}
