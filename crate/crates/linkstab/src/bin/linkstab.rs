use std::process::exit;

fn main() {
    exit(linkstab::cli::run(std::env::args_os()));
}
