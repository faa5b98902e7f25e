use std::io::Write;

fn main() {
    let (code, output) = hvb::cli::run(std::env::args_os().skip(1));
    let result = if code == hvb::cli::EXIT_INPUT {
        std::io::stderr().write_all(output.as_bytes())
    } else {
        std::io::stdout().write_all(output.as_bytes())
    };
    if result.is_err() {
        std::process::exit(hvb::cli::EXIT_INPUT);
    }
    std::process::exit(code);
}
