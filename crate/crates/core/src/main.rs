use std::io;

fn main() {
    let code = riesz::cli::run(std::env::args_os().collect(), &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
