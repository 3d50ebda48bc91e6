use std::io::{self, Write};
use std::process::exit;

fn main() {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = sgfif::cli::main_with(std::env::args_os(), &mut out, &mut io::stderr());
    let _ = out.flush();
    exit(code);
}
