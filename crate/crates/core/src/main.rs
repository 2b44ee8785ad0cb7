use std::io;

fn main() {
    let seed = std::env::var(darboux_forge::cli::SEED_VAR).ok();
    let code = darboux_forge::cli::run(std::env::args_os(), seed, &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
