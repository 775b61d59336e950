use orthoflow::cli::{dispatch, SEED_ENV};

fn main() {
    let seed = std::env::var(SEED_ENV).ok();
    let out = dispatch(std::env::args_os(), seed.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
