//! Drives the command-line front end in-process, as an embedding
//! application would: a convergence table rendered as JSON.

fn main() {
    let args = ["mlrh", "converge", "--H", "0.1", "--t-points", "50", "--format", "json"];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = mlrh::cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    std::process::exit(code);
}
