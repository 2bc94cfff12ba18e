//! Drive the command-line front end from code and capture its CSV.

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["quadtwist", "frobenius", "x^5-x+1", "--primes", "3..60"];
    let code = quadtwist::cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("exit code {code}");
}
