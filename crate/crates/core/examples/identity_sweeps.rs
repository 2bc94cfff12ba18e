//! Run every exhaustive identity sweep in dimension 2.

use quadtwist::{cohomology, pollatsek, quadform};

fn main() -> quadtwist::Result<()> {
    for (name, checks) in [
        ("quadform", quadform::verify_suite(2)?),
        ("pollatsek", pollatsek::verify_suite(2)?),
        ("cohomology", cohomology::verify_suite(2)?),
    ] {
        println!("[{name}]");
        for c in checks {
            println!("  {c}");
        }
    }
    Ok(())
}
