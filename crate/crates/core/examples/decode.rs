//! Encode rationals into F_257, decode them back, and watch a residue
//! outside the window come back as NotLocal.

use locapprox::metric::{decode, encode, DecodeOutcome, LocalityScale};
use locapprox::rational::BoundedRational;
use locapprox::residue::Modulus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Modulus::field(257)?;
    let s = LocalityScale::new(10, 1)?;
    for text in ["1/3", "-7/9", "10/1", "0/1"] {
        let r: BoundedRational = text.parse()?;
        let z = encode(&r, &q)?;
        match decode(&z, &s)? {
            DecodeOutcome::Local(back) => println!("{r} -> {z} -> {back}"),
            DecodeOutcome::NotLocal => println!("{r} -> {z} -> NotLocal"),
        }
    }
    // 2*3^2 < 257, and 100 has no pair with heights <= 3
    let tight = LocalityScale::new(3, 1)?;
    println!("100 at L = 3 -> local: {}", decode(&q.residue(100), &tight)?.is_local());
    // the window check rejects L = 100^2 outright
    println!("L = 10^4 -> {}", decode(&q.residue(1), &LocalityScale::new(100, 2)?).unwrap_err());
    Ok(())
}
