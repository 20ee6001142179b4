//! Encoding into Z_1028 and projecting onto F_257 agrees with encoding
//! into F_257 directly, and the pulled-back distance is a pseudo-metric.
//! Rationals with even denominators have no image in Z_1028 and are skipped.

use locapprox::metric::{dist_ring, encode, sort_rationals, LocalityScale};
use locapprox::residue::{project_ring_to_field, Modulus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ring = Modulus::ring(1028)?;
    let field = Modulus::field(257)?;
    let s = LocalityScale::new(3, 1)?;
    let (mut agree, mut encodable) = (0, 0);
    for r in sort_rationals(&s, None)? {
        let Ok(in_ring) = encode(&r, &ring) else { continue };
        encodable += 1;
        if project_ring_to_field(&in_ring, &field)? == encode(&r, &field)? {
            agree += 1;
        }
    }
    println!("{agree}/{encodable} encodable sort elements commute with projection");
    // 1 and 258 differ in Z_1028 but project to the same field element
    let d = dist_ring(&ring.residue(1), &ring.residue(258), &field, &s)?;
    println!("d(1, 258) in Z_1028 = {d}");
    Ok(())
}
