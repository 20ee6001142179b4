//! A rational rotation and a rational unitary, their images over
//! F_(2^61 - 1), and a seeded homomorphism check on random pairs.

use locapprox::metric::LocalityScale;
use locapprox::rational::q_frac;
use locapprox::residue::Modulus;
use locapprox::structures::{
    decode_matrix, encode_matrix, generate_rational_point, group_hom_check, GroupFamily, HalfAngle, HeightBound,
    PointParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Modulus::field((1 << 61) - 1)?;
    let s = LocalityScale::new(10, 8)?;
    let so3 = GroupFamily::so(3)?;
    let angles = vec![HalfAngle::new(1, 2)?, HalfAngle::new(1, 3)?, HalfAngle::new(2, 5)?];
    let m = generate_rational_point(&so3, &PointParams::Rotations(angles), None)?;
    println!("M =\n{m}");
    let image = encode_matrix(&m, &q)?;
    println!("decode(encode(M)) == M: {}", decode_matrix(&image, &s)?.as_ref() == Some(&m));

    let su2 = GroupFamily::su(2)?;
    let quat = [q_frac(1, 2), q_frac(1, 2), q_frac(1, 2), q_frac(1, 2)];
    println!("U =\n{}", generate_rational_point(&su2, &PointParams::Quaternions(vec![quat]), None)?);

    for fam in [so3, su2] {
        let r = group_hom_check(&fam, 100, HeightBound::new(10_000)?, &q, &s, 7)?;
        println!("{fam}: {} pairs, {} failures", r.pairs, r.total_failures());
    }
    Ok(())
}
