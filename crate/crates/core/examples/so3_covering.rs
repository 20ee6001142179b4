//! Covering radius of bounded-height rational rotations against a fixed
//! Halton grid on SO(3). Pass a larger top height as the first argument.

use locapprox::structures::{covering_radius, GridSpec, GroupFamily, HeightBound};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let top: u64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(100);
    let so3 = GroupFamily::so(3)?;
    let mut h = 1;
    println!("height,points,radius");
    while h <= top {
        let r = covering_radius(&so3, HeightBound::new(h)?, GridSpec::Halton { count: 512 }, 0)?;
        println!("{h},{},{:.6}", r.point_count, r.radius);
        h *= 10;
    }
    Ok(())
}
