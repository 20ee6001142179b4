//! Decoded points of the unit circle at l = 5 over F_1009, checked over Q.

use locapprox::metric::LocalityScale;
use locapprox::poly::PolySystem;
use locapprox::residue::Modulus;
use locapprox::structures::{variety_points, VarietyScan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circle: PolySystem = "vars: x y\nx^2 + y^2 - 1\n".parse()?;
    let r = variety_points(
        &circle,
        &Modulus::field(1009)?,
        &LocalityScale::new(5, 1)?,
        VarietyScan::Exhaustive { budget: 1 << 20 },
    )?;
    println!("scanned {} tuples, {} points, {} spurious", r.scanned, r.points.len(), r.spurious);
    r.write_csv(std::io::stdout())?;
    Ok(())
}
