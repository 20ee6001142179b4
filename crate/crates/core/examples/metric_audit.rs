//! Audit the metric axioms on the sort S_1 at l = 3 over F_257.
//!
//! The diameter row fails: -1 and 1 both lie in S_1 and sit at distance 2.

use locapprox::metric::{audit_metric, LocalityScale, Sample};
use locapprox::residue::Modulus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = audit_metric(&LocalityScale::new(3, 1)?, &Modulus::field(257)?, Sample::Exhaustive, &[])?;
    println!("sort size {}", report.sort_size);
    report.write_csv(std::io::stdout())?;
    println!("passed: {}", report.passed());
    Ok(())
}
