//! Evaluate formulas along windowed prime ladders and compare with the
//! evaluation over bounded-height rationals.

use locapprox::logic::{los_scan, parse_formula, PrimeLadder};
use locapprox::rational::q_to_string;
use locapprox::structures::HeightBound;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("sup x:S1 . inf y:S1 . d2((y*y), x)", vec![2, 4, 8], 8),
        ("inf x:S1 . d2((2*(x*x)), 1)", vec![4, 16, 64], 64),
    ];
    for (text, ls, h) in cases {
        let f = parse_formula(text)?;
        let ladder = PrimeLadder::windowed(&f, &ls)?;
        let r = los_scan(&f, &ladder, HeightBound::new(h)?)?;
        println!("{f}\n  limit at H = {h}: {}", q_to_string(&r.limit));
        for row in &r.rows {
            println!("  q = {:>8}  l = {:>2}  value = {:>7}  gap = {}", row.q, row.l, q_to_string(&row.value), q_to_string(&row.gap));
        }
    }
    Ok(())
}
