//! Parse, print and evaluate formulas; malformed input reports a position.

use locapprox::logic::{eval_finite, eval_limit, parse_formula, EvalMode};
use locapprox::rational::q_to_string;
use locapprox::residue::Modulus;
use locapprox::structures::HeightBound;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_formula("# distance to a square\nsup x:S1 . inf y:S1 . min(d2((y*y), x), 1/2)")?;
    println!("{f}");
    println!("F_3001, l = 3: {}", q_to_string(&eval_finite(&f, &Modulus::field(3001)?, 3, EvalMode::Exhaustive)?));
    println!("limit, H = 3: {}", q_to_string(&eval_limit(&f, HeightBound::new(3)?)?));
    for bad in ["d1(x, 0)", "sup x:S1 . (x + )", "inf x:S0 . 1"] {
        println!("{bad:?}: {}", parse_formula(bad).unwrap_err());
    }
    Ok(())
}
