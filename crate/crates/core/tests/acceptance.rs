//! Acceptance suite: one PASS/FAIL line per check, exit status 1 if any
//! check fails. Informational lines are prefixed with INFO.

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locapprox::logic::{eval_finite, gen::random_formula, los_scan, parse_formula, EvalMode, LogicError, PrimeLadder};
use locapprox::metric::{audit_metric, decode, dist, encode, enumerate_sort, DecodeOutcome, LocalityScale, Sample};
use locapprox::poly::PolySystem;
use locapprox::rational::{q_frac, q_to_string, BoundedRational, Q};
use locapprox::residue::{project_ring_to_field, Modulus};
use locapprox::structures::{
    covering_radius, encode_matrix, decode_matrix, sample_point, variety_points, GridSpec, GroupFamily, HeightBound,
    ResidueMatrix, VarietyScan,
};

struct Suite {
    failed: usize,
}

impl Suite {
    fn report(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

/// Reduced `k1/k2` with `|k1| <= h`, `1 <= k2 <= h`, by brute force.
fn reduced_rationals(h: i64) -> Vec<BoundedRational> {
    let mut out = Vec::new();
    for k2 in 1..=h {
        for k1 in -h..=h {
            if num_integer::gcd(k1, k2) == 1 {
                out.push(BoundedRational::new(k1, k2).unwrap());
            }
        }
    }
    out
}

/// The representing pair of `z` minimizing `k2`, then `|k1|`, by search.
fn minimal_pair_oracle(z: u64, q: u64, h: i64) -> Option<(i64, i64)> {
    for k2 in 1..=h {
        let mut best: Option<i64> = None;
        for k1 in -h..=h {
            if (k1 as i128 - (z as i128) * (k2 as i128)).rem_euclid(q as i128) == 0
                && best.is_none_or(|b: i64| k1.abs() < b.abs())
            {
                best = Some(k1);
            }
        }
        if let Some(k1) = best {
            let g = num_integer::gcd(k1, k2);
            if g == 1 {
                return Some((k1, k2));
            }
        }
    }
    None
}

fn round_trip(s: &mut Suite) {
    let t = Instant::now();
    let q = Modulus::field(1009).unwrap();
    let sc = LocalityScale::new(10, 1).unwrap();
    let all = reduced_rationals(10);
    let exact = all
        .iter()
        .filter(|r| decode(&encode(r, &q).unwrap(), &sc).unwrap() == DecodeOutcome::Local(**r))
        .count();
    let el = t.elapsed();
    s.report("round-trip exactness", exact == all.len() && el < Duration::from_secs(1),
        format!("{exact}/{} exact at q=1009 L=10 in {}", all.len(), secs(el)));
}

fn decode_oracle(s: &mut Suite) {
    let t = Instant::now();
    let q = Modulus::field(257).unwrap();
    let sc = LocalityScale::new(10, 1).unwrap();
    let agree = (0..257u64)
        .filter(|&z| {
            let ours = decode(&q.residue(z), &sc).unwrap().local().map(|r| (r.numer(), r.denom() as i64));
            ours == minimal_pair_oracle(z, 257, 10)
        })
        .count();
    let el = t.elapsed();
    s.report("decode-oracle equivalence", agree == 257 && el < Duration::from_secs(1),
        format!("{agree}/257 agree at L=10 in {}", secs(el)));
}

fn finite_homomorphism(s: &mut Suite) {
    let t = Instant::now();
    let q = Modulus::field((1 << 31) - 1).unwrap();
    // x + y has numerator up to 2*30*30 and denominator up to 30*30
    let sc = LocalityScale::new(1800, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pick = |rng: &mut ChaCha8Rng| {
        BoundedRational::new(rng.gen_range(-30..=30), rng.gen_range(1..=30)).unwrap()
    };
    let mut failures = 0;
    for _ in 0..10_000 {
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        let (ex, ey) = (encode(&x, &q).unwrap(), encode(&y, &q).unwrap());
        let sum = decode(&ex.add(&ey).unwrap(), &sc).unwrap().local().map(|r| r.to_q());
        let prod = decode(&ex.mul(&ey).unwrap(), &sc).unwrap().local().map(|r| r.to_q());
        if sum != Some(x.to_q() + y.to_q()) {
            failures += 1;
        }
        if prod != Some(x.to_q() * y.to_q()) {
            failures += 1;
        }
    }
    let el = t.elapsed();
    s.report("finite homomorphism", failures == 0 && el < Duration::from_secs(5),
        format!("{failures} failures over 10000 pairs at q=2^31-1 in {}", secs(el)));
}

fn metric_axioms(s: &mut Suite) {
    let q = Modulus::field(257).unwrap();
    let sc = LocalityScale::new(3, 1).unwrap();
    let sort = enumerate_sort(&sc, &q, None).unwrap();
    let report = audit_metric(&sc, &q, Sample::Exhaustive, &[]).unwrap();
    // decoded distances at the widest window of F_257, then the axioms by brute force
    let wide = LocalityScale::new(11, 1).unwrap();
    let d: Vec<Vec<Q>> = sort
        .iter()
        .map(|x| sort.iter().map(|y| dist(&x.residue, &y.residue, &wide).unwrap().to_q()).collect())
        .collect();
    let n = sort.len();
    let (mut tri, mut ident, mut diam) = (0u64, 0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            ident += u64::from(d[i][j].is_zero() != (i == j));
            diam += u64::from(d[i][j] > Q::one());
            for k in 0..n {
                tri += u64::from(d[i][k] > &d[i][j] + &d[j][k]);
            }
        }
    }
    let get = |n: &str| report.axiom(n).map_or(u64::MAX, |a| a.failed);
    s.report("triangle inequality", get("triangle") == 0 && tri == 0,
        format!("{} violations (oracle {tri}) over {} triples", get("triangle"), sort.len().pow(3)));
    s.report("identity of indiscernibles", get("identity") == 0 && ident == 0,
        format!("{} violations (oracle {ident})", get("identity")));
    s.report("diameter d <= m", get("diameter") == 0 && diam == 0,
        format!("{} violations (oracle {diam}); d(-1, 1) = 2 > m = 1", get("diameter")));
}

fn ring_compatibility(s: &mut Suite) {
    let ring = Modulus::ring(1028).unwrap();
    let field = Modulus::field(257).unwrap();
    let mut checked = 0;
    let mut failures = 0;
    for k in 0..1028i64 {
        let r = BoundedRational::integer(k);
        checked += 1;
        if project_ring_to_field(&encode(&r, &ring).unwrap(), &field).unwrap() != encode(&r, &field).unwrap() {
            failures += 1;
        }
        // odd denominators are units in Z_1028
        for den in [3i64, 5, 7, 9] {
            let r = BoundedRational::new(k, den).unwrap();
            checked += 1;
            if project_ring_to_field(&encode(&r, &ring).unwrap(), &field).unwrap() != encode(&r, &field).unwrap() {
                failures += 1;
            }
        }
    }
    s.report("ring compatibility", failures == 0, format!("{failures} failures over {checked} encodings from Z_1028"));
}

fn membership(m: &ResidueMatrix) -> bool {
    match m {
        ResidueMatrix::Real(a) => {
            a.transpose().mul(a).unwrap().is_identity() && a.det().unwrap().value() == 1
        }
        ResidueMatrix::Gaussian(a) => {
            let det = a.det().unwrap();
            a.conj_transpose().mul(a).unwrap().is_identity() && det.re().value() == 1 && det.im().value() == 0
        }
    }
}

fn group_approximation(s: &mut Suite) {
    let q = Modulus::field((1 << 61) - 1).unwrap();
    let sc = LocalityScale::new(10, 8).unwrap();
    let h = HeightBound::new(10_000).unwrap();
    for fam in [GroupFamily::so(3).unwrap(), GroupFamily::su(2).unwrap()] {
        let t = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut failures = 0;
        for _ in 0..100 {
            let (a, b) = (sample_point(&fam, h, &mut rng), sample_point(&fam, h, &mut rng));
            let (ea, eb) = (encode_matrix(&a, &q).unwrap(), encode_matrix(&b, &q).unwrap());
            if !membership(&ea) || !membership(&eb) {
                failures += 1;
            }
            let decoded = decode_matrix(&ea.mul(&eb).unwrap(), &sc).unwrap();
            if decoded != Some(a.mul(&b).unwrap()) {
                failures += 1;
            }
        }
        let el = t.elapsed();
        s.report(&format!("group approximation {fam}"), failures == 0 && el < Duration::from_secs(10),
            format!("{failures} failures over 100 pairs, heights <= 10^4, q=2^61-1, in {}", secs(el)));
    }
}

fn density(s: &mut Suite) {
    let t = Instant::now();
    let so3 = GroupFamily::so(3).unwrap();
    let radii: Vec<f64> = [10, 100, 1000]
        .iter()
        .map(|&h| covering_radius(&so3, HeightBound::new(h).unwrap(), GridSpec::Halton { count: 512 }, 0).unwrap().radius)
        .collect();
    let el = t.elapsed();
    let ok = radii.windows(2).all(|w| w[1] <= w[0]) && radii[2] < radii[0] && el < Duration::from_secs(60);
    s.report("density surrogate", ok, format!("radii {:.6} {:.6} {:.6} at H=10,100,1000 in {}", radii[0], radii[1], radii[2], secs(el)));
}

fn circle_variety(s: &mut Suite) {
    let circle: PolySystem = "vars: x y\nx^2 + y^2 - 1\n".parse().unwrap();
    let r = variety_points(&circle, &Modulus::field(1009).unwrap(), &LocalityScale::new(5, 1).unwrap(),
        VarietyScan::Exhaustive { budget: 1 << 20 }).unwrap();
    let exact = r.points.iter().all(|p| {
        let pt: Vec<Q> = p.iter().map(|x| x.to_q()).collect();
        circle.polys[0].eval_q(&pt).is_zero()
    });
    let br = |t: &str| t.parse::<BoundedRational>().unwrap();
    let has = [["3/5", "4/5"], ["0", "1"], ["1", "0"]].iter().all(|[x, y]| r.contains(&[br(x), br(y)]));
    s.report("variety limit", exact && r.spurious == 0 && has,
        format!("{} points, all exact: {exact}, spurious {}, required points present: {has}", r.points.len(), r.spurious));
}

/// `min over x in S_1 at unit l of min(1, |g(x)| / 2)` by direct enumeration.
fn dist2_oracle(l: i64, g: impl Fn(&Q) -> Q) -> Q {
    reduced_rationals(l)
        .iter()
        .filter(|r| r.numer().unsigned_abs() <= r.denom())
        .map(|r| (g(&r.to_q()).abs() / Q::from_integer(2.into())).min(Q::one()))
        .min()
        .unwrap()
}

fn los_proxy(s: &mut Suite) {
    let half = q_frac(1, 2);
    let square = parse_formula("sup x:S1 . inf y:S1 . d2((y*y), x)").unwrap();
    let ladder = PrimeLadder::windowed(&square, &[2, 4, 8]).unwrap();
    let scan = los_scan(&square, &ladder, HeightBound::new(8).unwrap()).unwrap();
    let ok = scan.rows.iter().all(|r| r.value == half) && scan.limit == half && scan.final_gap.is_zero();
    let shown: Vec<String> = scan.rows.iter().map(|r| format!("q={} l={} {}", r.q, r.l, q_to_string(&r.value))).collect();
    s.report("Los proxy, square formula", ok,
        format!("{}; limit {}; gap {}", shown.join(", "), q_to_string(&scan.limit), q_to_string(&scan.final_gap)));

    let sqrt2 = |text: &str, g: fn(&Q) -> Q| -> (Vec<(u64, Q, Q)>, bool) {
        let f = parse_formula(text).unwrap();
        let ladder = PrimeLadder::windowed(&f, &[4, 16, 64]).unwrap();
        let mut oracle_ok = true;
        let rows = ladder
            .rungs()
            .iter()
            .map(|(q, sc)| {
                let v = eval_finite(&f, q, sc.l(), EvalMode::Exhaustive).unwrap();
                oracle_ok &= v == dist2_oracle(sc.l() as i64, g);
                (sc.l(), v, q_frac(2, sc.height() as i64))
            })
            .collect();
        (rows, oracle_ok)
    };
    let verdict = |rows: &[(u64, Q, Q)]| {
        rows.iter().all(|(_, v, b)| v.is_positive() && v <= b) && rows.windows(2).all(|w| w[1].1 < w[0].1)
    };
    let describe = |rows: &[(u64, Q, Q)]| {
        rows.iter().map(|(l, v, b)| format!("l={l} {} (bound {})", q_to_string(v), q_to_string(b))).collect::<Vec<_>>().join(", ")
    };
    let (rows, oracle_ok) = sqrt2("inf x:S1 . d2((x*x), 2)", |x| x * x - Q::from_integer(2.into()));
    s.report("Los proxy, Dirichlet decay", verdict(&rows) && oracle_ok,
        format!("{}; oracle agrees: {oracle_ok}; x in S1 keeps x^2 <= 1", describe(&rows)));
    let (rows, oracle_ok) = sqrt2("inf x:S1 . d2((2*(x*x)), 1)", |x| Q::from_integer(2.into()) * x * x - Q::one());
    println!("INFO variant inf x:S1 . d2((2*(x*x)), 1): {}; decreasing within bound: {}; oracle agrees: {oracle_ok}",
        describe(&rows), verdict(&rows));
}

fn is_positioned(e: &LogicError) -> bool {
    matches!(
        e,
        LogicError::Parse { line, column, .. }
            | LogicError::UnboundVariable { line, column, .. }
            | LogicError::ShadowedVariable { line, column, .. }
            | LogicError::MalformedLevel { line, column, .. }
            | LogicError::ConstantOutOfRange { line, column, .. }
            if *line >= 1 && *column >= 1
    )
}

fn parser(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut round_trips = 0;
    for _ in 0..1000 {
        let f = random_formula(&mut rng, 6);
        if f.depth() <= 6 && parse_formula(&f.to_string()).as_ref() == Ok(&f) {
            round_trips += 1;
        }
    }
    let corpus = include_str!("fixtures/malformed_formulas.txt");
    let cases: Vec<&str> = corpus.split("\n---\n").map(str::trim).filter(|c| !c.is_empty()).collect();
    let rejected = cases.iter().filter(|c| parse_formula(c).as_ref().err().is_some_and(is_positioned)).count();
    s.report("parser round trip and rejection", round_trips == 1000 && rejected == cases.len() && !cases.is_empty(),
        format!("{round_trips}/1000 round trips; {rejected}/{} malformed cases rejected with positions", cases.len()));
}

fn main() {
    let mut s = Suite { failed: 0 };
    round_trip(&mut s);
    decode_oracle(&mut s);
    finite_homomorphism(&mut s);
    metric_axioms(&mut s);
    ring_compatibility(&mut s);
    group_approximation(&mut s);
    density(&mut s);
    circle_variety(&mut s);
    los_proxy(&mut s);
    parser(&mut s);
    println!("acceptance: {} failing", s.failed);
    if s.failed > 0 {
        std::process::exit(1);
    }
}
