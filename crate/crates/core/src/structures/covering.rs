use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::groups::{block_product, half_angles_up_to, planes, quaternions_up_to, rotation_product, unit_quaternions_up_to};
use super::{GroupFamily, GroupKind, HeightBound, RationalMatrix, StructureError};
use crate::rational::Q;

/// Largest point set [`covering_radius`] will build.
pub const MAX_POINTS: usize = 2_000_000;

/// Reference elements the covering radius is measured against.
///
/// `Halton` grids are deterministic. For SO(n) the `k`-th element
/// (`k = 1, 2, ...`) is the ordered product over coordinate planes of the
/// rotation by `2*pi*h_p(k)`, where `h_p` is the radical inverse in the
/// `p`-th prime base. For SU(n) each SU(2) block takes three Halton
/// coordinates `(u1, u2, u3)` through the uniform map
/// `(sqrt(1-u1) sin(2 pi u2), sqrt(1-u1) cos(2 pi u2), sqrt(u1) sin(2 pi u3), sqrt(u1) cos(2 pi u3))`.
/// `Random` feeds uniform seeded coordinates through the same maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridSpec {
    Identity,
    Halton { count: usize },
    Random { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub family: String,
    pub height_bound: u64,
    pub grid_size: usize,
    pub point_count: usize,
    pub radius: f64,
    pub worst_grid_index: usize,
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let (mut f, mut out) = (1.0, 0.0);
    let b = base as u64;
    while k > 0 {
        f /= base as f64;
        out += f * (k % b) as f64;
        k /= b;
    }
    out
}

type Complex = (f64, f64);

fn cmul(a: Complex, b: Complex) -> Complex {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn matmul(n: usize, a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    let mut out = vec![(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            for j in 0..n {
                let y = cmul(x, b[k * n + j]);
                out[i * n + j].0 += y.0;
                out[i * n + j].1 += y.1;
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<Complex> {
    (0..n * n).map(|k| if k / n == k % n { (1.0, 0.0) } else { (0.0, 0.0) }).collect()
}

/// Float grid element from coordinates in `[0, 1)`.
fn grid_element(family: &GroupFamily, coords: &[f64]) -> Vec<Complex> {
    let n = family.n();
    let mut acc = identity(n);
    match family.kind() {
        GroupKind::So => {
            for ((i, j), u) in planes(n).into_iter().zip(coords) {
                let (s, c) = (TAU * u).sin_cos();
                let mut r = identity(n);
                r[i * n + i] = (c, 0.0);
                r[j * n + j] = (c, 0.0);
                r[i * n + j] = (-s, 0.0);
                r[j * n + i] = (s, 0.0);
                acc = matmul(n, &acc, &r);
            }
        }
        _ => {
            for (k, u) in coords.chunks(3).enumerate() {
                let (r1, r2) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
                let (s2, c2) = (TAU * u[1]).sin_cos();
                let (s3, c3) = (TAU * u[2]).sin_cos();
                let (a, b, c, d) = (r1 * s2, r1 * c2, r2 * s3, r2 * c3);
                let mut r = identity(n);
                r[k * n + k] = (a, b);
                r[k * n + k + 1] = (-c, d);
                r[(k + 1) * n + k] = (c, d);
                r[(k + 1) * n + k + 1] = (a, -b);
                acc = matmul(n, &acc, &r);
            }
        }
    }
    acc
}

fn coordinate_count(family: &GroupFamily) -> usize {
    let n = family.n();
    match family.kind() {
        GroupKind::So => n * (n - 1) / 2,
        _ => 3 * (n - 1),
    }
}

/// The reference grid, flattened in the layout of [`RationalMatrix::to_f64`].
pub fn reference_grid(family: &GroupFamily, grid: GridSpec, seed: u64) -> Result<Vec<Vec<f64>>, StructureError> {
    if !family.is_compact() {
        return Err(StructureError::NonCompactFamily(*family));
    }
    let dims = coordinate_count(family);
    if dims > PRIMES.len() {
        return Err(StructureError::DegenerateParams(format!("{family} needs more than {} Halton bases", PRIMES.len())));
    }
    let elements: Vec<Vec<Complex>> = match grid {
        GridSpec::Identity => vec![identity(family.n())],
        GridSpec::Halton { count } => (1..=count as u64)
            .map(|k| {
                let coords: Vec<f64> = PRIMES[..dims].iter().map(|&p| radical_inverse(k, p)).collect();
                grid_element(family, &coords)
            })
            .collect(),
        GridSpec::Random { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let coords: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
                    grid_element(family, &coords)
                })
                .collect()
        }
    };
    let gaussian = family.is_gaussian();
    Ok(elements
        .into_iter()
        .map(|e| if gaussian { e.iter().flat_map(|z| [z.0, z.1]).collect() } else { e.iter().map(|z| z.0).collect() })
        .collect())
}

/// Every generated point whose per-factor denominators multiply to at most `h`.
///
/// SO(n) points are ordered products of one half-angle rotation per
/// coordinate plane; SU(n) points are products of SU(2) blocks from rational
/// unit quaternions. The sets are nested in `h`.
pub fn enumerate_points(family: &GroupFamily, h: HeightBound, cap: usize) -> Result<Vec<RationalMatrix>, StructureError> {
    let n = family.n();
    match family.kind() {
        GroupKind::So => {
            let base = half_angles_up_to(h.get());
            let count = n * (n - 1) / 2;
            let mut out = Vec::new();
            let mut stack = Vec::with_capacity(count);
            so_rec(n, count, &base, h.get(), &mut stack, &mut out, cap)?;
            Ok(out)
        }
        GroupKind::Su => {
            let base = quaternions_up_to(h.get(), cap)?;
            let mut out = Vec::new();
            let mut stack = Vec::with_capacity(n - 1);
            su_rec(n, &base, h.get(), &mut stack, &mut out, cap)?;
            Ok(out)
        }
        GroupKind::Sl2Gaussian => Err(StructureError::NonCompactFamily(*family)),
    }
}

fn so_rec(
    n: usize,
    count: usize,
    base: &[(super::HalfAngle, u64)],
    budget: u64,
    stack: &mut Vec<super::HalfAngle>,
    out: &mut Vec<RationalMatrix>,
    cap: usize,
) -> Result<(), StructureError> {
    if stack.len() == count {
        if out.len() >= cap {
            return Err(StructureError::EnumerationBudgetExceeded(cap));
        }
        out.push(RationalMatrix::Real(rotation_product(n, stack)));
        return Ok(());
    }
    for &(t, d) in base.iter().filter(|(_, d)| *d <= budget) {
        stack.push(t);
        so_rec(n, count, base, budget / d, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

fn su_rec(
    n: usize,
    base: &[([Q; 4], u64)],
    budget: u64,
    stack: &mut Vec<[Q; 4]>,
    out: &mut Vec<RationalMatrix>,
    cap: usize,
) -> Result<(), StructureError> {
    if stack.len() == n - 1 {
        if out.len() >= cap {
            return Err(StructureError::EnumerationBudgetExceeded(cap));
        }
        out.push(RationalMatrix::Gaussian(block_product(n, stack)));
        return Ok(());
    }
    for (quat, d) in base.iter().filter(|(_, d)| *d <= budget) {
        stack.push(quat.clone());
        su_rec(n, base, budget / d, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

/// Exact point `entries / den` with Gaussian-integer entries.
#[derive(Debug, Clone)]
struct Scaled {
    entries: Vec<(i128, i128)>,
    den: i128,
}

impl Scaled {
    fn identity(n: usize) -> Self {
        Scaled { entries: (0..n * n).map(|k| if k / n == k % n { (1, 0) } else { (0, 0) }).collect(), den: 1 }
    }

    fn mul(&self, other: &Scaled, n: usize) -> Option<Scaled> {
        let mut out = vec![(0i128, 0i128); n * n];
        for i in 0..n {
            for k in 0..n {
                let (a, b) = self.entries[i * n + k];
                if a == 0 && b == 0 {
                    continue;
                }
                for j in 0..n {
                    let (c, d) = other.entries[k * n + j];
                    let re = a.checked_mul(c)?.checked_sub(b.checked_mul(d)?)?;
                    let im = a.checked_mul(d)?.checked_add(b.checked_mul(c)?)?;
                    let e = &mut out[i * n + j];
                    *e = (e.0.checked_add(re)?, e.1.checked_add(im)?);
                }
            }
        }
        Some(Scaled { entries: out, den: self.den.checked_mul(other.den)? })
    }

    fn to_f64(&self, gaussian: bool) -> Vec<f64> {
        let d = self.den as f64;
        if gaussian {
            self.entries.iter().flat_map(|&(re, im)| [re as f64 / d, im as f64 / d]).collect()
        } else {
            self.entries.iter().map(|&(re, _)| re as f64 / d).collect()
        }
    }
}

/// Per-factor choices with their denominator cost, one list per factor slot.
fn scaled_factors(family: &GroupFamily, h: HeightBound, cap: usize) -> Result<Vec<Vec<(Scaled, u64)>>, StructureError> {
    let n = family.n();
    let mut slots = Vec::new();
    match family.kind() {
        GroupKind::So => {
            let base = half_angles_up_to(h.get());
            for (i, j) in planes(n) {
                let slot = base
                    .iter()
                    .map(|&(t, d)| {
                        let (a, b) = t.parts();
                        let (a, b) = (a as i128, b as i128);
                        let (s, c, sn) = (a * a + b * b, b * b - a * a, 2 * a * b);
                        let mut m = Scaled::identity(n);
                        for e in m.entries.iter_mut() {
                            e.0 *= s;
                        }
                        m.entries[i * n + i] = (c, 0);
                        m.entries[j * n + j] = (c, 0);
                        m.entries[i * n + j] = (-sn, 0);
                        m.entries[j * n + i] = (sn, 0);
                        m.den = s;
                        (m, d)
                    })
                    .collect();
                slots.push(slot);
            }
        }
        GroupKind::Su => {
            let base = unit_quaternions_up_to(h.get(), cap)?;
            for k in 0..n - 1 {
                let slot = base
                    .iter()
                    .map(|&(x, d)| {
                        let [a, b, c, e] = x.map(|v| v as i128);
                        let d = d as i128;
                        let mut m = Scaled::identity(n);
                        for v in m.entries.iter_mut() {
                            v.0 *= d;
                        }
                        m.entries[k * n + k] = (a, b);
                        m.entries[k * n + k + 1] = (-c, e);
                        m.entries[(k + 1) * n + k] = (c, e);
                        m.entries[(k + 1) * n + k + 1] = (a, -b);
                        m.den = d;
                        (m, d as u64)
                    })
                    .collect();
                slots.push(slot);
            }
        }
        GroupKind::Sl2Gaussian => return Err(StructureError::NonCompactFamily(*family)),
    }
    Ok(slots)
}

#[derive(Debug)]
enum Stop {
    Overflow,
    Budget,
}

fn scaled_rec(
    slots: &[Vec<(Scaled, u64)>],
    n: usize,
    gaussian: bool,
    budget: u64,
    prefix: &Scaled,
    out: &mut Vec<f64>,
    count: &mut usize,
    cap: usize,
) -> Result<(), Stop> {
    let Some((slot, rest)) = slots.split_first() else {
        if *count >= cap {
            return Err(Stop::Budget);
        }
        *count += 1;
        out.extend(prefix.to_f64(gaussian));
        return Ok(());
    };
    for (m, d) in slot.iter().filter(|(_, d)| *d <= budget) {
        let next = prefix.mul(m, n).ok_or(Stop::Overflow)?;
        scaled_rec(rest, n, gaussian, budget / d, &next, out, count, cap)?;
    }
    Ok(())
}

/// The point set of [`enumerate_points`], flattened row by row into floats.
///
/// Products are formed exactly in 128-bit integers over a common
/// denominator and divided only at the end; on overflow the rational path
/// is used instead.
fn points_f64(family: &GroupFamily, h: HeightBound, cap: usize) -> Result<(Vec<f64>, usize), StructureError> {
    let n = family.n();
    let slots = scaled_factors(family, h, cap)?;
    let (mut out, mut count) = (Vec::new(), 0);
    match scaled_rec(&slots, n, family.is_gaussian(), h.get(), &Scaled::identity(n), &mut out, &mut count, cap) {
        Ok(()) => Ok((out, count)),
        Err(Stop::Budget) => Err(StructureError::EnumerationBudgetExceeded(cap)),
        Err(Stop::Overflow) => {
            let pts = enumerate_points(family, h, cap)?;
            let count = pts.len();
            Ok((pts.iter().flat_map(|m| m.to_f64()).collect(), count))
        }
    }
}

/// `max` over the grid of the Frobenius distance to the nearest generated
/// point of height at most `h`.
pub fn covering_radius(family: &GroupFamily, h: HeightBound, grid: GridSpec, seed: u64) -> Result<CoveringReport, StructureError> {
    let reference = reference_grid(family, grid, seed)?;
    let (points, count) = points_f64(family, h, MAX_POINTS)?;
    if count == 0 {
        return Err(StructureError::EmptyPointSet);
    }
    let stride = points.len() / count;
    let (mut radius, mut worst) = (0.0f64, 0);
    for (idx, g) in reference.iter().enumerate() {
        let mut best = f64::INFINITY;
        for p in points.chunks_exact(stride) {
            let mut acc = 0.0;
            for (x, y) in g.iter().zip(p) {
                acc += (x - y) * (x - y);
                if acc >= best {
                    break;
                }
            }
            if acc < best {
                best = acc;
            }
        }
        let nearest = best.sqrt();
        if nearest > radius {
            radius = nearest;
            worst = idx;
        }
    }
    Ok(CoveringReport {
        family: family.to_string(),
        height_bound: h.get(),
        grid_size: reference.len(),
        point_count: count,
        radius,
        worst_grid_index: worst,
    })
}
