//! Integer points on spheres `k_1² + … + k_d² = n`.
//!
//! Enumeration is exhaustive and returns points in lexicographic order, so
//! every downstream matrix and report has a canonical row/column order. The
//! arithmetic side (divisor counts, the three-square criterion, trial-division
//! factorization, primes `≡ 1 (mod 4)`) is kept at desk scale: inputs up to
//! about `10^10`, factors found by trial division up to `√n`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest accepted squared radius. Coordinates then stay below `10^6`, far
/// inside the `i32` range that [`LatticePoint`] enforces.
pub const MAX_NORM: u64 = 1_000_000_000_000;

/// Coordinates are bounded so that squared norms and squared distances in any
/// practical dimension fit in `i128` without overflow.
const COORD_LIMIT: i64 = i32::MAX as i64;

/// A point of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return domain("lattice point needs at least one coordinate");
        }
        if let Some(c) = coords.iter().find(|c| c.abs() > COORD_LIMIT) {
            return Err(Error::Range(format!(
                "coordinate {c} exceeds the supported magnitude {COORD_LIMIT}"
            )));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> i128 {
        self.0.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    /// Exact squared norm as a big integer.
    pub fn norm_sq_big(&self) -> BigInt {
        self.0
            .iter()
            .map(|&c| BigInt::from(c) * BigInt::from(c))
            .sum()
    }

    /// Squared Euclidean distance. Panics on mismatched dimensions.
    pub fn dist_sq(&self, other: &Self) -> i128 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let t = a as i128 - b as i128;
                t * t
            })
            .sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (self.dist_sq(other) as f64).sqrt()
    }

    /// `self − other`, used for recentring supports.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Appends one coordinate (lifting `k'` to `(k', t)`).
    pub fn lifted(&self, last: i64) -> Self {
        let mut c = self.0.clone();
        c.push(last);
        Self(c)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

impl TryFrom<Vec<i64>> for LatticePoint {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LatticePoint> for Vec<i64> {
    fn from(p: LatticePoint) -> Self {
        p.0
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All integer points of norm `√n` in dimension `d`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereSet {
    d: usize,
    n: u64,
    points: Vec<LatticePoint>,
}

impl SphereSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Squared radius `λ²`.
    pub fn norm(&self) -> u64 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<LatticePoint> {
        self.points
    }

    /// One point per row, header `x1,…,xd`.
    pub fn to_csv(&self) -> String {
        let mut out = (1..=self.d)
            .map(|i| format!("x{i}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for p in &self.points {
            let row = p
                .coords()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

fn check_norm(n: i64) -> Result<u64> {
    if n < 0 {
        return domain(format!("squared radius must be nonnegative, got {n}"));
    }
    let n = n as u64;
    if n > MAX_NORM {
        return Err(Error::Range(format!(
            "squared radius {n} exceeds the desk-scale cap {MAX_NORM}"
        )));
    }
    Ok(n)
}

/// Enumerates `S_d(√n) = {k ∈ Z^d : |k|² = n}`.
pub fn enumerate_sphere(d: usize, n: i64) -> Result<SphereSet> {
    if d < 2 {
        return domain(format!("dimension must be at least 2, got {d}"));
    }
    let n = check_norm(n)?;
    let mut points = Vec::new();
    let mut buf = vec![0i64; d];
    fill(&mut buf, 0, n, &mut points);
    Ok(SphereSet { d, n, points })
}

fn fill(buf: &mut [i64], depth: usize, rem: u64, out: &mut Vec<LatticePoint>) {
    let d = buf.len();
    if depth == d - 1 {
        let s = isqrt(rem);
        if s * s == rem {
            if s == 0 {
                buf[depth] = 0;
                out.push(LatticePoint(buf.to_vec()));
            } else {
                for v in [-(s as i64), s as i64] {
                    buf[depth] = v;
                    out.push(LatticePoint(buf.to_vec()));
                }
            }
        }
        return;
    }
    let m = isqrt(rem) as i64;
    for x in -m..=m {
        buf[depth] = x;
        fill(buf, depth + 1, rem - (x * x) as u64, out);
    }
}

/// `4·(d_1(n) − d_3(n))`, the number of representations of `n` as a sum of
/// two squares, where `d_j` counts divisors `≡ j (mod 4)`.
pub fn r2_via_divisors(n: i64) -> Result<u64> {
    if n <= 0 {
        return domain(format!("divisor formula needs n ≥ 1, got {n}"));
    }
    let n = n as u64;
    let (mut d1, mut d3) = (0u64, 0u64);
    let mut tally = |q: u64| match q % 4 {
        1 => d1 += 1,
        3 => d3 += 1,
        _ => {}
    };
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            tally(i);
            if i * i != n {
                tally(n / i);
            }
        }
        i += 1;
    }
    Ok(4 * (d1 - d3))
}

/// Legendre's three-square criterion: `n` is *not* a sum of three squares
/// exactly when `n = 4^a (8b + 7)`.
///
/// Note that a commonly quoted phrasing of this fact puts the negation on the
/// wrong side ("empty iff `n ≠ 4^a(8b+7)`"); enumeration confirms the
/// classical direction implemented here.
pub fn is_three_square_excluded(n: i64) -> Result<bool> {
    let mut n = check_norm(n)?;
    if n == 0 {
        return Ok(false);
    }
    while n % 4 == 0 {
        n /= 4;
    }
    Ok(n % 8 == 7)
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `true` when some prime `p ≡ 3 (mod 4)` divides `n` to an odd power, which
/// is exactly when `n` is not a sum of two squares.
pub fn has_odd_power_of_three_mod_four_prime(n: u64) -> bool {
    factorize(n)
        .into_iter()
        .any(|(p, e)| p % 4 == 3 && e % 2 == 1)
}

/// Cap counts for a sphere set: `N_d(λ,R)`, the largest number of points in
/// a subset of diameter at most `2R`, and the density `A_d(λ,R)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapStatistics {
    pub radius: f64,
    /// Largest ball count `#{q : |q − p| ≤ R}` over centres `p` in the set.
    pub count_lower: usize,
    /// Exact maximum, present only when the set was small enough to search.
    pub count_exact: Option<usize>,
    /// `count^{1/(d−1)} / R` from the best available count.
    pub density: f64,
}

/// Default size limit for the exact bounded-diameter search.
pub const DEFAULT_EXACT_LIMIT: usize = 64;

/// Hard ceiling on the exact search (bitset width).
pub const MAX_EXACT_LIMIT: usize = 128;

pub fn cap_statistics(sphere: &SphereSet, radius: f64, exact_limit: usize) -> Result<CapStatistics> {
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("cap radius must be positive, got {radius}"));
    }
    if sphere.is_empty() {
        return domain("cap statistics need a nonempty sphere set");
    }
    let pts = sphere.points();
    let r_sq = radius * radius;
    let count_lower = pts
        .iter()
        .map(|p| pts.iter().filter(|q| (p.dist_sq(q) as f64) <= r_sq).count())
        .max()
        .unwrap_or(0);

    let count_exact = if pts.len() <= exact_limit.min(MAX_EXACT_LIMIT) {
        let diam_sq = 4.0 * r_sq;
        let adj: Vec<u128> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                pts.iter().enumerate().fold(0u128, |acc, (j, q)| {
                    if i != j && (p.dist_sq(q) as f64) <= diam_sq {
                        acc | (1u128 << j)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Some(max_clique(&adj))
    } else {
        None
    };

    let best = count_exact.unwrap_or(count_lower) as f64;
    let density = best.powf(1.0 / (sphere.dim() as f64 - 1.0)) / radius;
    Ok(CapStatistics {
        radius,
        count_lower,
        count_exact,
        density,
    })
}

/// Maximum clique of a graph on at most 128 vertices given as adjacency
/// bitsets. Branch and bound with a greedy-colouring bound.
fn max_clique(adj: &[u128]) -> usize {
    struct Search<'a> {
        adj: &'a [u128],
        best: usize,
    }

    impl Search<'_> {
        fn colour_order(&self, cand: u128) -> Vec<(usize, usize)> {
            let mut order = Vec::with_capacity(cand.count_ones() as usize);
            let mut uncoloured = cand;
            let mut colour = 0;
            while uncoloured != 0 {
                colour += 1;
                let mut q = uncoloured;
                while q != 0 {
                    let v = q.trailing_zeros() as usize;
                    q &= !(1u128 << v);
                    q &= !self.adj[v];
                    uncoloured &= !(1u128 << v);
                    order.push((v, colour));
                }
            }
            order
        }

        fn expand(&mut self, size: usize, mut cand: u128) {
            let order = self.colour_order(cand);
            for &(v, colour) in order.iter().rev() {
                if size + colour <= self.best {
                    return;
                }
                let next = cand & self.adj[v];
                if next == 0 {
                    self.best = self.best.max(size + 1);
                } else {
                    self.expand(size + 1, next);
                }
                cand &= !(1u128 << v);
            }
        }
    }

    let n = adj.len();
    if n == 0 {
        return 0;
    }
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut s = Search { adj, best: 0 };
    s.expand(0, all);
    s.best
}

/// The primes `p ≤ m` with `p ≡ 1 (mod 4)`, their count and their product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeProduct {
    pub bound: u64,
    pub primes: Vec<u64>,
    pub omega: usize,
    #[serde(serialize_with = "crate::report::ser_decimal")]
    pub product: BigUint,
}

pub fn primes_one_mod_four(m: u64) -> PrimeProduct {
    let limit = m as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        if i % 4 == 1 {
            primes.push(i as u64);
        }
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    let product = primes.iter().fold(BigUint::from(1u32), |acc, &p| acc * p);
    PrimeProduct {
        bound: m,
        omega: primes.len(),
        primes,
        product,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn origin_only_for_zero() {
        let s = enumerate_sphere(2, 0).unwrap();
        assert_eq!(s.points(), &[pt(&[0, 0])]);
    }

    #[test]
    fn circle_of_radius_five() {
        let s = enumerate_sphere(2, 25).unwrap();
        assert_eq!(s.len(), 12);
        let expected: Vec<LatticePoint> = [
            [-5, 0],
            [-4, -3],
            [-4, 3],
            [-3, -4],
            [-3, 4],
            [0, -5],
            [0, 5],
            [3, -4],
            [3, 4],
            [4, -3],
            [4, 3],
            [5, 0],
        ]
        .iter()
        .map(|c| pt(c))
        .collect();
        assert_eq!(s.points(), expected.as_slice());
    }

    #[test]
    fn seven_has_no_three_square_representation() {
        assert!(enumerate_sphere(3, 7).unwrap().is_empty());
        assert!(is_three_square_excluded(7).unwrap());
        assert!(!is_three_square_excluded(14).unwrap());
        assert!(is_three_square_excluded(28).unwrap());
        assert!(!is_three_square_excluded(0).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(enumerate_sphere(1, 4), Err(Error::Domain(_))));
        assert!(matches!(enumerate_sphere(2, -1), Err(Error::Domain(_))));
        assert!(matches!(r2_via_divisors(0), Err(Error::Domain(_))));
        assert!(LatticePoint::new(vec![]).is_err());
        assert!(LatticePoint::new(vec![i64::MAX]).is_err());
    }

    #[test]
    fn divisor_formula_examples() {
        assert_eq!(r2_via_divisors(1).unwrap(), 4);
        assert_eq!(r2_via_divisors(25).unwrap(), 12);
        assert_eq!(r2_via_divisors(21).unwrap(), 0);
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(32045), vec![(5, 1), (13, 1), (17, 1), (29, 1)]);
        assert!(has_odd_power_of_three_mod_four_prime(21));
        assert!(!has_odd_power_of_three_mod_four_prime(9 * 25));
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, 1 << 52, (1 << 52) + 1, u64::MAX] {
            let s = isqrt(n);
            assert!(s * s <= n);
            assert!((s + 1).checked_mul(s + 1).map_or(true, |q| q > n));
        }
    }

    #[test]
    fn prime_products() {
        let p = primes_one_mod_four(2);
        assert!(p.primes.is_empty());
        assert_eq!(p.omega, 0);
        assert_eq!(p.product, BigUint::from(1u32));
        let p = primes_one_mod_four(5);
        assert_eq!(p.primes, vec![5]);
        assert_eq!(p.product, BigUint::from(5u32));
        let p = primes_one_mod_four(30);
        assert_eq!(p.primes, vec![5, 13, 17, 29]);
        assert_eq!(p.omega, 4);
        assert_eq!(p.product, BigUint::from(32045u32));
    }

    #[test]
    fn cap_on_radius_five_circle() {
        let s = enumerate_sphere(2, 25).unwrap();
        // nearest neighbours (3,4),(4,3) sit at distance √2: outside a unit
        // ball around either, inside a set of diameter 2
        let c = cap_statistics(&s, 1.0, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(c.count_lower, 1);
        assert_eq!(c.count_exact, Some(2));
        assert!((c.density - 2.0).abs() < 1e-15);

        let c = cap_statistics(&s, std::f64::consts::PI * 5.0, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(c.count_exact, Some(12));

        let c = cap_statistics(&s, 1.0, 4).unwrap();
        assert_eq!(c.count_exact, None);
        assert!((c.density - 1.0).abs() < 1e-15);

        assert!(cap_statistics(&s, 0.0, 10).is_err());
    }

    #[test]
    fn cap_on_single_point() {
        let s = enumerate_sphere(2, 0).unwrap();
        let c = cap_statistics(&s, 1.0, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(c.count_lower, 1);
        assert_eq!(c.count_exact, Some(1));
        assert_eq!(c.density, 1.0);
    }

    #[test]
    fn clique_search_matches_brute_force() {
        // every subset of S_2(65) (16 points) checked against diameter 2R
        let s = enumerate_sphere(2, 65).unwrap();
        let pts = s.points();
        for radius in [1.0, 2.0, 4.0, 6.0, 9.0] {
            let lim = 4.0 * radius * radius;
            let mut best = 0;
            for mask in 1u32..(1 << pts.len()) {
                let idx: Vec<usize> = (0..pts.len()).filter(|i| mask >> i & 1 == 1).collect();
                if idx.len() <= best {
                    continue;
                }
                let ok = idx.iter().all(|&i| {
                    idx.iter()
                        .all(|&j| (pts[i].dist_sq(&pts[j]) as f64) <= lim)
                });
                if ok {
                    best = idx.len();
                }
            }
            let c = cap_statistics(&s, radius, 64).unwrap();
            assert_eq!(c.count_exact, Some(best), "R = {radius}");
            assert!(c.count_lower <= best);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = enumerate_sphere(2, 25).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x1,x2");
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[1], "-5,0");
    }
}
