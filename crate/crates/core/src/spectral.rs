//! Vanishing orders of eigenfunctions at the origin.
//!
//! An eigenfunction `u = Σ û_k e^{ik·x}` supported on a sphere set vanishes
//! to order `N` at the origin exactly when every moment `Σ û_k k^α` with
//! `|α| ≤ N` is zero. Because `|k|² = n` on the support, the moments with
//! `α_d ≥ 2` follow from those with `α_d ∈ {0, 1}`, which gives the smaller
//! "reduced" moment matrix. Everything here is exact integer or rational
//! arithmetic: entries `k^α` leave the 64-bit range already for modest radii
//! and orders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::expoly::ExponentialPolynomial;
use crate::lattice::{enumerate_sphere, LatticePoint};

/// A multi-index `α ∈ N^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(alpha: Vec<u32>) -> Self {
        Self(alpha)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `k^α = Π k_i^{α_i}` with `0⁰ = 1`.
    pub fn monomial(&self, k: &LatticePoint) -> BigInt {
        self.0
            .iter()
            .zip(k.coords())
            .filter(|(&a, _)| a > 0)
            .fold(BigInt::one(), |acc, (&a, &c)| acc * BigInt::from(c).pow(a))
    }
}

/// All `α ∈ N^d` with `|α| = degree`, first coordinate descending.
pub fn indices_of_degree(d: usize, degree: u32) -> Vec<MultiIndex> {
    fn rec(d: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == d - 1 {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(d, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    rec(d, degree, &mut Vec::with_capacity(d), &mut out);
    out
}

/// All `α` with `|α| ≤ order`, graded by degree.
pub fn full_indices(d: usize, order: u32) -> Vec<MultiIndex> {
    (0..=order).flat_map(|g| indices_of_degree(d, g)).collect()
}

/// `Σ_0 ∪ Σ_1`: the indices with `|α| ≤ order` and last exponent 0 or 1,
/// `Σ_0` first, each graded by degree.
pub fn reduced_indices(d: usize, order: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for last in 0..=1u32 {
        if last > order {
            break;
        }
        for g in 0..=order - last {
            for head in indices_of_degree(d - 1, g) {
                let mut a = head.0;
                a.push(last);
                out.push(MultiIndex(a));
            }
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `C(N+d−1, d−1) + C(N+d−2, d−1)`, the number of reduced rows.
pub fn reduced_row_count(d: usize, order: u32) -> u128 {
    let (d, n) = (d as u64, order as u64);
    binomial(n + d - 1, d - 1) + if n + d >= 2 { binomial(n + d - 2, d - 1) } else { 0 }
}

/// `C(N+d, d)`, the number of full rows.
pub fn full_row_count(d: usize, order: u32) -> u128 {
    binomial(order as u64 + d as u64, d as u64)
}

/// The matrix `M[α][k] = k^α` of the moment map.
#[derive(Clone, Debug, Serialize)]
pub struct MomentMatrix {
    pub rows: Vec<MultiIndex>,
    pub cols: Vec<LatticePoint>,
    pub entries: ExactMatrix,
    pub reduced: bool,
}

fn common_dim(points: &[LatticePoint]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::Domain("point list is empty".into()));
    };
    let d = first.dim();
    if points.iter().any(|p| p.dim() != d) {
        return Err(Error::Domain("points of mixed dimensions".into()));
    }
    Ok(d)
}

pub fn moment_matrix(points: &[LatticePoint], order: u32, reduced: bool) -> Result<MomentMatrix> {
    let d = common_dim(points)?;
    let rows = if reduced {
        reduced_indices(d, order)
    } else {
        full_indices(d, order)
    };
    let powers = PowerTable::new(points, order);
    let data = rows
        .iter()
        .map(|a| (0..points.len()).map(|j| powers.monomial(j, a)).collect())
        .collect();
    Ok(MomentMatrix {
        entries: ExactMatrix::from_rows(points.len(), data)?,
        rows,
        cols: points.to_vec(),
        reduced,
    })
}

/// Cached `k_i^e` for every point, coordinate and exponent up to `order`.
struct PowerTable {
    // pow[j][i][e] = (k_j)_i^e
    pow: Vec<Vec<Vec<BigInt>>>,
}

impl PowerTable {
    fn new(points: &[LatticePoint], order: u32) -> Self {
        let pow = points
            .iter()
            .map(|p| {
                p.coords()
                    .iter()
                    .map(|&c| {
                        let base = BigInt::from(c);
                        let mut v = Vec::with_capacity(order as usize + 1);
                        v.push(BigInt::one());
                        for e in 1..=order as usize {
                            let next = &v[e - 1] * &base;
                            v.push(next);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Self { pow }
    }

    fn monomial(&self, j: usize, alpha: &MultiIndex) -> BigInt {
        alpha
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .fold(BigInt::one(), |acc, (i, &a)| acc * &self.pow[j][i][a as usize])
    }
}

pub fn exact_rank(m: &MomentMatrix) -> usize {
    m.entries.rank()
}

/// Exact rational coefficients indexed by lattice points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalVector {
    pub points: Vec<LatticePoint>,
    #[serde(serialize_with = "crate::report::ser_rational_vec")]
    pub values: Vec<BigRational>,
}

impl RationalVector {
    pub fn new(points: Vec<LatticePoint>, values: Vec<BigRational>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::IndexMismatch(format!(
                "{} points but {} coefficients",
                points.len(),
                values.len()
            )));
        }
        Ok(Self { points, values })
    }

    pub fn from_i64(points: Vec<LatticePoint>, values: &[i64]) -> Result<Self> {
        Self::new(
            points,
            values
                .iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Floating-point view as an exponential polynomial.
    pub fn to_expoly(&self) -> Result<ExponentialPolynomial> {
        let d = common_dim(&self.points)?;
        ExponentialPolynomial::from_real_terms(
            d,
            self.points
                .iter()
                .cloned()
                .zip(self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN))),
        )
    }

    /// Same coefficients on the translated support `k − shift`.
    pub fn recentered(&self, shift: &LatticePoint) -> Self {
        Self {
            points: self.points.iter().map(|p| p.sub(shift)).collect(),
            values: self.values.clone(),
        }
    }

    /// Integer coefficients proportional to these (cleared denominators).
    fn integer_multiple(&self) -> Vec<BigInt> {
        let lcm = self
            .values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        self.values
            .iter()
            .map(|v| v.numer() * (&lcm / v.denom()))
            .collect()
    }
}

pub fn kernel_vector(m: &MomentMatrix) -> Result<Option<RationalVector>> {
    Ok(m
        .entries
        .kernel_vector()?
        .map(|values| RationalVector {
            points: m.cols.clone(),
            values,
        }))
}

/// Largest `N ≤ max_order` such that all moments of order `≤ N` vanish.
///
/// Returns −1 when the zeroth moment (the value at the origin) is nonzero,
/// and `max_order` when every checked moment vanishes; callers who need the
/// exact order must raise `max_order` until the result drops below it.
pub fn vanishing_order(coeffs: &RationalVector, points: &[LatticePoint], max_order: u32) -> Result<i64> {
    if coeffs.points.as_slice() != points {
        return Err(Error::IndexMismatch(
            "coefficient support differs from the point list".into(),
        ));
    }
    let d = common_dim(points)?;
    let c = coeffs.integer_multiple();
    let powers = PowerTable::new(points, max_order);
    for g in 0..=max_order {
        for a in indices_of_degree(d, g) {
            let moment = c
                .iter()
                .enumerate()
                .filter(|(_, cj)| !cj.is_zero())
                .fold(BigInt::zero(), |acc, (j, cj)| acc + cj * powers.monomial(j, &a));
            if !moment.is_zero() {
                return Ok(g as i64 - 1);
            }
        }
    }
    Ok(max_order as i64)
}

/// Maximal vanishing order `Γ_d(√n)` over the eigenspace, certified up to
/// `max_order`.
///
/// Each order is decided on the full moment matrix and cross-checked against
/// the reduced one; a disagreement is reported as a consistency error.
pub fn gamma_max(d: usize, n: i64, max_order: u32) -> Result<i64> {
    let sphere = enumerate_sphere(d, n)?;
    if sphere.is_empty() {
        return Err(Error::EmptySphere { d, n: n as u64 });
    }
    let pts = sphere.points();
    for order in 0..=max_order {
        let full = exact_rank(&moment_matrix(pts, order, false)?);
        let reduced = exact_rank(&moment_matrix(pts, order, true)?);
        if full != reduced {
            return Err(Error::Consistency(format!(
                "full rank {full} differs from reduced rank {reduced} at order {order}"
            )));
        }
        if full == pts.len() {
            return Ok(order as i64 - 1);
        }
    }
    Ok(max_order as i64)
}

/// Bracketing values for `Γ_d(λ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaBounds {
    /// Largest `N` whose reduced row count is below `N_d(λ)`; −1 if none.
    pub lower: i64,
    /// `⌊min{N_d(λ) − 1, 2dλ}⌋ − 1`.
    pub upper_m: i64,
    /// `N_d(λ) − 2` for `d = 2`; for `d ≥ 3`,
    /// `2(d−2)λ + exp(C ln λ / ln ln λ) − 1`, absent when `λ ≤ e`.
    pub upper_d: Option<f64>,
    pub count: usize,
}

impl GammaBounds {
    /// The tighter of the two upper bounds, as an integer.
    pub fn upper(&self) -> i64 {
        match self.upper_d {
            Some(u) if u.is_finite() => self.upper_m.min(u.floor() as i64),
            _ => self.upper_m,
        }
    }
}

/// Largest `N` with `C(N+d−1,d−1) + C(N+d−2,d−1) < count`, or −1.
pub fn guaranteed_order(d: usize, count: usize) -> i64 {
    let mut order: i64 = -1;
    while reduced_row_count(d, (order + 1) as u32) < count as u128 {
        order += 1;
    }
    order
}

pub fn gamma_bounds(d: usize, n: i64, c_arith: f64) -> Result<GammaBounds> {
    let sphere = enumerate_sphere(d, n)?;
    if sphere.is_empty() {
        return Err(Error::EmptySphere { d, n: n as u64 });
    }
    let count = sphere.len();
    let lambda = sphere.radius();
    let lower = guaranteed_order(d, count);
    let m = ((count - 1) as f64).min(2.0 * d as f64 * lambda);
    let upper_m = m.floor() as i64 - 1;
    let upper_d = if d == 2 {
        Some(count as f64 - 2.0)
    } else if lambda > std::f64::consts::E {
        let ll = lambda.ln().ln();
        Some(2.0 * (d as f64 - 2.0) * lambda + (c_arith * lambda.ln() / ll).exp() - 1.0)
    } else {
        None
    };
    Ok(GammaBounds {
        lower,
        upper_m,
        upper_d,
        count,
    })
}
