//! The extremal eigenfunction families: two-term differences, kernel
//! eigenfunctions on a large sphere of one dimension lower lifted by one
//! extra frequency, and the three-dimensional construction over products of
//! primes `≡ 1 (mod 4)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::bounds::upper_bound_eval;
use super::gram::{best_pair_quotient, local_mass, rayleigh_quotient};
use crate::error::{domain, Error, Result};
use crate::expoly::ExponentialPolynomial;
use crate::lattice::{enumerate_sphere, primes_one_mod_four, LatticePoint};
use crate::report::{Report, Table};
use crate::spectral::{guaranteed_order, kernel_vector, moment_matrix, vanishing_order, RationalVector};

/// Largest support handed to the exact kernel computation.
pub const KERNEL_SUPPORT_CAP: usize = 128;
/// Largest `P_m` accepted by [`family_wigert`].
pub const WIGERT_CAP: u64 = 10_000_000_000;
/// Largest `4ϱ²` searched by [`family_hyperplane`].
pub const HYPERPLANE_NORM_CAP: f64 = 5000.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub params: BTreeMap<String, Value>,
    /// Squared eigenvalue `λ²` of the constructed eigenfunction.
    pub n: u64,
    /// Size of the frequency support.
    pub count: usize,
    pub r: f64,
    pub measured: f64,
    pub bound: Option<f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub function: ExponentialPolynomial,
    #[serde(skip)]
    pub coefficients: Option<RationalVector>,
}

impl FamilyReport {
    fn dim(&self) -> usize {
        self.function.dim()
    }
}

impl Report for FamilyReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["family", "d", "n", "r", "measured", "bound"]);
        t.push(vec![
            self.family.clone().into(),
            self.dim().into(),
            self.n.into(),
            self.r.into(),
            self.measured.into(),
            self.bound.into(),
        ]);
        t
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        domain(format!("r must lie in (0, 1), got {r}"))
    }
}

/// `u_n = e^{i a_n·x} − e^{i b_n·x}` with `a_n = (n, n+1, 0, …)` and
/// `b_n = (n+1, n, 0, …)`.
///
/// `measured` is the local mass `fint_{B_r}|u_n|²` (the torus mean of
/// `|u_n|²` is 2); the Rayleigh quotient is half of it and is listed under
/// `params`.
pub fn family_simple(d: usize, n_index: i64, r: f64) -> Result<FamilyReport> {
    if d < 2 {
        return domain(format!("simple family needs d ≥ 2, got {d}"));
    }
    if n_index < 1 {
        return domain(format!("family index must be ≥ 1, got {n_index}"));
    }
    check_radius(r)?;
    let mut a = vec![0; d];
    let mut b = vec![0; d];
    (a[0], a[1]) = (n_index, n_index + 1);
    (b[0], b[1]) = (n_index + 1, n_index);
    let (a, b) = (LatticePoint::new(a)?, LatticePoint::new(b)?);
    let norm = a.norm_sq();
    if b.norm_sq() != norm {
        return Err(Error::Consistency("simple family frequencies on different spheres".into()));
    }
    let u = ExponentialPolynomial::new(
        d,
        [(a, Complex64::new(1.0, 0.0)), (b, Complex64::new(-1.0, 0.0))],
    )?;
    let mass = local_mass(&u, r)?;
    let mut params = BTreeMap::new();
    params.insert("d".into(), json!(d));
    params.insert("n_index".into(), json!(n_index));
    params.insert("rayleigh_quotient".into(), json!(mass / u.l2_norm_sq()));
    params.insert("leading_order".into(), json!(2.0 * r * r / (d as f64 + 2.0)));
    Ok(FamilyReport {
        family: "simple".into(),
        params,
        n: norm as u64,
        count: 2,
        r,
        measured: mass,
        bound: Some(r * r),
        notes: vec![
            "measured is the local mass of |u|^2 over B_r; the torus mean of |u|^2 is 2".into(),
            "bound r^2 is order-only".into(),
        ],
        function: u,
        coefficients: None,
    })
}

/// The kernel eigenfunction of the reduced moment matrix at the largest
/// order the row count guarantees.
fn extremal_on(points: &[LatticePoint]) -> Result<(RationalVector, i64)> {
    let d = points[0].dim();
    let order = guaranteed_order(d, points.len());
    if order < 0 {
        return Err(Error::Domain("support too small for a vanishing eigenfunction".into()));
    }
    let m = moment_matrix(points, order as u32, true)?;
    let v = kernel_vector(&m)?
        .ok_or_else(|| Error::Consistency("row count below column count but kernel is trivial".into()))?;
    let got = vanishing_order(&v, &v.points, order as u32)?;
    if got < order {
        return Err(Error::Consistency(format!(
            "kernel vector vanishes only to order {got}, expected {order}"
        )));
    }
    Ok((v, order))
}

fn max_pair_dist(points: &[LatticePoint]) -> f64 {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.dist_sq(q));
        }
    }
    (best as f64).sqrt()
}

/// Kernel eigenfunction on the most populated `(d−1)`-sphere `S_{d−1}(√n')`
/// with `n' ∈ (ϱ², 4ϱ²)`, `ϱ = (Kr)^{2−d}`, lifted by `e^{i x_d}`.
///
/// Supports larger than [`KERNEL_SUPPORT_CAP`] are cut down to the points
/// nearest the first canonical point, which keeps the exact kernel
/// computation at desk scale.
pub fn family_hyperplane(d: usize, k: f64, r: f64) -> Result<FamilyReport> {
    if d < 4 {
        return domain(format!("hyperplane family needs d ≥ 4, got {d}"));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return domain(format!("K must be finite and ≥ 1, got {k}"));
    }
    check_radius(r)?;
    let rho = (k * r).powi(2 - d as i32);
    if !(rho >= 1.0) {
        return domain(format!("degenerate search window: ϱ = {rho} < 1"));
    }
    let (lo, hi) = ((rho * rho).floor() as i64 + 1, (4.0 * rho * rho).ceil() as i64 - 1);
    if lo > hi {
        return domain(format!("degenerate search window ({}, {})", rho * rho, 4.0 * rho * rho));
    }
    if 4.0 * rho * rho > HYPERPLANE_NORM_CAP {
        return Err(Error::Range(format!(
            "search window up to {} exceeds the cap {HYPERPLANE_NORM_CAP}",
            4.0 * rho * rho
        )));
    }
    let mut best = None::<(i64, crate::lattice::SphereSet)>;
    for n in lo..=hi {
        let s = enumerate_sphere(d - 1, n)?;
        if best.as_ref().map_or(true, |(_, b)| s.len() > b.len()) {
            best = Some((n, s));
        }
    }
    let (n_best, sphere) = best.expect("window nonempty");
    if sphere.is_empty() {
        return domain("no lattice points anywhere in the search window");
    }
    let full_count = sphere.len();
    let mut support = sphere.into_points();
    let mut notes = vec!["bound is order-only".to_string()];
    if support.len() > KERNEL_SUPPORT_CAP {
        let anchor = support[0].clone();
        support.sort_by_key(|p| (p.dist_sq(&anchor), p.clone()));
        support.truncate(KERNEL_SUPPORT_CAP);
        support.sort();
        notes.push(format!(
            "support cut to the {KERNEL_SUPPORT_CAP} points nearest {anchor} out of {full_count}"
        ));
    }
    let (coeffs, order) = extremal_on(&support)?;
    let base = coeffs.to_expoly()?;
    let measured = rayleigh_quotient(&base, r)?;
    let u = base.lift(1);
    let bound = upper_bound_eval(support.len(), max_pair_dist(&support), order, r)?;
    let mut params = BTreeMap::new();
    params.insert("d".into(), json!(d));
    params.insert("K".into(), json!(k));
    params.insert("varrho".into(), json!(rho));
    params.insert("window".into(), json!([rho * rho, 4.0 * rho * rho]));
    params.insert("n_prime".into(), json!(n_best));
    params.insert("sphere_count".into(), json!(full_count));
    params.insert("vanishing_order".into(), json!(order));
    Ok(FamilyReport {
        family: "hyperplane".into(),
        params,
        n: n_best as u64 + 1,
        count: support.len(),
        r,
        measured,
        bound: Some(bound),
        notes,
        function: u,
        coefficients: Some(coeffs),
    })
}

/// Kernel eigenfunction on `S_2(√P_m)`, `P_m` the product of the primes
/// `p ≤ m` with `p ≡ 1 (mod 4)`, lifted to `T³` by `e^{i x_3}`.
pub fn family_wigert(m: u64, r: f64) -> Result<FamilyReport> {
    check_radius(r)?;
    if m > 1000 {
        return Err(Error::Range(format!("P_{m} exceeds the cap {WIGERT_CAP}")));
    }
    let pp = primes_one_mod_four(m);
    let product = u64::try_from(&pp.product)
        .ok()
        .filter(|p| *p <= WIGERT_CAP)
        .ok_or_else(|| Error::Range(format!("P_{m} = {} exceeds the cap {WIGERT_CAP}", pp.product)))?;
    let sphere = enumerate_sphere(2, product as i64)?;
    let expected = 4usize << pp.omega;
    if sphere.len() != expected {
        return Err(Error::Consistency(format!(
            "S_2(√{product}) has {} points, expected {expected}",
            sphere.len()
        )));
    }
    if sphere.len() > KERNEL_SUPPORT_CAP {
        return Err(Error::Range(format!(
            "{} points exceed the kernel support cap {KERNEL_SUPPORT_CAP}",
            sphere.len()
        )));
    }
    let points = sphere.into_points();
    let (coeffs, order) = extremal_on(&points)?;
    let base = coeffs.to_expoly()?;
    let measured = rayleigh_quotient(&base, r)?;
    let pair = best_pair_quotient(&points, r)?;
    let bound = upper_bound_eval(points.len(), max_pair_dist(&points), order, r)?;
    let mut params = BTreeMap::new();
    params.insert("m".into(), json!(m));
    params.insert("primes".into(), json!(pp.primes));
    params.insert("omega".into(), json!(pp.omega));
    params.insert("product".into(), json!(product));
    params.insert("gamma_lower".into(), json!(order));
    params.insert("best_pair_quotient".into(), json!(pair));
    Ok(FamilyReport {
        family: "wigert".into(),
        params,
        n: product + 1,
        count: points.len(),
        r,
        measured,
        bound: Some(bound),
        notes: vec!["bound is order-only".into()],
        function: base.lift(1),
        coefficients: Some(coeffs),
    })
}
