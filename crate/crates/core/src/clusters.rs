//! Proximity-graph clusters of sphere lattice sets, arc-window checks for
//! integer points on circles, hyperplanarity of clusters, and the
//! cross-cluster gap of the localized mass.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::exact::ExactMatrix;
use crate::expoly::ExponentialPolynomial;
use crate::lattice::{enumerate_sphere, LatticePoint, SphereSet};
use crate::observability::delta_cc;
use crate::report::{Report, Table};

/// Components of the graph with edges `|p − q| < rho`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    pub rho: f64,
    pub components: Vec<Vec<LatticePoint>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component index of every input point, in input order.
    pub fn labels(&self, points: &[LatticePoint]) -> Vec<usize> {
        points
            .iter()
            .map(|p| {
                self.components
                    .iter()
                    .position(|c| c.binary_search(p).is_ok())
                    .expect("every point belongs to a component")
            })
            .collect()
    }
}

impl Report for Partition {
    fn table(&self) -> Table {
        let d = self.components.first().and_then(|c| c.first()).map_or(0, LatticePoint::dim);
        let mut header = vec!["component".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for (i, comp) in self.components.iter().enumerate() {
            for p in comp {
                let mut row = vec![i.into()];
                row.extend(p.coords().iter().map(|&c| c.into()));
                t.rows.push(row);
            }
        }
        t
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            Ordering::Less => self.parent[a] = b,
            Ordering::Greater => self.parent[b] = a,
            Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Components under edges `{p, q : dist_sq(p, q) < bound}`.
fn components_by(points: &[LatticePoint], is_edge: impl Fn(i128) -> bool) -> Vec<Vec<LatticePoint>> {
    let n = points.len();
    let mut ds = DisjointSet::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if is_edge(points[i].dist_sq(&points[j])) {
                ds.union(i, j);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<LatticePoint>> = Default::default();
    for i in 0..n {
        let root = ds.find(i);
        groups.entry(root).or_default().push(points[i].clone());
    }
    let mut comps: Vec<Vec<LatticePoint>> = groups
        .into_values()
        .map(|mut c| {
            c.sort();
            c
        })
        .collect();
    comps.sort();
    comps
}

fn check_distinct(points: &[LatticePoint]) -> Result<()> {
    let mut sorted = points.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return domain("points must be pairwise distinct");
    }
    if let Some(p) = points.first() {
        if points.iter().any(|q| q.dim() != p.dim()) {
            return Err(Error::IndexMismatch("points of mixed dimension".into()));
        }
    }
    Ok(())
}

/// Distances are compared as correctly rounded `f64` square roots, so a
/// threshold equal to a realized distance (e.g. `√2`) is not an edge.
pub fn partition(points: &[LatticePoint], rho: f64) -> Result<Partition> {
    if !(rho > 0.0) || rho.is_nan() {
        return domain(format!("edge threshold must be positive, got {rho}"));
    }
    check_distinct(points)?;
    Ok(Partition {
        rho,
        components: components_by(points, |q| (q as f64).sqrt() < rho),
    })
}

/// Partition at threshold `√bound_sq` decided in exact integer arithmetic.
pub fn partition_sq(points: &[LatticePoint], bound_sq: i128) -> Result<Partition> {
    if bound_sq <= 0 {
        return domain("squared threshold must be positive");
    }
    check_distinct(points)?;
    Ok(Partition {
        rho: (bound_sq as f64).sqrt(),
        components: components_by(points, |q| q < bound_sq),
    })
}

/// True iff the points lie on a common affine hyperplane, decided by the
/// exact rank of their differences.
pub fn is_affine_hyperplane(points: &[LatticePoint]) -> bool {
    if points.len() <= 2 {
        return true;
    }
    let d = points[0].dim();
    let base = &points[0];
    let rows: Vec<Vec<i64>> = points[1..].iter().map(|p| p.sub(base).coords().to_vec()).collect();
    let m = ExactMatrix::from_i64_rows(&rows).expect("rows share the dimension");
    m.rank() + 1 <= d
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnesReport {
    pub d: usize,
    pub n: u64,
    pub count: usize,
    /// `None` stands for +∞: the whole set is already hyperplanar.
    pub threshold: Option<f64>,
    pub threshold_sq: Option<i128>,
    /// `λ^{2/(d+1)!}` for trend comparison; no constant is implied.
    pub scale: f64,
}

impl Report for ConnesReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["d", "n", "count", "threshold", "scale"]);
        t.push(vec![
            self.d.into(),
            self.n.into(),
            self.count.into(),
            self.threshold.map_or_else(|| "inf".into(), Into::into),
            self.scale.into(),
        ]);
        t
    }
}

/// Largest realized distance `ρ*` such that every component of the
/// partition at `ρ*` is hyperplanar.
///
/// Passing is monotone in the threshold (components only merge as it
/// grows, and subsets of hyperplanar sets are hyperplanar), so a binary
/// search over the sorted distinct squared distances is exact.
pub fn connes_threshold(sphere: &SphereSet) -> Result<ConnesReport> {
    let d = sphere.dim();
    if d < 3 {
        return domain(format!("connes threshold needs d ≥ 3, got {d}"));
    }
    if sphere.is_empty() {
        return Err(Error::EmptySphere { d, n: sphere.norm() });
    }
    let pts = sphere.points();
    let fact: f64 = (1..=d + 1).map(|j| j as f64).product();
    let scale = sphere.radius().powf(2.0 / fact);
    let mut report = ConnesReport {
        d,
        n: sphere.norm(),
        count: pts.len(),
        threshold: None,
        threshold_sq: None,
        scale,
    };
    if is_affine_hyperplane(pts) {
        return Ok(report);
    }
    let mut cands: Vec<i128> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            cands.push(p.dist_sq(q));
        }
    }
    cands.sort_unstable();
    cands.dedup();
    let passes = |q: i128| {
        components_by(pts, |x| x < q)
            .iter()
            .all(|c| is_affine_hyperplane(c))
    };
    // cands[0] yields singletons and always passes
    let (mut lo, mut hi) = (0usize, cands.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if passes(cands[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report.threshold_sq = Some(cands[lo]);
    report.threshold = Some((cands[lo] as f64).sqrt());
    Ok(report)
}

/// Canonical angular order around the origin, decided exactly.
fn angular_cmp(a: &LatticePoint, b: &LatticePoint) -> Ordering {
    let half = |p: &LatticePoint| {
        let (x, y) = (p.coords()[0], p.coords()[1]);
        // angle in [0, π) → 0, [π, 2π) → 1
        if y > 0 || (y == 0 && x > 0) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let (ax, ay) = (a.coords()[0] as i128, a.coords()[1] as i128);
        let (bx, by) = (b.coords()[0] as i128, b.coords()[1] as i128);
        0.cmp(&(ax * by - ay * bx))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcViolation {
    pub points: Vec<LatticePoint>,
    pub arc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcCheck {
    pub n: u64,
    pub m: u32,
    pub threshold: f64,
    pub count: usize,
    pub violations: Vec<ArcViolation>,
    /// Windows whose arc fell inside the guard band around the threshold.
    pub guard_band_hits: usize,
}

impl Report for ArcCheck {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "threshold", "m", "violations"]);
        t.push(vec![self.n.into(), self.threshold.into(), (self.m as usize).into(), self.violations.len().into()]);
        t
    }
}

/// `√2·λ^{1/2 − δ(m)}`.
pub fn arc_threshold(lambda: f64, m: u32) -> f64 {
    2f64.sqrt() * lambda.powf(0.5 - delta_cc(m))
}

const GUARD: f64 = 1e-12;

/// Looks for `m + 1` integer points of `S_2(√n)` on an arc shorter than the
/// threshold.
pub fn arc_window_check(n: i64, m: u32) -> Result<ArcCheck> {
    if n < 1 {
        return domain(format!("n must be ≥ 1, got {n}"));
    }
    if m < 1 {
        return domain("window size m must be ≥ 1");
    }
    let sphere = enumerate_sphere(2, n)?;
    let lambda = sphere.radius();
    let threshold = arc_threshold(lambda, m);
    let mut pts = sphere.into_points();
    pts.sort_by(angular_cmp);
    let count = pts.len();
    let mut violations = Vec::new();
    let mut guard_band_hits = 0;
    let w = m as usize;
    if count > w {
        for i in 0..count {
            let a = &pts[i];
            let b = &pts[(i + w) % count];
            let (ax, ay) = (a.coords()[0] as i128, a.coords()[1] as i128);
            let (bx, by) = (b.coords()[0] as i128, b.coords()[1] as i128);
            let cross = ax * by - ay * bx;
            if cross <= 0 {
                // spans at least half the circle, far above any threshold
                continue;
            }
            let dot = ax * bx + ay * by;
            let angle = (cross as f64).atan2(dot as f64);
            let arc = lambda * angle;
            let mut below = arc < threshold;
            if (arc - threshold).abs() <= GUARD * threshold {
                guard_band_hits += 1;
                // second opinion from the chord: arc < T ⇔ |a−b| < 2λ sin(T/2λ)
                let half = threshold / (2.0 * lambda);
                below = half < PI / 2.0 && (a.dist_sq(b) as f64).sqrt() < 2.0 * lambda * half.sin();
            }
            if below {
                violations.push(ArcViolation {
                    points: (0..=w).map(|k| pts[(i + k) % count].clone()).collect(),
                    arc,
                });
            }
        }
    }
    Ok(ArcCheck {
        n: n as u64,
        m,
        threshold,
        count,
        violations,
        guard_band_hits,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSweep {
    pub m: u32,
    pub n_max: i64,
    pub checks: Vec<ArcCheck>,
}

impl ArcSweep {
    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations.len()).sum()
    }
}

impl Report for ArcSweep {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "threshold", "m", "violations"]);
        for c in &self.checks {
            t.rows.extend(c.table().rows);
        }
        t
    }
}

/// `arc_window_check(n, m)` for `1 ≤ n ≤ n_max`, in parallel; `progress` is
/// called with the number of completed items as work finishes.
pub fn arc_window_sweep(n_max: i64, m: u32, progress: impl Fn(usize) + Sync) -> Result<ArcSweep> {
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
    if n_max < 1 {
        return domain("n_max must be ≥ 1");
    }
    let done = AtomicUsize::new(0);
    let checks = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let c = arc_window_check(n, m);
            progress(done.fetch_add(1, AtomicOrdering::Relaxed) + 1);
            c
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ArcSweep { m, n_max, checks })
}

/// Product of per-axis fourth-order B-spline bumps, normalized to unit mass,
/// with support the cube of half-width `σ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub sigma: f64,
}

impl CutoffSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self { sigma })
        } else {
            domain(format!("cutoff radius must be positive, got {sigma}"))
        }
    }

    fn half_step(&self) -> f64 {
        self.sigma / 8.0
    }

    /// `χ̂(ξ) = Π_j sinc(σξ_j/8)^4`.
    pub fn fourier(&self, xi: &[f64]) -> f64 {
        let a = self.half_step();
        xi.iter()
            .map(|&x| {
                let t = a * x;
                if t == 0.0 {
                    1.0
                } else {
                    (t.sin() / t).powi(4)
                }
            })
            .product()
    }

    /// `E(s) = min{1, (8√d/(σ s))^4}`, a bound for `|χ̂(ξ)|` on `|ξ| ≥ s`:
    /// some axis has `|ξ_j| ≥ s/√d` and `|sinc t| ≤ min{1, 1/|t|}`.
    pub fn envelope(&self, d: usize, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        (8.0 * (d as f64).sqrt() / (self.sigma * s)).powi(4).min(1.0)
    }

    /// `χ(x)` itself, as a product of one-dimensional cubic B-splines.
    pub fn value(&self, x: &[f64]) -> f64 {
        let a = self.half_step();
        x.iter().map(|&t| cubic_bspline(t / (2.0 * a)) / (2.0 * a)).product()
    }

    /// The cube `[−σ/2, σ/2]^d` lies in `B_σ` only for `d ≤ 4`.
    fn check_dim(&self, d: usize) -> Result<()> {
        if d <= 4 {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "product cutoff support leaves B_σ in dimension {d}"
            )))
        }
    }
}

/// Density of the sum of four independent uniforms on `[−1/2, 1/2]`.
fn cubic_bspline(t: f64) -> f64 {
    let t = t.abs();
    if t >= 2.0 {
        0.0
    } else if t >= 1.0 {
        (2.0 - t).powi(3) / 6.0
    } else {
        (4.0 - 6.0 * t * t + 3.0 * t.powi(3)) / 6.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionGap {
    pub rho: f64,
    pub r: f64,
    pub sigma: f64,
    pub components: usize,
    pub cross_pairs: usize,
    pub envelope: f64,
    pub lhs_gap: f64,
    /// `½·#V·E(rρ)·‖û‖²`, the bound as stated.
    pub rhs_bound: f64,
    pub holds: bool,
    /// `#V·E(rρ)·‖û‖²`, what the cross-term estimate actually yields.
    pub rhs_bound_full: f64,
    pub holds_full: bool,
}

impl Report for DecompositionGap {
    fn table(&self) -> Table {
        let mut t = Table::new(&["rho", "r", "sigma", "components", "lhs_gap", "rhs_bound", "holds"]);
        t.push(vec![
            self.rho.into(),
            self.r.into(),
            self.sigma.into(),
            self.components.into(),
            self.lhs_gap.into(),
            self.rhs_bound.into(),
            (if self.holds { "true" } else { "false" }).into(),
        ]);
        t
    }
}

/// `Σ ±e^{ik·x}` over `points` with independent fair signs from `seed`.
pub fn random_sign_function(points: &[LatticePoint], seed: u64) -> Result<ExponentialPolynomial> {
    let Some(first) = points.first() else {
        return domain("random sign function needs a nonempty support");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(LatticePoint, f64)> = points
        .iter()
        .map(|p| (p.clone(), if rng.gen::<bool>() { 1.0 } else { -1.0 }))
        .collect();
    ExponentialPolynomial::from_real_terms(first.dim(), terms)
}

/// `|r^{−d}∫χ(x/r)|u|² − Σ_α r^{−d}∫χ(x/r)|Π_α u|²|`, which is the sum of
/// `c_k c̄_ℓ χ̂(r(k−ℓ))` over pairs in different clusters, against
/// `½·#V·E(rρ)·‖û‖²`.
///
/// Summing `½(|c_k|² + |c_ℓ|²)` over all ordered pairs gives `#V·‖û‖²`,
/// not half of it, so the stated bound can fail when the coefficients are
/// aligned; the doubled bound is reported alongside.
pub fn decomposition_gap(u: &ExponentialPolynomial, rho: f64, r: f64, cutoff: &CutoffSpec) -> Result<DecompositionGap> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("radius must be positive, got {r}"));
    }
    cutoff.check_dim(u.dim())?;
    if u.is_zero() {
        return Err(Error::ZeroFunction("decomposition of the zero function".into()));
    }
    let support = u.support();
    let coeffs: Vec<Complex64> = u.coefficients();
    let part = partition(&support, rho)?;
    let labels = part.labels(&support);
    let mut gap = Complex64::new(0.0, 0.0);
    let mut cross_pairs = 0;
    for i in 0..support.len() {
        for j in 0..support.len() {
            if labels[i] == labels[j] {
                continue;
            }
            cross_pairs += 1;
            let xi: Vec<f64> = support[i]
                .coords()
                .iter()
                .zip(support[j].coords())
                .map(|(a, b)| r * (a - b) as f64)
                .collect();
            gap += coeffs[i] * coeffs[j].conj() * cutoff.fourier(&xi);
        }
    }
    let envelope = cutoff.envelope(u.dim(), r * rho);
    let rhs = 0.5 * support.len() as f64 * envelope * u.l2_norm_sq();
    let lhs = gap.norm();
    let rhs_full = 2.0 * rhs;
    Ok(DecompositionGap {
        rho,
        r,
        sigma: cutoff.sigma,
        components: part.len(),
        cross_pairs: cross_pairs / 2,
        envelope,
        lhs_gap: lhs,
        rhs_bound: rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
        rhs_bound_full: rhs_full,
        holds_full: lhs <= rhs_full * (1.0 + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[&[i64]]) -> Vec<LatticePoint> {
        coords.iter().map(|c| LatticePoint::new(c.to_vec()).unwrap()).collect()
    }

    #[test]
    fn partition_examples() {
        let s = enumerate_sphere(2, 25).unwrap();
        assert_eq!(partition(s.points(), 1.0).unwrap().len(), 12);
        let p = partition(s.points(), 1.5).unwrap();
        assert_eq!(p.len(), 8);
        assert_eq!(p.components.iter().filter(|c| c.len() == 2).count(), 4);
        assert_eq!(partition(s.points(), 100.0).unwrap().len(), 1);
        assert!(partition(s.points(), 0.0).is_err());
        // a threshold equal to a realized distance is not an edge
        assert_eq!(partition(s.points(), 2f64.sqrt()).unwrap().len(), 12);
        assert_eq!(partition_sq(s.points(), 2).unwrap().len(), 12);
        assert_eq!(partition_sq(s.points(), 3).unwrap().len(), 8);
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(partition(&pts(&[&[1, 0], &[1, 0]]), 1.0).is_err());
    }

    #[test]
    fn hyperplane_examples() {
        assert!(is_affine_hyperplane(&pts(&[&[3, 4], &[4, 3]])));
        assert!(!is_affine_hyperplane(&pts(&[&[5, 0], &[0, 5], &[-5, 0], &[0, -5]])));
        assert!(is_affine_hyperplane(&pts(&[&[1, 2, 3], &[4, 5, 6]])));
        assert!(is_affine_hyperplane(&pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1]])));
        assert!(!is_affine_hyperplane(&pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])));
    }

    #[test]
    fn connes_examples() {
        let oct = enumerate_sphere(3, 1).unwrap();
        let c = connes_threshold(&oct).unwrap();
        assert_eq!(c.threshold_sq, Some(2));
        assert_eq!(c.threshold, Some(2f64.sqrt()));
        let origin = enumerate_sphere(3, 0).unwrap();
        assert_eq!(connes_threshold(&origin).unwrap().threshold, None);
        assert!(connes_threshold(&enumerate_sphere(2, 25).unwrap()).is_err());
    }

    #[test]
    fn arc_examples() {
        let c = arc_window_check(25, 2).unwrap();
        assert!((c.threshold - 2f64.sqrt() * 5f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((c.threshold - 2.418).abs() < 1e-3);
        assert!(c.violations.is_empty());
        let e = arc_window_check(3, 2).unwrap();
        assert_eq!(e.count, 0);
        assert!(e.violations.is_empty());
        assert!(arc_window_check(1105, 2).unwrap().violations.is_empty());
        assert_eq!(arc_window_check(1105, 2).unwrap().count, 32);
    }

    #[test]
    fn arc_check_detects_clustered_points_with_a_loose_threshold() {
        // m = 1 asks for two points on an arc below √2; the minimal chord is √2
        let c = arc_window_check(25, 1).unwrap();
        assert!((c.threshold - 2f64.sqrt()).abs() < 1e-15);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn angular_order_is_counterclockwise_from_positive_axis() {
        let mut p = enumerate_sphere(2, 25).unwrap().into_points();
        p.sort_by(angular_cmp);
        let angles: Vec<f64> = p
            .iter()
            .map(|q| {
                let a = (q.coords()[1] as f64).atan2(q.coords()[0] as f64);
                if a < 0.0 {
                    a + 2.0 * PI
                } else {
                    a
                }
            })
            .collect();
        assert!(angles.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(p[0], LatticePoint::new(vec![5, 0]).unwrap());
    }

    #[test]
    fn cutoff_transform_matches_direct_integration() {
        let c = CutoffSpec::new(2.0).unwrap();
        // 1D: χ̂(ξ) = ∫ χ(x) cos(ξx) dx over the support [−σ/2, σ/2]
        let n = 20000;
        let h = c.sigma / n as f64;
        for &xi in &[0.0, 0.7, 3.0, 11.0] {
            let s: f64 = (0..n)
                .map(|i| {
                    let x = -c.sigma / 2.0 + (i as f64 + 0.5) * h;
                    c.value(&[x]) * (xi * x).cos() * h
                })
                .sum();
            assert!((s - c.fourier(&[xi])).abs() < 1e-7, "ξ={xi}");
        }
        assert_eq!(c.value(&[c.sigma / 2.0 + 1e-9]), 0.0);
        assert!(c.value(&[0.0]) > 0.0);
    }

    #[test]
    fn envelope_dominates_transform() {
        let c = CutoffSpec::new(1.3).unwrap();
        for d in 1..=3usize {
            for i in 0..4000 {
                let t = i as f64 * 0.37;
                let xi: Vec<f64> = (0..d).map(|j| t * ((j as f64 + 1.0) * 0.77 + t).sin()).collect();
                let s = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(c.fourier(&xi).abs() <= c.envelope(d, s) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn decomposition_trivial_cases() {
        let s = enumerate_sphere(2, 25).unwrap();
        let u = ExponentialPolynomial::from_real_terms(2, s.points().iter().cloned().map(|p| (p, 1.0))).unwrap();
        let g = decomposition_gap(&u, 100.0, 0.1, &CutoffSpec::new(1.0).unwrap()).unwrap();
        assert_eq!(g.lhs_gap, 0.0);
        assert!(g.holds);
        let single = ExponentialPolynomial::single(LatticePoint::new(vec![3, 4]).unwrap());
        let g = decomposition_gap(&single, 1.5, 0.1, &CutoffSpec::new(1.0).unwrap()).unwrap();
        assert_eq!(g.lhs_gap, 0.0);
        // aligned coefficients and an envelope of 1: the halved bound fails
        let g = decomposition_gap(&u, 1.5, 0.1, &CutoffSpec::new(1.0).unwrap()).unwrap();
        assert_eq!(g.components, 8);
        assert!(g.holds_full);
        assert!(!g.holds);
        let five = ExponentialPolynomial::constant(5, 1.0);
        assert!(matches!(
            decomposition_gap(&five, 1.5, 0.1, &CutoffSpec::new(1.0).unwrap()),
            Err(Error::Unsupported(_))
        ));
    }
}
