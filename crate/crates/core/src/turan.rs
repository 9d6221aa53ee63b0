//! Sup norms of exponential polynomials on intervals, boxes and balls, and
//! the Turán-type ratio statistics built on them.
//!
//! Every set is the image of a parameter box (Cartesian for intervals and
//! boxes, polar/spherical for balls), so the search is a dense inclusive grid
//! over that box followed by coordinate-wise golden-section refinement around
//! the best cells.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::ddouble::{cis, Dd, DdComplex};
use crate::error::{Error, Result};
use crate::expoly::ExponentialPolynomial;
use crate::lattice::LatticePoint;
use crate::report::{Cell, Report, Table};

pub const MAX_TERMS: usize = 64;
pub const MAX_DIM: usize = 3;

/// How many of the best grid cells get refined.
const SEEDS: usize = 8;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescriptor {
    /// `[lo, hi]` on the circle.
    Interval { lo: f64, hi: f64 },
    /// Product of closed intervals.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// The whole torus `[0, 2π)^d`.
    Torus { dim: usize },
}

impl SetDescriptor {
    pub fn centered_interval(half: f64) -> Self {
        Self::Interval { lo: -half, hi: half }
    }

    pub fn centered_box(half: &[f64]) -> Self {
        Self::Box {
            lo: half.iter().map(|h| -h).collect(),
            hi: half.to_vec(),
        }
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        Self::Ball {
            center: vec![0.0; dim],
            radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } => 1,
            Self::Box { lo, .. } => lo.len(),
            Self::Ball { center, .. } => center.len(),
            Self::Torus { dim } => *dim,
        }
    }

    /// Short label used in tables.
    pub fn label(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
        match self {
            Self::Interval { lo, hi } => format!("[{lo} {hi}]"),
            Self::Box { lo, hi } => format!("box[{}|{}]", list(lo), list(hi)),
            Self::Ball { center, radius } => format!("ball[{}|{radius}]", list(center)),
            Self::Torus { dim } => format!("torus{dim}"),
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || d > MAX_DIM {
            return Err(Error::Unsupported(format!("sup norm on a {d}-dimensional set")));
        }
        let ok = match self {
            Self::Interval { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            Self::Box { lo, hi } => {
                lo.len() == hi.len() && lo.iter().zip(hi).all(|(a, b)| a.is_finite() && b.is_finite() && a <= b)
            }
            Self::Ball { center, radius } => center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius >= 0.0,
            Self::Torus { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("malformed set {}", self.label())))
        }
    }

    /// Parameter box and which parameters wrap around.
    fn params(&self) -> (Vec<(f64, f64)>, Vec<bool>) {
        match self {
            Self::Interval { lo, hi } => (vec![(*lo, *hi)], vec![false]),
            Self::Box { lo, hi } => (lo.iter().copied().zip(hi.iter().copied()).collect(), vec![false; lo.len()]),
            Self::Torus { dim } => (vec![(0.0, 2.0 * PI); *dim], vec![true; *dim]),
            Self::Ball { center, radius } => match center.len() {
                1 => (vec![(-radius, *radius)], vec![false]),
                2 => (vec![(0.0, *radius), (0.0, 2.0 * PI)], vec![false, true]),
                _ => (vec![(0.0, *radius), (0.0, PI), (0.0, 2.0 * PI)], vec![false, false, true]),
            },
        }
    }

    fn point(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Self::Ball { center, .. } => {
                let mut x = match center.len() {
                    1 => vec![p[0]],
                    2 => vec![p[0] * p[1].cos(), p[0] * p[1].sin()],
                    _ => vec![
                        p[0] * p[1].sin() * p[2].cos(),
                        p[0] * p[1].sin() * p[2].sin(),
                        p[0] * p[1].cos(),
                    ],
                };
                for (xi, ci) in x.iter_mut().zip(center) {
                    *xi += ci;
                }
                x
            }
            _ => p.to_vec(),
        }
    }
}

/// Default per-axis grid size: `4096·terms` in one dimension, coarser above.
pub fn default_resolution(f: &ExponentialPolynomial, dim: usize) -> usize {
    let terms = f.len().max(1);
    match dim {
        1 => 4096 * terms,
        2 => (64 * terms).clamp(256, 1024),
        _ => (16 * terms).clamp(48, 96),
    }
}

fn check_caps(f: &ExponentialPolynomial, set: &SetDescriptor) -> Result<()> {
    set.validate()?;
    if f.len() > MAX_TERMS {
        return Err(Error::Range(format!("{} terms exceeds the cap of {MAX_TERMS}", f.len())));
    }
    if f.dim() != set.dim() {
        return Err(Error::IndexMismatch(format!(
            "{}-dimensional function on a {}-dimensional set",
            f.dim(),
            set.dim()
        )));
    }
    Ok(())
}

/// Phase tables make the grid pass a sum of products instead of repeated
/// trigonometric calls.
struct Evaluator {
    freqs: Vec<Vec<f64>>,
    ints: Vec<Vec<i64>>,
    coeffs: Vec<Complex64>,
    l1: f64,
}

/// Below this fraction of `‖f̂‖₁` the f64 sum has lost most of its digits
/// and refinement switches to double-double evaluation.
const CANCELLATION_RATIO: f64 = 1e-6;

impl Evaluator {
    fn new(f: &ExponentialPolynomial) -> Self {
        Self {
            freqs: f.terms().iter().map(|(k, _)| k.as_f64()).collect(),
            ints: f.terms().iter().map(|(k, _)| k.coords().to_vec()).collect(),
            coeffs: f.coefficients(),
            l1: f.l1_norm(),
        }
    }

    fn abs_precise(&self, x: &[f64]) -> f64 {
        let axes: Vec<DdComplex> = x.iter().map(|&xi| cis(xi)).collect();
        let mut s = DdComplex { re: Dd::ZERO, im: Dd::ZERO };
        for (k, c) in self.ints.iter().zip(&self.coeffs) {
            let mut e = DdComplex::ONE;
            for (&kj, z) in k.iter().zip(&axes) {
                if kj != 0 {
                    e = e.mul(z.powi_unit(kj));
                }
            }
            s = s.add(e.scale(c.re, c.im));
        }
        s.norm()
    }

    fn abs(&self, x: &[f64]) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, c) in self.freqs.iter().zip(&self.coeffs) {
            let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
            s += c * Complex64::from_polar(1.0, phase);
        }
        s.norm()
    }
}

/// `‖f‖_{L∞(set)}` with `resolution` samples per parameter axis.
pub fn sup_norm(f: &ExponentialPolynomial, set: &SetDescriptor, resolution: usize) -> Result<f64> {
    check_caps(f, set)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    if f.len() == 1 {
        return Ok(f.l1_norm());
    }
    let resolution = resolution.max(3);
    let (bounds, periodic) = set.params();
    let ev = Evaluator::new(f);
    let dim = bounds.len();

    // grid nodes per axis; periodic axes skip the duplicate endpoint
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .zip(&periodic)
        .map(|(&(lo, hi), &wrap)| {
            if hi == lo {
                return vec![lo];
            }
            if wrap {
                (0..resolution).map(|i| lo + (hi - lo) * i as f64 / resolution as f64).collect()
            } else {
                (0..resolution).map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64).collect()
            }
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();

    let mut best: Vec<(f64, usize)> = (0..total)
        .into_par_iter()
        .with_min_len(4096)
        .map(|flat| {
            let p = unflatten(flat, &axes);
            (ev.abs(&set.point(&p)), flat)
        })
        .collect();
    best.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    best.truncate(SEEDS);

    let steps: Vec<f64> = axes
        .iter()
        .zip(&bounds)
        .map(|(ax, &(lo, hi))| if ax.len() > 1 { (hi - lo) / (ax.len() - 1) as f64 } else { 0.0 })
        .collect();
    let precise = best[0].0 < CANCELLATION_RATIO * ev.l1;
    let mut sup: f64 = 0.0;
    for &(_, flat) in &best {
        let start = unflatten(flat, &axes);
        sup = sup.max(refine(&ev, precise, set, start, &bounds, &periodic, &steps));
    }
    debug_assert!(dim == set.params().0.len());
    Ok(sup)
}

fn unflatten(mut flat: usize, axes: &[Vec<f64>]) -> Vec<f64> {
    let mut p = vec![0.0; axes.len()];
    for (i, ax) in axes.iter().enumerate().rev() {
        p[i] = ax[flat % ax.len()];
        flat /= ax.len();
    }
    p
}

fn clamp_param(v: f64, (lo, hi): (f64, f64), wrap: bool) -> f64 {
    if wrap {
        v
    } else {
        v.clamp(lo, hi)
    }
}

/// Coordinate-wise golden-section ascent starting from a grid node.
fn refine(
    ev: &Evaluator,
    precise: bool,
    set: &SetDescriptor,
    mut p: Vec<f64>,
    bounds: &[(f64, f64)],
    periodic: &[bool],
    steps: &[f64],
) -> f64 {
    let value = |q: &[f64]| {
        let x = set.point(q);
        if precise {
            ev.abs_precise(&x)
        } else {
            ev.abs(&x)
        }
    };
    let mut cur = value(&p);
    let mut width: Vec<f64> = steps.to_vec();
    for _ in 0..60 {
        let before = cur;
        for axis in 0..p.len() {
            if width[axis] == 0.0 {
                continue;
            }
            let lo = clamp_param(p[axis] - width[axis], bounds[axis], periodic[axis]);
            let hi = clamp_param(p[axis] + width[axis], bounds[axis], periodic[axis]);
            let mut probe = p.clone();
            let mut at = |t: f64| {
                probe[axis] = t;
                value(&probe)
            };
            let (t, v) = golden_max(&mut at, lo, hi);
            // endpoints are legitimate maximizers on closed sets
            let (t, v) = [(t, v), (lo, at(lo)), (hi, at(hi))]
                .into_iter()
                .fold((p[axis], cur), |acc, c| if c.1 > acc.1 { c } else { acc });
            p[axis] = t;
            cur = v;
            width[axis] *= 0.5;
        }
        if cur - before <= 1e-16 * cur.max(1e-300) && width.iter().all(|&w| w < 1e-10) {
            break;
        }
    }
    cur
}

fn golden_max(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > 1e-13 * (1.0 + a.abs().max(b.abs())) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub terms: usize,
    pub set: SetDescriptor,
    pub sup_on_set: f64,
    pub sup_on_torus: f64,
    pub measured_ratio: f64,
    pub per_term_exponent: Option<f64>,
}

impl Report for RatioReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["terms", "set", "measured_ratio", "per_term_exponent"]);
        t.push(vec![
            self.terms.into(),
            self.set.label().into(),
            self.measured_ratio.into(),
            self.per_term_exponent.into(),
        ]);
        t
    }
}

/// `‖f‖_{L∞(E)} / ‖f‖_{L∞(T^d)}` at the default resolutions.
pub fn turan_ratio(f: &ExponentialPolynomial, set: &SetDescriptor) -> Result<RatioReport> {
    if f.is_zero() {
        return Err(Error::ZeroFunction("Turán ratio of the zero function".into()));
    }
    let dim = f.dim();
    let on_set = sup_norm(f, set, default_resolution(f, dim))?;
    let torus = SetDescriptor::Torus { dim };
    let on_torus = sup_norm(f, &torus, default_resolution(f, dim))?;
    // the torus sup dominates; refinement noise must not push the ratio over 1
    let ratio = (on_set / on_torus).min(1.0);
    let terms = f.len();
    Ok(RatioReport {
        terms,
        set: set.clone(),
        sup_on_set: on_set,
        sup_on_torus: on_torus,
        measured_ratio: ratio,
        per_term_exponent: (terms >= 2).then(|| ratio.ln() / (terms - 1) as f64),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalRow {
    /// `"1d"` for `(1 − cos x)^n`, `"2d"` for separable products.
    pub kind: String,
    pub exponents: Vec<u32>,
    pub radii: Vec<f64>,
    pub measured: f64,
    pub analytic: f64,
    /// For products: the product of the measured one-axis ratios.
    pub axis_product: Option<f64>,
    pub abs_log_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalTable {
    pub rows: Vec<ExtremalRow>,
}

impl Report for ExtremalTable {
    fn table(&self) -> Table {
        let mut t = Table::new(&["kind", "exponents", "radii", "measured", "analytic", "axis_product", "abs_log_diff"]);
        let join = |v: Vec<String>| v.join(" ");
        for r in &self.rows {
            t.push(vec![
                r.kind.clone().into(),
                join(r.exponents.iter().map(|e| e.to_string()).collect()).into(),
                join(r.radii.iter().map(|e| e.to_string()).collect()).into(),
                r.measured.into(),
                r.analytic.into(),
                r.axis_product.into(),
                r.abs_log_diff.into(),
            ]);
        }
        t
    }
}

pub const MAX_EXTREMAL_N: u32 = 8;

/// `(1 − cos x)^n` on `[−r, r]` against `((1 − cos r)/2)^n`, plus two-axis
/// products `(1 − cos x₁)^{n₁}(1 − cos x₂)^{n₂}` on boxes.
pub fn extremal_scaling_suite(n_max: u32, r_list: &[f64]) -> Result<ExtremalTable> {
    if n_max > MAX_EXTREMAL_N {
        return Err(Error::Range(format!("n_max {n_max} exceeds {MAX_EXTREMAL_N}")));
    }
    if let Some(r) = r_list.iter().find(|r| !(**r > 0.0 && **r <= PI)) {
        return Err(Error::Domain(format!("radius {r} outside (0, π]")));
    }
    let base = ExponentialPolynomial::one_minus_cos();
    let mut rows = Vec::new();
    let mut one_axis = std::collections::HashMap::new();
    for n in 0..=n_max {
        let f = base.pow(n)?;
        for &r in r_list {
            let measured = turan_ratio(&f, &SetDescriptor::centered_interval(r))?.measured_ratio;
            let analytic = ((1.0 - r.cos()) / 2.0).powi(n as i32);
            one_axis.insert((n, r.to_bits()), measured);
            rows.push(ExtremalRow {
                kind: "1d".into(),
                exponents: vec![n],
                radii: vec![r],
                measured,
                analytic,
                axis_product: None,
                abs_log_diff: (measured.ln() - analytic.ln()).abs(),
            });
        }
    }
    let pairs: Vec<(u32, u32)> = [(1, 2), (2, 1), (1, 1), (2, 2)]
        .into_iter()
        .filter(|&(a, b)| a <= n_max && b <= n_max)
        .collect();
    for (n1, n2) in pairs {
        let f = base.pow(n1)?.tensor(&base.pow(n2)?)?;
        for (i, &r1) in r_list.iter().enumerate() {
            let r2 = r_list[(i + 1) % r_list.len()];
            let set = SetDescriptor::centered_box(&[r1, r2]);
            let measured = turan_ratio(&f, &set)?.measured_ratio;
            let analytic = ((1.0 - r1.cos()) / 2.0).powi(n1 as i32) * ((1.0 - r2.cos()) / 2.0).powi(n2 as i32);
            let axis_product = one_axis[&(n1, r1.to_bits())] * one_axis[&(n2, r2.to_bits())];
            rows.push(ExtremalRow {
                kind: "2d".into(),
                exponents: vec![n1, n2],
                radii: vec![r1, r2],
                measured,
                analytic,
                axis_product: Some(axis_product),
                abs_log_diff: (measured.ln() - analytic.ln()).abs(),
            });
        }
    }
    Ok(ExtremalTable { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial_id: u64,
    pub terms: usize,
    pub set: String,
    pub measured_ratio: f64,
    pub per_term_exponent: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialTable {
    pub half_width: f64,
    pub rows: Vec<TrialRow>,
}

impl Report for TrialTable {
    fn table(&self) -> Table {
        let mut t = Table::new(&["trial_id", "terms", "set", "measured_ratio", "per_term_exponent", "seed"]);
        for r in &self.rows {
            t.push(vec![
                Cell::from(r.trial_id),
                r.terms.into(),
                r.set.clone().into(),
                r.measured_ratio.into(),
                r.per_term_exponent.into(),
                r.seed.into(),
            ]);
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_terms: usize,
    pub freq_bound: i64,
    pub half_width: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 0x5EED,
            max_terms: 6,
            freq_bound: 20,
            half_width: 0.5,
        }
    }
}

/// The random trigonometric polynomial of one trial. Each trial draws from
/// its own stream of the seeded generator, so results do not depend on
/// scheduling.
pub fn trial_function(cfg: &TrialConfig, trial_id: u64) -> Result<ExponentialPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial_id);
    let span = (2 * cfg.freq_bound + 1) as usize;
    let terms = rng.gen_range(2..=cfg.max_terms.min(span).max(2));
    let mut freqs: Vec<i64> = Vec::with_capacity(terms);
    while freqs.len() < terms {
        let k = rng.gen_range(-cfg.freq_bound..=cfg.freq_bound);
        if !freqs.contains(&k) {
            freqs.push(k);
        }
    }
    let terms = freqs.into_iter().map(|k| {
        let c: f64 = rng.sample(StandardNormal);
        Ok((LatticePoint::new(vec![k])?, c))
    });
    ExponentialPolynomial::from_real_terms(1, terms.collect::<Result<Vec<_>>>()?)
}

pub fn nazarov_trials(cfg: &TrialConfig) -> Result<TrialTable> {
    if cfg.max_terms < 2 || cfg.max_terms > MAX_TERMS || cfg.freq_bound < 1 || !(cfg.half_width > 0.0 && cfg.half_width < PI) {
        return Err(Error::Domain("trial configuration out of range".into()));
    }
    let set = SetDescriptor::centered_interval(cfg.half_width);
    let mut rows = (0..cfg.trials)
        .into_par_iter()
        .map(|id| {
            let f = trial_function(cfg, id)?;
            let rep = turan_ratio(&f, &set)?;
            Ok(TrialRow {
                trial_id: id,
                terms: rep.terms,
                set: set.label(),
                measured_ratio: rep.measured_ratio,
                per_term_exponent: rep.per_term_exponent,
                seed: cfg.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.trial_id);
    Ok(TrialTable {
        half_width: cfg.half_width,
        rows,
    })
}
