use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torus_obs::clusters::{
    arc_window_check, decomposition_gap, is_affine_hyperplane, partition, random_sign_function, CutoffSpec,
};
use torus_obs::expoly::ExponentialPolynomial;
use torus_obs::lattice::{enumerate_sphere, LatticePoint};
use torus_obs::observability::{
    ball_kernel, gram_matrix, local_mass, local_mass_oracle, min_eigenvalue, rayleigh_quotient, taylor_bound_check,
    DEFAULT_TOL,
};
use torus_obs::spectral::{guaranteed_order, kernel_vector, moment_matrix};
use torus_obs::turan::{nazarov_trials, TrialConfig};

fn pt(c: &[i64]) -> LatticePoint {
    LatticePoint::new(c.to_vec()).unwrap()
}

fn random_function(points: &[LatticePoint], rng: &mut ChaCha8Rng) -> ExponentialPolynomial {
    let d = points[0].dim();
    let terms = points
        .iter()
        .map(|p| (p.clone(), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    ExponentialPolynomial::new(d, terms).unwrap()
}

fn point_set(d: usize, max_len: usize) -> impl Strategy<Value = Vec<LatticePoint>> {
    prop::collection::btree_set(prop::collection::vec(-6i64..=6, d), 1..max_len)
        .prop_map(|s| s.into_iter().map(|c| LatticePoint::new(c).unwrap()).collect())
}

fn component_of(parts: &[Vec<LatticePoint>], p: &LatticePoint) -> usize {
    parts.iter().position(|c| c.contains(p)).expect("point missing from partition")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_is_sound_and_minimal(points in point_set(2, 24), rho in 0.5f64..6.0) {
        let part = partition(&points, rho).unwrap();
        let total: usize = part.components.iter().map(Vec::len).sum();
        prop_assert_eq!(total, points.len());
        // every close pair shares a component
        for a in &points {
            for b in &points {
                if a.dist(b) < rho {
                    prop_assert_eq!(component_of(&part.components, a), component_of(&part.components, b));
                }
            }
        }
        // every component is connected through close pairs
        for comp in &part.components {
            let mut seen = vec![false; comp.len()];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..comp.len() {
                    if !seen[j] && comp[i].dist(&comp[j]) < rho {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn partitions_refine_as_rho_grows(points in point_set(3, 20), a in 0.5f64..4.0, b in 0.5f64..4.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fine = partition(&points, lo).unwrap();
        let coarse = partition(&points, hi).unwrap();
        for comp in &fine.components {
            let target = component_of(&coarse.components, &comp[0]);
            for p in comp {
                prop_assert_eq!(component_of(&coarse.components, p), target);
            }
        }
    }

    #[test]
    fn ball_kernel_is_bounded(d in 1usize..=6, rho in 0.0f64..80.0) {
        let b = ball_kernel(d, rho).unwrap();
        prop_assert!(b.abs() <= 1.0 + 1e-14);
    }

    #[test]
    fn rayleigh_quotient_dominates_min_eigenvalue(n in 1i64..60, r in 0.05f64..1.0, seed in 0u64..1000) {
        let s = enumerate_sphere(2, n).unwrap();
        prop_assume!(!s.is_empty());
        let m = min_eigenvalue(&gram_matrix(s.points(), r).unwrap(), DEFAULT_TOL).unwrap().value;
        prop_assert!(m >= -1e-12 && m <= 1.0 + 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_function(s.points(), &mut rng);
        let q = rayleigh_quotient(&u, r).unwrap();
        prop_assert!(q >= m - 1e-10, "quotient {} below eigenvalue {}", q, m);
    }
}

/// Centered rank through singular values, the floating-point oracle for the
/// exact hyperplane test.
fn svd_affine_rank(points: &[LatticePoint]) -> usize {
    let d = points[0].dim();
    let base = points[0].as_f64();
    let rows: Vec<f64> = points[1..]
        .iter()
        .flat_map(|p| p.as_f64().into_iter().zip(base.clone()).map(|(a, b)| a - b).collect::<Vec<_>>())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_row_slice(points.len() - 1, d, &rows);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count()
}

#[test]
fn hyperplane_test_agrees_with_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut planar = 0;
    for trial in 0..500 {
        let d = 2 + trial % 3;
        let len = rng.gen_range(2..=d + 3);
        let points: Vec<LatticePoint> = if trial % 2 == 0 {
            // points on a random integer hyperplane through a random base
            let normal: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            let normal = if normal.iter().all(|&c| c == 0) { vec![1; d] } else { normal };
            let mut out = Vec::new();
            while out.len() < len {
                let x: Vec<i64> = (0..d).map(|_| rng.gen_range(-9..=9)).collect();
                let dot: i64 = x.iter().zip(&normal).map(|(a, b)| a * b).sum();
                if dot == 0 && !out.contains(&x) {
                    out.push(x);
                }
            }
            out.into_iter().map(|c| LatticePoint::new(c).unwrap()).collect()
        } else {
            let mut out: Vec<Vec<i64>> = Vec::new();
            while out.len() < len {
                let x: Vec<i64> = (0..d).map(|_| rng.gen_range(-9..=9)).collect();
                if !out.contains(&x) {
                    out.push(x);
                }
            }
            out.into_iter().map(|c| LatticePoint::new(c).unwrap()).collect()
        };
        let want = svd_affine_rank(&points) < d;
        assert_eq!(is_affine_hyperplane(&points), want, "trial {trial}: {points:?}");
        planar += want as usize;
    }
    assert!(planar >= 250);
}

#[test]
fn gram_form_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (d, n) in [(2usize, 5i64), (2, 25), (2, 65), (3, 3), (3, 9), (3, 11)] {
        let s = enumerate_sphere(d, n).unwrap();
        for r in [0.05, 0.2, 0.6] {
            let u = random_function(s.points(), &mut rng);
            let gram = local_mass(&u, r).unwrap();
            let mean = gram / u.l2_norm_sq();
            let oracle = local_mass_oracle(&u, r, 64).unwrap() / u.l2_norm_sq();
            assert!((mean - oracle).abs() <= 1e-6, "S_{d}({n}) r={r}: {mean} vs {oracle}");
        }
    }
}

#[test]
fn small_radius_asymptote_on_the_unit_circle() {
    let pts: Vec<LatticePoint> = [[-1, 0], [0, -1], [0, 1], [1, 0]].iter().map(|c| pt(c)).collect();
    let r = 0.05f64;
    let e = min_eigenvalue(&gram_matrix(&pts, r).unwrap(), DEFAULT_TOL).unwrap();
    let u = ExponentialPolynomial::from_real_terms(2, pts.iter().cloned().zip(e.vector.iter().copied())).unwrap();
    let oracle = local_mass_oracle(&u, r, 64).unwrap() / u.l2_norm_sq();
    assert!((oracle - e.value).abs() < 1e-12);
    assert!((oracle / (r.powi(4) / 24.0) - 1.0).abs() < 0.05);
}

#[test]
fn observability_constant_is_positive() {
    for (d, n) in [(2usize, 1i64), (2, 25), (2, 65), (3, 3), (3, 9)] {
        let s = enumerate_sphere(d, n).unwrap();
        for r in [0.1, 0.3, 1.0] {
            let m = min_eigenvalue(&gram_matrix(s.points(), r).unwrap(), DEFAULT_TOL).unwrap().value;
            assert!(m > 0.0, "S_{d}({n}) r={r}: m={m}");
        }
    }
}

#[test]
fn kernel_eigenfunctions_satisfy_the_taylor_bound() {
    for (d, n) in [(2usize, 25i64), (2, 65), (3, 9), (3, 17)] {
        let s = enumerate_sphere(d, n).unwrap();
        let order = guaranteed_order(d, s.len());
        assert!(order >= 0);
        let v = kernel_vector(&moment_matrix(s.points(), order as u32, true).unwrap())
            .unwrap()
            .expect("guaranteed order has a kernel");
        for r in [0.05, 0.1, 0.2] {
            let c = taylor_bound_check(&v, order, r).unwrap();
            assert!(c.holds, "S_{d}({n}) r={r}: {} > {}", c.sup_measured, c.bound);
            assert!(c.vanishing_order >= order);
        }
    }
}

#[test]
fn jarnik_and_cilleruelo_cordoba_windows() {
    for n in 1..=2000 {
        for m in [2, 3, 4] {
            let c = arc_window_check(n, m).unwrap();
            assert!(c.violations.is_empty(), "n={n} m={m}: {:?}", c.violations);
        }
    }
}

#[test]
fn decomposition_full_bound_holds_for_complex_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [25i64, 325, 1105] {
        let s = enumerate_sphere(2, n).unwrap();
        for rho in [1.5, 5.0] {
            for r in [0.1, 0.3] {
                for sigma in [1.0, 10.0, 100.0] {
                    let u = random_function(s.points(), &mut rng);
                    let g = decomposition_gap(&u, rho, r, &CutoffSpec::new(sigma).unwrap()).unwrap();
                    assert!(g.holds_full, "n={n} ρ={rho} r={r} σ={sigma}");
                    let signs = random_sign_function(s.points(), n as u64).unwrap();
                    let g = decomposition_gap(&signs, rho, r, &CutoffSpec::new(sigma).unwrap()).unwrap();
                    assert!(g.holds && g.holds_full);
                }
            }
        }
    }
}

#[test]
fn nazarov_trials_stay_above_the_floor() {
    let table = nazarov_trials(&TrialConfig::default()).unwrap();
    assert_eq!(table.rows.len(), 200);
    let floor = (0.5f64 / 50.0).ln();
    for (i, row) in table.rows.iter().enumerate() {
        assert_eq!(row.trial_id, i as u64);
        assert!(row.measured_ratio > 0.0 && row.measured_ratio <= 1.0 + 1e-12);
        let e = row.per_term_exponent.expect("at least two terms");
        assert!(e > floor, "trial {i}: exponent {e}");
    }
    // same seed, same table
    assert_eq!(nazarov_trials(&TrialConfig::default()).unwrap(), table);
}

#[test]
fn spheres_are_closed_under_signed_permutations() {
    for (d, n) in [(2usize, 325i64), (3, 41), (4, 30), (5, 17)] {
        let s = enumerate_sphere(d, n).unwrap();
        for p in s.points() {
            let mut c = p.coords().to_vec();
            c.reverse();
            assert!(s.points().contains(&pt(&c)));
            c[0] = -c[0];
            assert!(s.points().contains(&pt(&c)));
        }
    }
}
