//! Ball-kernel Gram matrices, their smallest eigenpair and Rayleigh quotients.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::bessel::ball_kernel_unchecked;
use crate::error::{domain, Error, Result};
use crate::expoly::ExponentialPolynomial;
use crate::lattice::LatticePoint;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const SWEEP_CAP: usize = 100;

/// `G[k][ℓ] = B_d(r |k − ℓ|)`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramMatrix {
    pub points: Vec<LatticePoint>,
    pub r: f64,
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.points.len() + j]
    }

    /// `v* G v` for a complex vector.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let n = self.size();
        let mut s = 0.0;
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.entries[i * n + j] * v[j];
            }
            s += (v[i].conj() * row).re;
        }
        s
    }
}

pub fn gram_matrix(points: &[LatticePoint], r: f64) -> Result<GramMatrix> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("ball radius must be positive, got {r}"));
    }
    let Some(first) = points.first() else {
        return domain("Gram matrix of an empty point set");
    };
    let dim = first.dim();
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::IndexMismatch("points of mixed dimension".into()));
    }
    let n = points.len();
    let mut entries = vec![0.0; n * n];
    // many pairs share a distance on a sphere
    let mut cache: HashMap<i128, f64> = HashMap::new();
    for i in 0..n {
        entries[i * n + i] = 1.0;
        for j in i + 1..n {
            let q = points[i].dist_sq(&points[j]);
            let v = *cache
                .entry(q)
                .or_insert_with(|| ball_kernel_unchecked(dim, r * (q as f64).sqrt()));
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(GramMatrix {
        points: points.to_vec(),
        r,
        dim,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinEigen {
    pub value: f64,
    pub vector: Vec<f64>,
    pub sweeps: usize,
}

/// Smallest eigenpair of a symmetric matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm is at most `tol`.
pub fn min_eigenvalue(g: &GramMatrix, tol: f64) -> Result<MinEigen> {
    symmetric_min_eigen(&g.entries, g.size(), tol)
}

pub fn symmetric_min_eigen(entries: &[f64], n: usize, tol: f64) -> Result<MinEigen> {
    if entries.len() != n * n || n == 0 {
        return Err(Error::IndexMismatch(format!("{} entries for an {n}×{n} matrix", entries.len())));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (entries[i * n + j], entries[j * n + i]);
            if (a - b).abs() > 1e-14 * (1.0 + a.abs()) {
                return domain(format!("matrix is not symmetric at ({i},{j})"));
            }
        }
    }
    let mut a = entries.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut residual = off(&a);
    while residual > tol {
        if sweeps == SWEEP_CAP {
            return Err(Error::NonConvergence {
                what: "Jacobi eigensolver",
                iterations: sweeps,
                residual,
            });
        }
        sweeps += 1;
        // skip rotations that are small against the current off-norm during
        // the first sweeps; later sweeps rotate everything nonzero
        let threshold = if sweeps < 4 { 0.2 * residual / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 || apq.abs() <= threshold {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        residual = off(&a);
    }

    let idx = (0..n)
        .min_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]))
        .expect("n ≥ 1");
    let mut vector: Vec<f64> = (0..n).map(|k| v[k * n + idx]).collect();
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    // sign convention: largest-magnitude component positive
    let lead = vector.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    for x in &mut vector {
        *x *= sign / norm;
    }
    Ok(MinEigen {
        value: a[idx * n + idx],
        vector,
        sweeps,
    })
}

/// `m` restricted to a point set: the smallest Gram eigenvalue.
pub fn observability_constant(points: &[LatticePoint], r: f64) -> Result<f64> {
    Ok(min_eigenvalue(&gram_matrix(points, r)?, DEFAULT_TOL)?.value)
}

/// `fint_{B_r}|u|² / fint_{T^d}|u|²` via the Gram matrix over the support.
pub fn rayleigh_quotient(u: &ExponentialPolynomial, r: f64) -> Result<f64> {
    Ok(local_mass(u, r)? / u.l2_norm_sq())
}

/// `fint_{B_r}|u|² = û* G û`, the unnormalized local mass.
pub fn local_mass(u: &ExponentialPolynomial, r: f64) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroFunction("Rayleigh quotient of the zero function".into()));
    }
    let g = gram_matrix(&u.support(), r)?;
    Ok(g.quadratic_form(&u.coefficients()))
}

/// `1 − max |B_d(r|k−ℓ|)|` over pairs, the smallest Rayleigh quotient among
/// two-term functions `e^{ik·x} ± e^{iℓ·x}` on the set.
pub fn best_pair_quotient(points: &[LatticePoint], r: f64) -> Result<f64> {
    let g = gram_matrix(points, r)?;
    let n = g.size();
    let mut best = 1.0f64;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min(1.0 - g.get(i, j).abs());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_sphere;
    use crate::observability::bessel::ball_kernel;
    use crate::observability::quadrature::local_mass_oracle;

    #[test]
    fn single_point_and_square() {
        let p = vec![LatticePoint::new(vec![3, 4]).unwrap()];
        let g = gram_matrix(&p, 0.7).unwrap();
        assert_eq!(g.entries, vec![1.0]);
        let s = enumerate_sphere(2, 1).unwrap();
        let r = 0.3;
        let g = gram_matrix(s.points(), r).unwrap();
        let a = ball_kernel(2, 2f64.sqrt() * r).unwrap();
        let b = ball_kernel(2, 2.0 * r).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = match s.points()[i].dist_sq(&s.points()[j]) {
                    0 => 1.0,
                    2 => a,
                    4 => b,
                    _ => unreachable!(),
                };
                assert_eq!(g.get(i, j), want);
            }
        }
        assert!(gram_matrix(s.points(), 0.0).is_err());
        assert!(gram_matrix(&[], 0.1).is_err());
    }

    #[test]
    fn two_by_two_closed_form() {
        for a in [-0.9, -0.2, 0.0, 0.5, 0.99] {
            let e = symmetric_min_eigen(&[1.0, a, a, 1.0], 2, 1e-14).unwrap();
            assert!((e.value - (1.0 - f64::abs(a))).abs() < 1e-15);
        }
        let e = symmetric_min_eigen(&[1.0, 0.0, 0.0, 1.0], 2, 1e-12).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn eigenpair_residual_is_small() {
        let s = enumerate_sphere(2, 65).unwrap();
        let g = gram_matrix(s.points(), 0.4).unwrap();
        let e = min_eigenvalue(&g, DEFAULT_TOL).unwrap();
        let n = g.size();
        for i in 0..n {
            let gv: f64 = (0..n).map(|j| g.get(i, j) * e.vector[j]).sum();
            assert!((gv - e.value * e.vector[i]).abs() < 1e-11);
        }
        let norm: f64 = e.vector.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert!(symmetric_min_eigen(&[1.0, 0.5, 0.4, 1.0], 2, 1e-12).is_err());
    }

    #[test]
    fn rayleigh_examples() {
        let c = ExponentialPolynomial::constant(2, 3.0);
        assert!((rayleigh_quotient(&c, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let e = ExponentialPolynomial::single(LatticePoint::new(vec![2, -7]).unwrap());
        assert!((rayleigh_quotient(&e, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let u = ExponentialPolynomial::from_pairs(
            2,
            &[(vec![1, 0], 0.5), (vec![-1, 0], 0.5), (vec![0, 1], -0.5), (vec![0, -1], -0.5)],
        )
        .unwrap();
        let r: f64 = 0.2;
        let q = rayleigh_quotient(&u, r).unwrap();
        let want = 1.0 - 2.0 * ball_kernel(2, r * 2f64.sqrt()).unwrap() + ball_kernel(2, 2.0 * r).unwrap();
        assert!((q - want).abs() < 1e-15);
        assert!((q / (r.powi(4) / 24.0) - 1.0).abs() < 0.02);
        let oracle = local_mass_oracle(&u, r, 64).unwrap() / u.l2_norm_sq();
        assert!((q - oracle).abs() < 1e-6);
        assert!(matches!(
            rayleigh_quotient(&ExponentialPolynomial::new(2, []).unwrap(), 0.1),
            Err(Error::ZeroFunction(_))
        ));
    }
}
