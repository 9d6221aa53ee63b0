//! Exponential polynomials `u(x) = Σ_k c_k e^{ik·x}` with integer frequencies.
//!
//! No `(2π)^{−d/2}` factor is applied on evaluation; ratios of local and
//! global norms are unaffected, and the coefficient `ℓ²` norm squared equals
//! the mean of `|u|²` over the torus.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialPolynomial {
    dim: usize,
    // canonical order, no exact zeros
    terms: Vec<(LatticePoint, Complex64)>,
}

impl ExponentialPolynomial {
    /// Builds from `(frequency, coefficient)` pairs, merging repeats and
    /// dropping exact zeros.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (LatticePoint, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        let mut map: BTreeMap<LatticePoint, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if k.dim() != dim {
                return Err(Error::Domain(format!(
                    "frequency {k} is not {dim}-dimensional"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Domain(format!("non-finite coefficient at {k}")));
            }
            *map.entry(k).or_default() += c;
        }
        Ok(Self {
            dim,
            terms: map.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect(),
        })
    }

    pub fn from_real_terms(dim: usize, terms: impl IntoIterator<Item = (LatticePoint, f64)>) -> Result<Self> {
        Self::new(dim, terms.into_iter().map(|(k, c)| (k, Complex64::new(c, 0.0))))
    }

    /// `e^{ik·x}`.
    pub fn single(k: LatticePoint) -> Self {
        Self {
            dim: k.dim(),
            terms: vec![(k, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_real_terms(dim, [(LatticePoint::origin(dim), c)]).expect("valid constant")
    }

    /// Convenience constructor from integer frequency tuples.
    pub fn from_pairs(dim: usize, pairs: &[(Vec<i64>, f64)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|(k, c)| Ok((LatticePoint::new(k.clone())?, *c)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_real_terms(dim, terms)
    }

    /// `1 − cos x` on the circle.
    pub fn one_minus_cos() -> Self {
        Self::from_pairs(1, &[(vec![-1], -0.5), (vec![0], 1.0), (vec![1], -0.5)]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(LatticePoint, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.terms.iter().map(|(k, _)| k.clone()).collect()
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.terms.iter().map(|(_, c)| *c).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.coords().iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    pub fn abs_at(&self, x: &[f64]) -> f64 {
        self.eval(x).norm()
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    /// `Σ |c_k|²`, the torus mean of `|u|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// Diameter of the frequency support.
    pub fn support_diameter(&self) -> f64 {
        let mut best = 0i128;
        for (i, (a, _)) in self.terms.iter().enumerate() {
            for (b, _) in &self.terms[i + 1..] {
                best = best.max(a.dist_sq(b));
            }
        }
        (best as f64).sqrt()
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Domain("dimension mismatch in product".into()));
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let k = LatticePoint::new(a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect())?;
                out.push((k, ca * cb));
            }
        }
        Self::new(self.dim, out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::constant(self.dim, 1.0);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Tensor product `f(x) g(y)` on the product torus.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut k = a.coords().to_vec();
                k.extend_from_slice(b.coords());
                out.push((LatticePoint::new(k)?, ca * cb));
            }
        }
        Self::new(self.dim + other.dim, out)
    }

    /// `e^{i t x_{d+1}} u(x)`: appends one coordinate to every frequency.
    pub fn lift(&self, last: i64) -> Self {
        Self {
            dim: self.dim + 1,
            terms: self.terms.iter().map(|(k, c)| (k.lifted(last), *c)).collect(),
        }
    }

    /// Keeps only the terms whose frequency is in `keep`.
    pub fn restrict(&self, keep: &[LatticePoint]) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep.contains(k))
                .cloned()
                .collect(),
        }
    }
}

impl Serialize for ExponentialPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (k, c) in &self.terms {
            seq.serialize_element(&(k.coords(), [c.re, c.im]))?;
        }
        seq.end()
    }
}
