//! Exact linear algebra over the integers.
//!
//! Rank and null vectors come from fraction-free (Bareiss) elimination: every
//! intermediate entry is a minor of the input, so all divisions are exact and
//! no rational arithmetic is needed until the final normalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    #[serde(serialize_with = "crate::report::ser_decimal_vec")]
    data: Vec<BigInt>,
}

/// Row-echelon form produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::IndexMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn echelon(&self) -> Echelon {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // smallest nonzero entry as pivot keeps the minors' growth tame
            let Some(p) = (r..self.rows)
                .filter(|&i| !m[i][c].is_zero())
                .min_by_key(|&i| m[i][c].bits())
            else {
                continue;
            };
            m.swap(r, p);
            let (head, tail) = m.split_at_mut(r + 1);
            let pivot_row = &head[r];
            let piv = &pivot_row[c];
            for row in tail.iter_mut() {
                let lead = std::mem::take(&mut row[c]);
                for j in c + 1..self.cols {
                    let t = piv * &row[j] - &lead * &pivot_row[j];
                    row[j] = t / &prev;
                }
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        Echelon { rows: m, pivots }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// A nonzero rational null vector, normalized so that its first nonzero
    /// entry is 1, or `None` when the kernel is trivial.
    ///
    /// The free variable is the first non-pivot column; all other free
    /// variables are zero. The result is therefore canonical for a given
    /// matrix.
    pub fn kernel_vector(&self) -> Result<Option<Vec<BigRational>>> {
        let ech = self.echelon();
        let rank = ech.pivots.len();
        if rank == self.cols {
            return Ok(None);
        }
        let free = (0..self.cols)
            .find(|c| !ech.pivots.contains(c))
            .expect("rank < cols leaves a free column");

        // Scaling the free variable by the last pivot (a maximal minor of
        // the pivot block) makes every back-substituted value an integer.
        let scale = ech
            .rows
            .last()
            .map(|row| row[ech.pivots[rank - 1]].clone())
            .unwrap_or_else(BigInt::one);
        let mut x = vec![BigInt::zero(); self.cols];
        x[free] = scale;
        for (i, &pc) in ech.pivots.iter().enumerate().rev() {
            let row = &ech.rows[i];
            let mut acc = BigInt::zero();
            for j in pc + 1..self.cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc += &row[j] * &x[j];
                }
            }
            let (q, rem) = (-acc).div_rem(&row[pc]);
            if !rem.is_zero() {
                return Err(Error::Consistency(
                    "inexact division in fraction-free back substitution".into(),
                ));
            }
            x[pc] = q;
        }

        let lead = x
            .iter()
            .find(|v| !v.is_zero())
            .cloned()
            .expect("free variable is nonzero");
        Ok(Some(
            x.into_iter()
                .map(|v| BigRational::new(v, lead.clone()))
                .collect(),
        ))
    }

    /// `self · v` over the rationals.
    pub fn apply(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::IndexMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(BigRational::zero(), |acc, (a, b)| {
                        acc + BigRational::from_integer(a.clone()) * b
                    })
            })
            .collect())
    }

    /// Largest absolute entry, in bits; a cheap size diagnostic.
    pub fn max_bits(&self) -> u64 {
        self.data.iter().map(|v| v.abs().bits()).max().unwrap_or(0)
    }
}
