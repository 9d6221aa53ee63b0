//! Constant-free evaluators of the upper and lower bounds, and the Taylor
//! remainder check for maximally vanishing eigenfunctions.
//!
//! Every bound with an unspecified implied constant is evaluated with that
//! constant set to 1. The numbers are order-of-magnitude indicators only.

use std::collections::BTreeMap;
use std::f64::consts::E;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::report::{Report, Table};
use crate::spectral::{vanishing_order, RationalVector};
use crate::turan::{default_resolution, sup_norm, SetDescriptor};

/// `√count/√(N+1) · (e·r·diam/(N+1))^{N+1}`.
pub fn upper_bound_eval(count: usize, diam: f64, order: i64, r: f64) -> Result<f64> {
    if count == 0 {
        return domain("support count must be at least 1");
    }
    if !(diam >= 0.0) || !diam.is_finite() {
        return domain(format!("diameter must be finite and ≥ 0, got {diam}"));
    }
    if order < 0 {
        return domain(format!("vanishing order must be ≥ 0, got {order}"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("radius must be positive, got {r}"));
    }
    let k = (order + 1) as f64;
    Ok((count as f64).sqrt() / k.sqrt() * (E * r * diam / k).powf(k))
}

/// `δ(m) = 1/(4⌊m/2⌋ + 2)`.
pub fn delta_cc(m: u32) -> f64 {
    1.0 / (4 * (m / 2) + 2) as f64
}

/// `h(d) = γ Σ_{3≤k≤d−1} (2γ)^{k−d} Π_{k+1≤j≤d} j!`.
pub fn h_exponent(d: u32, gamma: f64) -> f64 {
    let fact = |j: u32| (1..=j).map(f64::from).product::<f64>();
    (3..d)
        .map(|k| (2.0 * gamma).powi(k as i32 - d as i32) * (k + 1..=d).map(fact).product::<f64>())
        .sum::<f64>()
        * gamma
}

/// `ln ϕ_d(r)` from `ϕ_3 = exp{D ln(1/r)/ln ln(1/r)}` and
/// `ϕ_{k+1} = (ϕ_k/r^γ)^{(k+1)!/(2γ)}`; `None` when `ln ln(1/r) ≤ 0`.
pub fn ln_phi(d: u32, r: f64, gamma: f64, big_d: f64) -> Option<f64> {
    let l = (1.0 / r).ln();
    let ll = l.ln();
    if !(ll > 0.0) || d < 3 {
        return None;
    }
    let mut v = big_d * l / ll;
    for k in 3..d {
        let fact: f64 = (1..=k + 1).map(f64::from).product();
        v = fact / (2.0 * gamma) * (v - gamma * r.ln());
    }
    Some(v)
}

/// `r^{2d·min{N−1, λ}}`, the constant-free lower bound for `m_d(λ, r)`.
pub fn nazarov_lower_bound(d: usize, count: usize, lambda: f64, r: f64) -> f64 {
    let e = ((count as f64 - 1.0).max(0.0)).min(lambda);
    r.powf(2.0 * d as f64 * e)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentTables {
    pub d: u32,
    pub r: f64,
    pub gamma: f64,
    pub big_d: f64,
    /// `ϕ_d(r)`; may overflow to infinity, in which case `ln_phi` is the
    /// meaningful figure.
    pub phi: Option<f64>,
    pub ln_phi: Option<f64>,
    pub h: f64,
    pub delta_cc: BTreeMap<u32, f64>,
    /// `r^{2d}`: the lower bound for `m_d(λ, r)` is this raised to
    /// `min{N_d(λ) − 1, λ}`.
    pub nazarov_floor: f64,
    pub notes: Vec<String>,
}

impl Report for ExponentTables {
    fn table(&self) -> Table {
        let mut t = Table::new(&["quantity", "m", "value"]);
        t.push(vec!["phi".into(), crate::report::Cell::Empty, self.phi.into()]);
        t.push(vec!["ln_phi".into(), crate::report::Cell::Empty, self.ln_phi.into()]);
        t.push(vec!["h".into(), crate::report::Cell::Empty, self.h.into()]);
        for (m, v) in &self.delta_cc {
            t.push(vec!["delta_cc".into(), (*m as usize).into(), (*v).into()]);
        }
        t.push(vec!["nazarov_floor".into(), crate::report::Cell::Empty, self.nazarov_floor.into()]);
        t
    }
}

pub fn exponent_tables(d: u32, r: f64, gamma: f64, big_d: f64) -> Result<ExponentTables> {
    if d < 3 {
        return domain(format!("exponent tables need d ≥ 3, got {d}"));
    }
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("r must lie in (0, 1), got {r}"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("γ must lie in (0, 1), got {gamma}"));
    }
    if !big_d.is_finite() {
        return domain("D must be finite");
    }
    let ln_phi = ln_phi(d, r, gamma, big_d);
    let mut notes = vec!["order-only: implied constants set to 1".to_string()];
    if ln_phi.is_none() {
        notes.push("phi undefined: ln ln(1/r) ≤ 0".into());
    }
    if d == 4 {
        notes.push(format!("h(4) evaluates to {} from the recursion's closed form", h_exponent(4, gamma)));
    }
    Ok(ExponentTables {
        d,
        r,
        gamma,
        big_d,
        phi: ln_phi.map(f64::exp),
        ln_phi,
        h: h_exponent(d, gamma),
        delta_cc: (1..=8).map(|m| (m, delta_cc(m))).collect(),
        nazarov_floor: r.powi(2 * d as i32),
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorCheck {
    pub order: i64,
    pub vanishing_order: i64,
    pub r: f64,
    pub sup_measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `sup_{B_r}|u|` with `(r·diam)^{N+1}/(N+1)! · ‖û‖_{ℓ¹}` after
/// confirming exactly that all moments of order `≤ N` vanish.
pub fn taylor_bound_check(coeffs: &RationalVector, order: i64, r: f64) -> Result<TaylorCheck> {
    if order < 0 {
        return Err(Error::Precondition(format!("vanishing order N = {order} is not a valid order")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("radius must be positive, got {r}"));
    }
    let Some(k0) = coeffs.points.first() else {
        return Err(Error::ZeroFunction("empty support".into()));
    };
    if coeffs.is_zero() {
        return Err(Error::ZeroFunction("all coefficients vanish".into()));
    }
    let shifted = coeffs.recentered(k0);
    let got = vanishing_order(&shifted, &shifted.points, order as u32)?;
    if got < order {
        return Err(Error::Precondition(format!(
            "exact vanishing order is {got}, below the requested {order}"
        )));
    }
    let u = coeffs.to_expoly()?;
    let d = u.dim();
    let set = SetDescriptor::ball(d, r);
    let sup_measured = sup_norm(&u, &set, default_resolution(&u, d))?;
    let k = (order + 1) as i32;
    let fact: f64 = (1..=k).map(f64::from).product();
    let bound = (r * u.support_diameter()).powi(k) / fact * u.l1_norm();
    Ok(TaylorCheck {
        order,
        vanishing_order: got,
        r,
        sup_measured,
        bound,
        holds: sup_measured <= bound * (1.0 + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticePoint;

    #[test]
    fn upper_bound_examples() {
        assert_eq!(upper_bound_eval(1, 0.0, 0, 0.3).unwrap(), 0.0);
        let v = upper_bound_eval(12, 10.0, 5, 0.05).unwrap();
        let want = 12f64.sqrt() / 6f64.sqrt() * (E * 0.5 / 6.0).powi(6);
        assert!((v - want).abs() < 1e-18);
        assert!((v - 1.9109e-4).abs() < 1e-7);
        let v = upper_bound_eval(4, 2.0, 1, 0.1).unwrap();
        assert!((v - 2f64.sqrt() * (E * 0.1).powi(2)).abs() < 1e-15);
        assert!((v - 0.1045).abs() < 1e-4);
        assert!(upper_bound_eval(0, 1.0, 1, 0.1).is_err());
        assert!(upper_bound_eval(2, 1.0, -1, 0.1).is_err());
        assert!(upper_bound_eval(2, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(delta_cc(1), 0.5);
        assert_eq!(delta_cc(2), 1.0 / 6.0);
        assert_eq!(delta_cc(3), 1.0 / 6.0);
        assert_eq!(delta_cc(4), 0.1);
        assert_eq!(h_exponent(3, 0.5), 0.0);
        assert!((h_exponent(4, 1.0) - 12.0).abs() < 1e-12);
        // d = 5: γ[(2γ)^{-2}·4!·5! + (2γ)^{-1}·5!]
        assert!((h_exponent(5, 1.0) - (24.0 * 120.0 / 4.0 + 120.0 / 2.0)).abs() < 1e-9);
        let r = (-E * E).exp();
        let t = exponent_tables(3, r, 0.5, 1.0).unwrap();
        assert!((t.phi.unwrap() - (E * E / 2.0).exp()).abs() < 1e-10);
        assert!((t.phi.unwrap() - 40.23).abs() < 0.01);
        let t4 = exponent_tables(4, r, 0.5, 1.0).unwrap();
        let want = 24.0 / 1.0 * (E * E / 2.0 - 0.5 * r.ln());
        assert!((t4.ln_phi.unwrap() - want).abs() < 1e-10);
        let none = exponent_tables(3, 0.5, 0.5, 1.0).unwrap();
        assert_eq!(none.phi, None);
        assert!(exponent_tables(3, 1.5, 0.5, 1.0).is_err());
        assert!(exponent_tables(3, 0.1, 1.0, 1.0).is_err());
        assert!(exponent_tables(2, 0.1, 0.5, 1.0).is_err());
        assert_eq!(t.nazarov_floor, r.powi(6));
    }

    #[test]
    fn taylor_check_on_the_square() {
        // cos x₁ − cos x₂ vanishes to order 1 at the origin
        let pts: Vec<LatticePoint> = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|c| LatticePoint::new(c.to_vec()).unwrap())
            .collect();
        let u = RationalVector::new(
            pts,
            [(1, 2), (1, 2), (-1, 2), (-1, 2)]
                .iter()
                .map(|&(p, q)| num_rational::BigRational::new(p.into(), q.into()))
                .collect(),
        )
        .unwrap();
        let c = taylor_bound_check(&u, 1, 0.1).unwrap();
        assert!((c.bound - 0.04).abs() < 1e-15);
        // the max of |cos x − cos y| on the circle of radius r is 1 − cos r
        assert!((c.sup_measured - (1.0 - 0.1f64.cos())).abs() < 1e-12);
        assert!(c.holds);
        assert!(matches!(taylor_bound_check(&u, 2, 0.1), Err(Error::Precondition(_))));
        let single = RationalVector::from_i64(vec![LatticePoint::new(vec![1, 0]).unwrap()], &[1]).unwrap();
        assert!(matches!(taylor_bound_check(&single, -1, 0.1), Err(Error::Precondition(_))));
        assert!(matches!(taylor_bound_check(&single, 0, 0.1), Err(Error::Precondition(_))));
    }
}
