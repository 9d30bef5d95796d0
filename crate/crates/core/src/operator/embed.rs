//! Sup over `t` with a Sobolev-embedding certificate.
//!
//! On an interval `I` cut into pieces of length at least `ℓ`,
//! `sup_I |F|^q ≤ ℓ⁻¹‖F‖_q^q + q‖F‖_q^{q−1}‖F′‖_q`, with the norms taken over
//! `I`. The norms are evaluated by the trapezoidal rule on the sample grid.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupCertificate {
    pub grid_max: f64,
    /// Upper bound for `sup |F|^q`; `None` without derivative samples.
    pub bound: Option<f64>,
    pub certified: bool,
}

fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(ts.len());
    for i in 1..ts.len() {
        terms.push(0.5 * (ts[i] - ts[i - 1]) * (ys[i] + ys[i - 1]));
    }
    crate::stats::pairwise_sum(&terms)
}

/// `ts` must be increasing with spacing at most `ell/4` and span at least `ell`.
pub fn sup_over_t(ts: &[f64], values: &[f64], dt_values: Option<&[f64]>, q: f64, ell: f64) -> Result<SupCertificate> {
    if ts.len() < 2 || ts.len() != values.len() {
        return Err(Error::invalid("need at least two samples, one per grid point"));
    }
    if !(q >= 1.0) || !(ell > 0.0) {
        return Err(Error::invalid("need q ≥ 1 and ell > 0"));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0]) || w[1] - w[0] > 0.25 * ell * (1.0 + 1e-12)) {
        return Err(Error::invalid("t-grid spacing must be positive and at most ell/4"));
    }
    let span = ts[ts.len() - 1] - ts[0];
    if span < ell * (1.0 - 1e-12) {
        return Err(Error::invalid("t-grid must span at least ell"));
    }
    let grid_max = values.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    let Some(dv) = dt_values else {
        return Ok(SupCertificate {
            grid_max,
            bound: None,
            certified: false,
        });
    };
    if dv.len() != ts.len() {
        return Err(Error::invalid("derivative channel length mismatch"));
    }
    let fq: Vec<f64> = values.iter().map(|v| libm::pow(libm::fabs(*v), q)).collect();
    let dq: Vec<f64> = dv.iter().map(|v| libm::pow(libm::fabs(*v), q)).collect();
    let nf = trapezoid(ts, &fq);
    let nd = trapezoid(ts, &dq);
    let bound = nf / ell + q * libm::pow(nf, (q - 1.0) / q) * libm::pow(nd, 1.0 / q);
    Ok(SupCertificate {
        grid_max,
        bound: Some(bound),
        certified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, m: usize) -> Vec<f64> {
        (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
    }

    #[test]
    fn constant_is_tight() {
        let ts = grid(1.0, 1.5, 8);
        let v = [2.0; 9];
        let d = [0.0; 9];
        let c = sup_over_t(&ts, &v, Some(&d), 3.0, 0.5).unwrap();
        assert_eq!(c.grid_max, 2.0);
        assert!((c.bound.unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sine_grid_max() {
        let lam: f64 = 64.0;
        let ell = 1.0 / lam;
        let m = (4.0 * lam).ceil() as usize;
        let ts = grid(1.0, 2.0, m);
        let v: Vec<f64> = ts.iter().map(|t| libm::sin(lam * t)).collect();
        let d: Vec<f64> = ts.iter().map(|t| lam * libm::cos(lam * t)).collect();
        let c = sup_over_t(&ts, &v, Some(&d), 2.0, ell).unwrap();
        assert!(c.grid_max > 0.98 && c.grid_max <= 1.0);
        assert!(c.bound.unwrap() >= c.grid_max * c.grid_max);
    }

    #[test]
    fn missing_derivative_is_uncertified() {
        let ts = grid(1.0, 2.0, 8);
        let c = sup_over_t(&ts, &[1.0; 9], None, 2.0, 0.5).unwrap();
        assert!(!c.certified && c.bound.is_none());
    }

    #[test]
    fn coarse_grid_rejected() {
        let ts = grid(1.0, 2.0, 2);
        assert!(sup_over_t(&ts, &[1.0; 3], None, 2.0, 0.5).is_err());
    }
}
