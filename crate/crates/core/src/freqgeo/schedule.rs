//! Exponent bookkeeping for the iterated decoupling at scale `λ = 2^L`.
//!
//! `K = 2^κ` with `κ = ⌊L·δ₀⌋`, `σ₀ = K⁻¹`, `σ_{k+1} = K^{−1/2}σ_k`, and `N` is
//! the last step with `σ_N ≥ λ^{−1/2}`. All exponents are exact rationals,
//! expressed as powers of `λ` unless the field name says otherwise.

use alloc::vec::Vec;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exponents::{q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleStep {
    pub k: u32,
    /// `log₂(1/σ_k) = κ(1 + k/2)`.
    pub log2_sigma_inv: Q,
    /// Loss of this step as a power of `K`: `1 − 2/p + ε₁`.
    pub loss_k: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub log2_lambda: u32,
    pub delta0: Q,
    pub p: Q,
    pub eps1: Q,
    pub log2_k: u32,
    pub steps: Vec<ScheduleStep>,
    pub n_steps: u32,
    /// Initial Hölder step over `~K⁴` caps, as a power of `K`: `4/p′`.
    pub holder_k: Q,
    /// Tail loss `2δ₀/p′`.
    pub tail: Q,
    /// The tail from the exact count `(σ_N λ^{1/2})²` of final caps.
    pub tail_exact: Q,
    pub total: Q,
    /// `1 − 2/p + 100·max(δ₀, ε₁)`.
    pub bound: Q,
    pub ok: bool,
}

pub fn decoupling_schedule(log2_lambda: u32, delta0: Q, p: Q, eps1: Q) -> Result<Schedule> {
    if log2_lambda < 2 {
        return Err(Error::invalid("lambda must be at least 4"));
    }
    if !(delta0 > Q::zero() && delta0 <= q(1, 10)) {
        return Err(Error::invalid("delta0 must lie in (0, 1/10]"));
    }
    if p < Q::from_integer(4) {
        return Err(Error::invalid("p must be at least 4"));
    }
    if eps1 < Q::zero() {
        return Err(Error::invalid("eps1 must be nonnegative"));
    }
    let l = Q::from_integer(log2_lambda as i64);
    let kappa = (l * delta0).floor().to_integer();
    if kappa < 1 {
        return Err(Error::invalid("K = lambda^delta0 rounds below 2"));
    }
    let kq = Q::from_integer(kappa);
    let half_l = l / Q::from_integer(2);
    let one = Q::one();
    let loss_k = one - Q::from_integer(2) / p + eps1;
    let mut steps = Vec::new();
    let mut k = 0u32;
    loop {
        let s = kq * (one + Q::from_integer(k as i64) / Q::from_integer(2));
        if s > half_l {
            break;
        }
        steps.push(ScheduleStep {
            k,
            log2_sigma_inv: s,
            loss_k,
        });
        k += 1;
    }
    if steps.is_empty() {
        return Err(Error::invalid("sigma_0 = 1/K is already below lambda^(-1/2)"));
    }
    let n_steps = steps.len() as u32 - 1;
    let p_dual_inv = one - one / p;
    let holder_k = Q::from_integer(4) * p_dual_inv;
    let tail = Q::from_integer(2) * delta0 * p_dual_inv;
    let last = steps[n_steps as usize].log2_sigma_inv;
    let tail_exact = Q::from_integer(2) * (half_l - last) * p_dual_inv / l;
    let total = kq / l * (holder_k + Q::from_integer(n_steps as i64) * loss_k) + tail;
    let eps = Q::from_integer(100) * delta0.max(eps1);
    let bound = one - Q::from_integer(2) / p + eps;
    Ok(Schedule {
        log2_lambda,
        delta0,
        p,
        eps1,
        log2_k: kappa as u32,
        steps,
        n_steps,
        holder_k,
        tail,
        tail_exact,
        total,
        bound,
        ok: total <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_octaves_with_k_two() {
        let s = decoupling_schedule(20, q(1, 20), Q::from_integer(4), q(1, 100)).unwrap();
        assert_eq!(s.log2_k, 1);
        assert_eq!(s.n_steps, 18);
        assert_eq!(s.steps[18].log2_sigma_inv, Q::from_integer(10));
        assert_eq!(s.steps[0].loss_k - q(1, 100), q(1, 2));
        assert_eq!(s.tail_exact, Q::zero());
        assert!(s.ok);
    }

    #[test]
    fn ranges() {
        assert!(decoupling_schedule(1, q(1, 20), Q::from_integer(4), Q::zero()).is_err());
        assert!(decoupling_schedule(20, q(1, 5), Q::from_integer(4), Q::zero()).is_err());
        assert!(decoupling_schedule(20, q(1, 20), Q::from_integer(3), Q::zero()).is_err());
        assert!(decoupling_schedule(8, q(1, 10), Q::from_integer(4), Q::zero()).is_err());
    }

    #[test]
    fn total_grows_with_p() {
        let mut prev = None;
        for p in [4, 5, 6, 8, 12] {
            let s = decoupling_schedule(20, q(1, 20), Q::from_integer(p), q(1, 100)).unwrap();
            if let Some(t) = prev {
                assert!(s.total > t);
            }
            prev = Some(s.total);
        }
    }
}
