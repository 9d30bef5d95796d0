//! Sparse multivariate polynomials with `f64` coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    /// Sorted by exponent vector, like terms merged, no zero coefficients.
    terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, [(e, 1.0)])
    }

    pub fn monomial(coeff: f64, exps: &[u32]) -> Self {
        Self::from_terms(exps.len(), [(exps.to_vec(), coeff)])
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut t: Vec<(Vec<u32>, f64)> = terms.into_iter().collect();
        for (e, _) in &t {
            assert_eq!(e.len(), nvars, "exponent vector length must equal nvars");
        }
        t.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<u32>, f64)> = Vec::with_capacity(t.len());
        for (e, c) in t {
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        Polynomial {
            nvars,
            terms: merged,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (zi, &ei) in z.iter().zip(e) {
                if ei > 0 {
                    m *= libm::pow(*zi, ei as f64);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[i] -= 1;
            (e2, c * e[i] as f64)
        });
        Self::from_terms(self.nvars, terms)
    }

    /// Mixed partial derivative with multi-index `alpha`.
    pub fn derivative(&self, alpha: &[u32]) -> Self {
        let mut p = self.clone();
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                p = p.partial(i);
            }
        }
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// The polynomial `z -> p(h z + w)`.
    pub fn compose_affine(&self, h: f64, w: &[f64]) -> Self {
        let n = self.nvars;
        let lin: Vec<Polynomial> = (0..n)
            .map(|i| &Polynomial::var(n, i).scale(h) + &Polynomial::constant(n, w[i]))
            .collect();
        let mut acc = Polynomial::zero(n);
        for (e, c) in &self.terms {
            let mut m = Polynomial::constant(n, *c);
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    m = &m * &lin[i].powi(ei);
                }
            }
            acc = &acc + &m;
        }
        acc
    }

    /// Upper bound of `|p|` on the box `[lo_i, hi_i]` from the triangle inequality.
    pub fn abs_bound(&self, boxes: &[(f64, f64)]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = libm::fabs(*c);
                for (&(lo, hi), &ei) in boxes.iter().zip(e) {
                    let r = libm::fmax(libm::fabs(lo), libm::fabs(hi));
                    m *= libm::pow(r, ei as f64);
                }
                m
            })
            .sum()
    }

    /// All multi-indices of total order exactly `k` in `n` variables.
    pub fn multi_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(cur.clone());
                return;
            }
            for a in (0..=left).rev() {
                cur[i] = a;
                rec(i + 1, left - a, cur, out);
            }
        }
        if n > 0 {
            rec(0, k, &mut cur, &mut out);
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().chain(rhs.terms.iter()).cloned(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                terms.push((e, ca * cb));
            }
        }
        Polynomial::from_terms(self.nvars, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(c: f64, a: u32, b: u32) -> Polynomial {
        Polynomial::monomial(c, &[a, b])
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let p = &uv(1.0, 2, 0) + &uv(-1.0, 2, 0);
        assert!(p.is_zero());
        let q = &uv(1.0, 1, 1) + &uv(2.0, 1, 1);
        assert_eq!(q.terms(), &[(vec![1, 1], 3.0)]);
    }

    #[test]
    fn partials_of_holomorphic_square() {
        let phi1 = &uv(1.0, 2, 0) - &uv(1.0, 0, 2);
        assert_eq!(phi1.partial(0), uv(2.0, 1, 0));
        assert_eq!(phi1.partial(1), uv(-2.0, 0, 1));
        assert_eq!(phi1.derivative(&[1, 1]), Polynomial::zero(2));
        assert_eq!(phi1.degree(), 2);
    }

    #[test]
    fn affine_composition_matches_direct_evaluation() {
        let p = &(&uv(1.0, 3, 0) + &uv(-3.0, 1, 2)) + &uv(0.5, 0, 1);
        let w = [0.3, -0.2];
        let h = 0.25;
        let q = p.compose_affine(h, &w);
        for z in [[0.1, 0.7], [-0.9, 0.4], [0.0, 0.0]] {
            let direct = p.eval(&[h * z[0] + w[0], h * z[1] + w[1]]);
            assert!((q.eval(&z) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(Polynomial::multi_indices(2, 3).len(), 4);
        assert_eq!(Polynomial::multi_indices(3, 2).len(), 6);
    }
}
