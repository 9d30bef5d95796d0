//! Smooth cutoffs: the bump `φ`, its square pieces `φ_q = φ·χ̃_q`, and the
//! Littlewood-Paley profiles.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        libm::exp(-1.0 / x)
    } else {
        0.0
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, and `S(x) + S(1−x) = 1`.
pub fn smooth_step(x: f64) -> f64 {
    let a = psi(x);
    let b = psi(1.0 - x);
    a / (a + b)
}

/// Radial profile equal to 1 on `[0, 1]` and 0 beyond 2.
pub fn beta0(r: f64) -> f64 {
    smooth_step(2.0 - r)
}

/// `β₀(r/λ) − β₀(2r/λ)`, supported in `λ/2 ≤ r ≤ 2λ`.
pub fn beta_lambda(r: f64, lambda: f64) -> f64 {
    beta0(r / lambda) - beta0(2.0 * r / lambda)
}

/// One-dimensional partition profile; its integer translates sum to 1.
pub fn chi_tilde(s: f64) -> f64 {
    smooth_step(1.0 - libm::fabs(s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// `exp(1 − 1/(1 − r²))` in `r = |z − c|/ρ`.
    RadialBump,
    /// Product of one-dimensional bumps in `(z_i − c_i)/ρ`.
    ProductBump,
}

/// Multiplication by `∏ χ̃((z_i − w_i)/h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub center: Vec<f64>,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffSpec {
    pub profile: Profile,
    pub center: Vec<f64>,
    pub radius: f64,
    pub window: Option<Window>,
}

impl CutoffSpec {
    pub fn new(profile: Profile, center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || center.iter().any(|&c| c - radius < -1.0 - 1e-12 || c + radius > 1.0 + 1e-12) {
            return Err(Error::invalid("cutoff support must lie in [-1, 1]^n"));
        }
        Ok(CutoffSpec {
            profile,
            center,
            radius,
            window: None,
        })
    }

    /// Radial bump on the unit ball, `φ(0) = 1`.
    pub fn default_bump(n: usize) -> Self {
        CutoffSpec {
            profile: Profile::RadialBump,
            center: vec![0.0; n],
            radius: 1.0,
            window: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// The untruncated profile.
    pub fn base(&self, z: &[f64]) -> f64 {
        let r = self.radius;
        match self.profile {
            Profile::RadialBump => {
                let mut s = 0.0;
                for (zi, ci) in z.iter().zip(&self.center) {
                    let d = (zi - ci) / r;
                    s += d * d;
                }
                if s >= 1.0 {
                    0.0
                } else {
                    libm::exp(1.0 - 1.0 / (1.0 - s))
                }
            }
            Profile::ProductBump => {
                let mut e = 0.0;
                for (zi, ci) in z.iter().zip(&self.center) {
                    let d = (zi - ci) / r;
                    let s = d * d;
                    if s >= 1.0 {
                        return 0.0;
                    }
                    e += 1.0 - 1.0 / (1.0 - s);
                }
                libm::exp(e)
            }
        }
    }

    pub fn window_factor(&self, z: &[f64]) -> f64 {
        match &self.window {
            None => 1.0,
            Some(w) => z
                .iter()
                .zip(&w.center)
                .map(|(zi, ci)| chi_tilde((zi - ci) / w.h))
                .product(),
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let b = self.base(z);
        if b == 0.0 {
            0.0
        } else {
            b * self.window_factor(z)
        }
    }

    pub fn support_box(&self) -> Vec<(f64, f64)> {
        let mut bx: Vec<(f64, f64)> = self
            .center
            .iter()
            .map(|c| (c - self.radius, c + self.radius))
            .collect();
        if let Some(w) = &self.window {
            for (b, c) in bx.iter_mut().zip(&w.center) {
                b.0 = b.0.max(c - w.h);
                b.1 = b.1.min(c + w.h);
            }
        }
        bx
    }

    /// True when the profile vanishes on the whole box.
    pub fn vanishes_on(&self, lo: &[f64], hi: &[f64]) -> bool {
        let sb = self.support_box();
        if sb.iter().zip(lo.iter().zip(hi)).any(|(&(a, b), (&l, &h))| h <= a || l >= b) {
            return true;
        }
        if self.profile == Profile::RadialBump {
            let mut d2 = 0.0;
            for ((c, l), h) in self.center.iter().zip(lo).zip(hi) {
                let nearest = c.clamp(*l, *h);
                d2 += (nearest - c) * (nearest - c);
            }
            return d2 >= self.radius * self.radius;
        }
        false
    }

    pub fn piece(&self, w: &[f64], h: f64) -> CutoffSpec {
        CutoffSpec {
            window: Some(Window {
                center: w.to_vec(),
                h,
            }),
            ..self.clone()
        }
    }

    /// Centers `w ∈ −1 + hℤ^n ∩ [−1, 1]^n` whose window meets the support.
    /// The windows at these centers sum to 1 on `[−1, 1]^n`.
    pub fn piece_centers(&self, h: f64) -> Result<Vec<Vec<f64>>> {
        let m = libm::round(2.0 / h);
        if !(h > 0.0) || libm::fabs(m * h - 2.0) > 1e-12 {
            return Err(Error::invalid("h must divide 2"));
        }
        let m = m as usize + 1;
        let n = self.dim();
        let mut out = Vec::new();
        for k in 0..m.pow(n as u32) {
            let mut idx = k;
            let w: Vec<f64> = (0..n)
                .map(|_| {
                    let i = idx % m;
                    idx /= m;
                    -1.0 + h * i as f64
                })
                .collect();
            let lo: Vec<f64> = w.iter().map(|c| c - h).collect();
            let hi: Vec<f64> = w.iter().map(|c| c + h).collect();
            if !self.vanishes_on(&lo, &hi) {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// `∫ φ` by tensor Gauss-Legendre on a uniform panel grid of the support.
    pub fn integral(&self) -> f64 {
        let n = self.dim();
        let (panels, order) = match n {
            1 | 2 => (16, 16),
            3 => (8, 10),
            _ => (4, 8),
        };
        let gl = GaussLegendre::new(order);
        let sb = self.support_box();
        let per_axis: Vec<(Vec<f64>, Vec<f64>)> = sb
            .iter()
            .map(|&(a, b)| {
                let mut xs = Vec::new();
                let mut ws = Vec::new();
                let (mut nx, mut nw) = (Vec::new(), Vec::new());
                for p in 0..panels {
                    let lo = a + (b - a) * p as f64 / panels as f64;
                    let hi = a + (b - a) * (p + 1) as f64 / panels as f64;
                    gl.mapped(lo, hi, &mut nx, &mut nw);
                    xs.extend_from_slice(&nx);
                    ws.extend_from_slice(&nw);
                }
                (xs, ws)
            })
            .collect();
        let len = per_axis[0].0.len();
        let mut z = vec![0.0; n];
        let mut parts = Vec::with_capacity(len);
        // Lead axis outermost so the reduction order is fixed.
        for i0 in 0..len {
            let mut acc = 0.0;
            let rest = len.pow(n as u32 - 1);
            for k in 0..rest {
                let mut idx = k;
                let mut w = per_axis[0].1[i0];
                z[0] = per_axis[0].0[i0];
                for d in 1..n {
                    let i = idx % len;
                    idx /= len;
                    z[d] = per_axis[d].0[i];
                    w *= per_axis[d].1[i];
                }
                acc += w * self.eval(&z);
            }
            parts.push(acc);
        }
        crate::stats::pairwise_sum(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_symmetry() {
        for x in [-0.5, 0.0, 0.1, 0.37, 0.5, 0.9, 1.0, 1.4] {
            assert!((smooth_step(x) + smooth_step(1.0 - x) - 1.0).abs() < 1e-15);
        }
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
    }

    #[test]
    fn littlewood_paley_profile() {
        assert_eq!(beta0(0.5), 1.0);
        assert_eq!(beta0(2.0), 0.0);
        assert_eq!(beta_lambda(10.0, 8.0) + beta_lambda(10.0, 16.0), 1.0);
        assert_eq!(beta_lambda(3.9, 8.0), 0.0);
        assert_eq!(beta_lambda(16.0, 8.0), 0.0);
    }

    #[test]
    fn pieces_reassemble_the_bump() {
        let phi = CutoffSpec::default_bump(2);
        let h = 0.25;
        let centers = phi.piece_centers(h).unwrap();
        for z in [[0.0, 0.0], [0.95, 0.0], [0.3, -0.61], [-0.5, 0.77]] {
            let s: f64 = centers.iter().map(|w| phi.piece(w, h).eval(&z)).sum();
            assert!((s - phi.eval(&z)).abs() < 1e-15);
        }
    }

    #[test]
    fn bump_integral_reference() {
        // ∫_{|z|<1} exp(1 − 1/(1−|z|²)) dz = π e ∫_0^1 e^{−1/s} ds by s = 1 − r².
        let mut acc = 0.0;
        let gl = GaussLegendre::new(40);
        let (mut xs, mut ws) = (Vec::new(), Vec::new());
        for p in 0..64 {
            gl.mapped(p as f64 / 64.0, (p + 1) as f64 / 64.0, &mut xs, &mut ws);
            for (x, w) in xs.iter().zip(&ws) {
                acc += w * (-1.0 / x).exp();
            }
        }
        let reference = core::f64::consts::PI * core::f64::consts::E * acc;
        let got = CutoffSpec::default_bump(2).integral();
        assert!((got - reference).abs() < 1e-9 * reference, "{got} vs {reference}");
    }
}
