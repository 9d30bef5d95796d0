//! Caps `θ(q′) = {(ξ, Ψ(ξ) + c) : ξ ∈ p(q′), |c| ≤ σ²}` over the phase graph.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::phase;
use crate::rng::Stream;
use crate::surfaces::SurfaceSpec;

use super::{square_centers, Plate};

#[derive(Clone, Debug)]
pub struct Cap {
    /// The slab `p(q′)`, a plate at `λ = 1` with `h = σ`.
    pub plate: Plate,
    pub sigma: f64,
    pub thickness: f64,
    /// Truncation `|ξ″ − η∘| ≤ eta_radius`.
    pub eta_center: Option<Vec<f64>>,
    pub eta_radius: f64,
}

impl Cap {
    pub fn new(spec: &SurfaceSpec, w: &[f64], sigma: f64, eta: Option<(Vec<f64>, f64)>) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::invalid("sigma must lie in (0, 1]"));
        }
        let plate = Plate::new(spec, w, 1.0, sigma, spec.c_star(33))?;
        let (eta_center, eta_radius) = match eta {
            Some((c, r)) => (Some(c), r),
            None => (None, f64::INFINITY),
        };
        Ok(Cap {
            plate,
            sigma,
            thickness: sigma * sigma,
            eta_center,
            eta_radius,
        })
    }

    fn eta_ok(&self, xi2: &[f64]) -> bool {
        match &self.eta_center {
            None => true,
            Some(c) => {
                let d: f64 = c.iter().zip(xi2).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::sqrt(d) <= self.eta_radius
            }
        }
    }

    /// Membership of `(ξ, s) ∈ R^{2n+1}`. Points where `Ψ` cannot be
    /// evaluated are reported as outside.
    pub fn contains(&self, spec: &SurfaceSpec, point: &[f64]) -> bool {
        let d = point.len() - 1;
        let xi = &point[..d];
        if !self.plate.contains(xi) || !self.eta_ok(&xi[d / 2..]) {
            return false;
        }
        match phase::psi(spec, xi) {
            Ok(p) => libm::fabs(point[d] - p) <= self.thickness,
            Err(_) => false,
        }
    }
}

pub fn cap_contains(cap: &Cap, spec: &SurfaceSpec, point: &[f64]) -> bool {
    cap.contains(spec, point)
}

/// Caps over the side-`σ` squares of `[−1, 1]^n`. With `K`, each square is
/// paired with every `η∘ ∈ K⁻¹Z^n` within `K⁻¹` of `{1/2 ≤ |η| ≤ 2}`.
pub fn cap_partition(spec: &SurfaceSpec, sigma: f64, k_trunc: Option<u32>) -> Result<Vec<Cap>> {
    let n = spec.dim();
    let centers = square_centers(n, sigma)?;
    let etas: Vec<Option<(Vec<f64>, f64)>> = match k_trunc {
        None => vec![None],
        Some(k) => {
            if k < 2 || !k.is_power_of_two() {
                return Err(Error::invalid("K must be a dyadic integer ≥ 2"));
            }
            let r = 1.0 / k as f64;
            let m = (2 * k + 1) as i64;
            let side = (2 * m + 1) as usize;
            let mut out = Vec::new();
            for idx in 0..side.pow(n as u32) {
                let mut j = idx;
                let eta: Vec<f64> = (0..n)
                    .map(|_| {
                        let i = (j % side) as i64 - m;
                        j /= side;
                        i as f64 * r
                    })
                    .collect();
                let e = linalg::norm(&eta);
                if e + r >= 0.5 && e - r <= 2.0 {
                    out.push(Some((eta, r)));
                }
            }
            out
        }
    };
    let mut caps = Vec::with_capacity(centers.len() * etas.len());
    for w in &centers {
        for eta in &etas {
            caps.push(Cap::new(spec, w, sigma, eta.clone())?);
        }
    }
    Ok(caps)
}

/// Standard deviations of a seeded point cloud in the cap along its principal
/// axes, in decreasing order. For a cap over an `n = 2` surface these follow
/// `1, 1, σ, σ, σ²` up to constants.
pub fn cap_extents(cap: &Cap, spec: &SurfaceSpec, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let n = spec.dim();
    let d = 2 * n + 1;
    let w = &cap.plate.center_w;
    let jt = spec.jacobian_at(w).transpose();
    let mut stream = Stream::new(seed, &[0x4341]);
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(samples);
    let mut e = vec![0.0; n];
    let mut attempts = 0usize;
    while pts.len() < samples {
        attempts += 1;
        if attempts > 100 * samples + 1000 {
            return Err(Error::SamplerExhausted(attempts));
        }
        let mut xi = vec![0.0; 2 * n];
        stream.in_ball(&mut e, 2.0);
        xi[n..].copy_from_slice(&e);
        stream.in_ball(&mut e, 8.0 * cap.sigma);
        for i in 0..n {
            let mut v = e[i];
            for k in 0..n {
                v -= jt[(i, k)] * xi[n + k];
            }
            xi[i] = v;
        }
        if !cap.plate.contains(&xi) || !cap.eta_ok(&xi[n..]) {
            continue;
        }
        let Ok(p) = phase::psi(spec, &xi) else { continue };
        xi.push(p + stream.range(-cap.thickness, cap.thickness));
        pts.push(xi);
    }
    let mut mean = vec![0.0; d];
    for p in &pts {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v / samples as f64;
        }
    }
    let m = DMatrix::from_fn(samples, d, |i, j| (pts[i][j] - mean[j]) / libm::sqrt(samples as f64));
    Ok(linalg::singular_values(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_without_truncation() {
        let spec = SurfaceSpec::gamma_circ();
        assert_eq!(cap_partition(&spec, 0.25, None).unwrap().len(), 64);
    }

    #[test]
    fn graph_point_and_thickness() {
        let spec = SurfaceSpec::gamma_circ();
        let caps = cap_partition(&spec, 0.25, None).unwrap();
        let cap = &caps[27];
        let w = cap.plate.center_w.clone();
        let xi2 = [0.6, 0.8];
        let j = spec.jacobian_at(&w);
        let xi = [
            -(j[(0, 0)] * xi2[0] + j[(1, 0)] * xi2[1]),
            -(j[(0, 1)] * xi2[0] + j[(1, 1)] * xi2[1]),
            xi2[0],
            xi2[1],
        ];
        let p = phase::psi(&spec, &xi).unwrap();
        assert!(cap.contains(&spec, &[xi[0], xi[1], xi[2], xi[3], p]));
        let s2 = cap.sigma * cap.sigma;
        assert!(!cap.contains(&spec, &[xi[0], xi[1], xi[2], xi[3], p + 2.0 * s2]));
    }

    #[test]
    fn truncation_net() {
        let spec = SurfaceSpec::gamma_circ();
        let caps = cap_partition(&spec, 0.5, Some(2)).unwrap();
        assert_eq!(caps.len() % 16, 0);
        assert!(caps.iter().all(|c| c.eta_radius == 0.5));
        assert!(cap_partition(&spec, 0.5, Some(3)).is_err());
    }

    #[test]
    fn extents_scale() {
        let spec = SurfaceSpec::gamma_circ();
        let mut prev: Option<Vec<f64>> = None;
        for sigma in [0.25, 0.125] {
            let cap = Cap::new(&spec, &[0.5 - 0.5 * sigma, 0.5 - 0.5 * sigma], sigma, None).unwrap();
            let e = cap_extents(&cap, &spec, 3000, 4).unwrap();
            if let Some(p) = prev {
                let r: Vec<f64> = e.iter().zip(&p).map(|(a, b)| libm::log2(b / a)).collect();
                assert!(r[0].abs() < 0.3 && r[1].abs() < 0.3, "{r:?}");
                assert!((r[2] - 1.0).abs() < 0.3 && (r[3] - 1.0).abs() < 0.3, "{r:?}");
                assert!((r[4] - 2.0).abs() < 0.4, "{r:?}");
            }
            prev = Some(e);
        }
    }
}
