//! Frequency-space geometry: the annulus `A_λ`, plates, caps, extremizer
//! sets and the decoupling schedule.

pub mod caps;
pub mod schedule;
pub mod sets;

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::Stream;
use crate::surfaces::SurfaceSpec;

pub use caps::{cap_extents, cap_partition, Cap};
pub use schedule::{decoupling_schedule, Schedule, ScheduleStep};
pub use sets::{Family, LowerRegion, RegionSample, SetDescriptor};

/// `λ/2 ≤ |ξ″| < 2λ` and `|ξ′| ≤ 4c_*|ξ″|`.
pub fn annulus_contains(lambda: f64, c_star: f64, xi: &[f64]) -> bool {
    let n = xi.len() / 2;
    let a = linalg::norm(&xi[..n]);
    let b = linalg::norm(&xi[n..]);
    0.5 * lambda <= b && b < 2.0 * lambda && a <= 4.0 * c_star * b
}

/// Centers of the side-`h` squares tiling `[−1, 1]^n`.
pub fn square_centers(n: usize, h: f64) -> Result<Vec<Vec<f64>>> {
    let m = libm::round(2.0 / h);
    if !(h > 0.0) || libm::fabs(m * h - 2.0) > 1e-12 {
        return Err(Error::invalid("h must divide 2"));
    }
    let m = m as usize;
    Ok((0..m.pow(n as u32))
        .map(|k| {
            let mut idx = k;
            (0..n)
                .map(|_| {
                    let i = idx % m;
                    idx /= m;
                    -1.0 + h * (i as f64 + 0.5)
                })
                .collect()
        })
        .collect())
}

/// `P(q) = {ξ ∈ A_λ : |ξ′ + J_Φ^T(w_q)ξ″| ≤ 8λh}`.
#[derive(Clone, Debug)]
pub struct Plate {
    pub center_w: Vec<f64>,
    pub lambda: f64,
    pub h: f64,
    pub c_star: f64,
    jt: DMatrix<f64>,
}

impl Plate {
    pub fn new(spec: &SurfaceSpec, center_w: &[f64], lambda: f64, h: f64, c_star: f64) -> Result<Self> {
        if center_w.len() != spec.dim() {
            return Err(Error::invalid("plate center has the wrong dimension"));
        }
        if !(lambda >= 1.0) || !(h > 0.0) || !(c_star > 0.0) {
            return Err(Error::invalid("plates need lambda ≥ 1, h > 0, c_star > 0"));
        }
        Ok(Plate {
            center_w: center_w.to_vec(),
            lambda,
            h,
            c_star,
            jt: spec.jacobian_at(center_w).transpose(),
        })
    }

    /// `|ξ′ + J_Φ^T(w)ξ″|`.
    pub fn offset(&self, xi: &[f64]) -> f64 {
        let n = self.center_w.len();
        let mut s = 0.0;
        for i in 0..n {
            let mut v = xi[i];
            for k in 0..n {
                v += self.jt[(i, k)] * xi[n + k];
            }
            s += v * v;
        }
        libm::sqrt(s)
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        annulus_contains(self.lambda, self.c_star, xi) && self.offset(xi) <= 8.0 * self.lambda * self.h
    }
}

pub fn plate_contains(plate: &Plate, xi: &[f64]) -> bool {
    plate.contains(xi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapAudit {
    pub lambda: f64,
    pub h: f64,
    pub samples: usize,
    pub plates: usize,
    pub max_overlap: usize,
    /// Center separation beyond which no sample was shared, `16h`.
    pub disjoint_beyond: f64,
    /// Largest center distance between two plates sharing a sample.
    pub max_shared_distance: f64,
    /// Samples shared by plates further apart than `disjoint_beyond`.
    pub violations: usize,
    /// Samples in no plate.
    pub uncovered: usize,
    pub lambda_h2: f64,
}

const MAX_ATTEMPTS: usize = 1000;

/// One point of `A_λ`. Even indices draw `ξ′` uniformly from the admissible
/// ball; odd indices place it inside a random plate so that overlaps are
/// probed where they occur.
fn sample_annulus(
    stream: &mut Stream,
    plates: &[Plate],
    lambda: f64,
    c_star: f64,
    targeted: bool,
    out: &mut [f64],
) -> Result<()> {
    let n = out.len() / 2;
    let mut e = vec![0.0; n];
    for _ in 0..MAX_ATTEMPTS {
        // |ξ″| with density ∝ r^{n−1} on [λ/2, 2λ).
        let (a, b) = (libm::pow(0.5 * lambda, n as f64), libm::pow(2.0 * lambda, n as f64));
        let r = libm::pow(a + (b - a) * stream.uniform(), 1.0 / n as f64);
        stream.in_ball(&mut e, 1.0);
        let ne = linalg::norm(&e);
        if ne == 0.0 {
            continue;
        }
        for k in 0..n {
            out[n + k] = r * e[k] / ne;
        }
        if targeted {
            let p = &plates[(stream.next_u64() % plates.len() as u64) as usize];
            stream.in_ball(&mut e, 8.0 * lambda * p.h);
            for i in 0..n {
                let mut v = e[i];
                for k in 0..n {
                    v -= p.jt[(i, k)] * out[n + k];
                }
                out[i] = v;
            }
        } else {
            stream.in_ball(&mut e, 4.0 * c_star * r);
            out[..n].copy_from_slice(&e);
        }
        if annulus_contains(lambda, c_star, out) {
            return Ok(());
        }
    }
    Err(Error::SamplerExhausted(MAX_ATTEMPTS))
}

/// Per-sample overlap statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OverlapSample {
    pub count: usize,
    pub max_distance: f64,
}

/// Plates of `c(h)` at scale `λ`.
pub fn plate_family(spec: &SurfaceSpec, lambda: f64, h: f64) -> Result<Vec<Plate>> {
    let c_star = spec.c_star(33);
    square_centers(spec.dim(), h)?
        .iter()
        .map(|w| Plate::new(spec, w, lambda, h, c_star))
        .collect()
}

/// Overlap count for the `index`-th audit sample.
pub fn overlap_sample(plates: &[Plate], seed: u64, index: u64) -> Result<OverlapSample> {
    let p0 = plates.first().ok_or(Error::invalid("no plates"))?;
    let n = p0.center_w.len();
    let mut stream = Stream::new(seed, &[0x504C, index]);
    let mut xi = vec![0.0; 2 * n];
    sample_annulus(&mut stream, plates, p0.lambda, p0.c_star, index % 2 == 1, &mut xi)?;
    let hits: Vec<&Plate> = plates.iter().filter(|p| p.contains(&xi)).collect();
    let mut max_distance: f64 = 0.0;
    // Diameter of the set of centers; pairwise over hits, which are few.
    for (i, a) in hits.iter().enumerate() {
        for b in &hits[i + 1..] {
            let d: f64 = a.center_w.iter().zip(&b.center_w).map(|(x, y)| (x - y) * (x - y)).sum();
            max_distance = max_distance.max(libm::sqrt(d));
        }
    }
    Ok(OverlapSample {
        count: hits.len(),
        max_distance,
    })
}

pub fn summarize_overlap(lambda: f64, h: f64, plates: usize, samples: &[OverlapSample]) -> OverlapAudit {
    let limit = 16.0 * h;
    OverlapAudit {
        lambda,
        h,
        samples: samples.len(),
        plates,
        max_overlap: samples.iter().map(|s| s.count).max().unwrap_or(0),
        disjoint_beyond: limit,
        max_shared_distance: samples.iter().fold(0.0, |m, s| m.max(s.max_distance)),
        violations: samples.iter().filter(|s| s.max_distance > limit).count(),
        uncovered: samples.iter().filter(|s| s.count == 0).count(),
        lambda_h2: lambda * h * h,
    }
}

pub fn plate_overlap_audit(spec: &SurfaceSpec, lambda: f64, h: f64, n_samples: usize, seed: u64) -> Result<OverlapAudit> {
    let plates = plate_family(spec, lambda, h)?;
    let samples = (0..n_samples as u64)
        .map(|i| overlap_sample(&plates, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_overlap(lambda, h, plates.len(), &samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_examples() {
        let c = 2.0 * core::f64::consts::SQRT_2;
        assert!(annulus_contains(8.0, c, &[0.0, 0.0, 8.0, 0.0]));
        assert!(!annulus_contains(8.0, c, &[100.0, 0.0, 8.0, 0.0]));
        assert!(!annulus_contains(8.0, c, &[0.0, 0.0, 2.0, 0.0]));
    }

    #[test]
    fn origin_plate_is_a_cylinder() {
        let spec = SurfaceSpec::gamma_circ();
        let p = Plate::new(&spec, &[0.0, 0.0], 256.0, 0.125, spec.c_star(33)).unwrap();
        assert!(p.contains(&[255.0, 0.0, 200.0, 0.0]));
        assert!(!p.contains(&[257.0, 0.0, 200.0, 0.0]));
    }

    #[test]
    fn plate_center_frequency_is_contained() {
        let spec = SurfaceSpec::gamma_circ();
        let w = [0.3, -0.6];
        let p = Plate::new(&spec, &w, 64.0, 0.25, spec.c_star(33)).unwrap();
        let xi2 = [40.0, 25.0];
        let j = spec.jacobian_at(&w);
        let xi1 = [-(j[(0, 0)] * xi2[0] + j[(1, 0)] * xi2[1]), -(j[(0, 1)] * xi2[0] + j[(1, 1)] * xi2[1])];
        let xi = [xi1[0], xi1[1], xi2[0], xi2[1]];
        assert!(p.offset(&xi) < 1e-12);
        assert!(p.contains(&xi));
    }

    #[test]
    fn audit_small() {
        let spec = SurfaceSpec::gamma_circ();
        let a = plate_overlap_audit(&spec, 256.0, 0.125, 4000, 1).unwrap();
        assert_eq!(a.violations, 0);
        assert!(a.max_shared_distance <= 2.0);
        assert!(a.max_overlap >= 1 && a.max_overlap <= 1089);
        assert_eq!(a.plates, 256);
    }
}
