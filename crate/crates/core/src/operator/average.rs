//! Pointwise evaluation of `A[φ]f(x,t) = ∫ f(x − tΓ(u)) φ(u) du`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::rng::Stream;
use crate::stats::{mean_stderr, pairwise_sum};
use crate::surfaces::SurfaceSpec;

use super::cutoff::CutoffSpec;

/// A real input function on `R^{2n}`.
pub trait InputFn {
    fn value(&self, y: &[f64]) -> f64;
}

/// The constant function 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct Everywhere;

impl InputFn for Everywhere {
    fn value(&self, _y: &[f64]) -> f64 {
        1.0
    }
}

/// `Σ a_k exp(−|y − c_k|²/(2s_k²))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianBlobs {
    pub centers: Vec<Vec<f64>>,
    pub widths: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl GaussianBlobs {
    /// `count` blobs with centers in `[−r, r]^{dim}`, widths in `[w/2, w]`
    /// and amplitudes in `[−1, 1]`.
    pub fn random(dim: usize, count: usize, r: f64, w: f64, stream: &mut Stream) -> Self {
        let mut centers = Vec::with_capacity(count);
        let mut widths = Vec::with_capacity(count);
        let mut amplitudes = Vec::with_capacity(count);
        for _ in 0..count {
            centers.push((0..dim).map(|_| stream.range(-r, r)).collect());
            widths.push(stream.range(0.5 * w, w));
            amplitudes.push(stream.range(-1.0, 1.0));
        }
        GaussianBlobs {
            centers,
            widths,
            amplitudes,
        }
    }
}

impl InputFn for GaussianBlobs {
    fn value(&self, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((c, s), a) in self.centers.iter().zip(&self.widths).zip(&self.amplitudes) {
            let d2: f64 = c.iter().zip(y).map(|(ci, yi)| (yi - ci) * (yi - ci)).sum();
            acc += a * libm::exp(-0.5 * d2 / (s * s));
        }
        acc
    }
}

impl<F: InputFn + ?Sized> InputFn for &F {
    fn value(&self, y: &[f64]) -> f64 {
        (**self).value(y)
    }
}

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

pub const MIN_BUDGET: usize = 1000;

fn check_point(spec: &SurfaceSpec, phi: &CutoffSpec, x: &[f64]) -> Result<()> {
    if phi.dim() != spec.dim() || x.len() != 2 * spec.dim() {
        return Err(Error::invalid("dimension mismatch between surface, cutoff and point"));
    }
    Ok(())
}

/// Monte-Carlo estimate with `u` uniform on the support box of `φ`.
pub fn average_point(
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    f: &dyn InputFn,
    x: &[f64],
    t: f64,
    budget: usize,
    seed: u64,
) -> Result<Estimate> {
    check_point(spec, phi, x)?;
    if budget < MIN_BUDGET {
        return Err(Error::invalid("average_point needs at least 1000 samples"));
    }
    let n = spec.dim();
    let sb = phi.support_box();
    let vol: f64 = sb.iter().map(|(a, b)| b - a).product();
    let mut rng = Stream::new(seed, &[0x4150]);
    let mut u = vec![0.0; n];
    let mut g = vec![0.0; 2 * n];
    let mut y = vec![0.0; 2 * n];
    let mut vals = Vec::with_capacity(budget);
    for _ in 0..budget {
        for (ui, &(a, b)) in u.iter_mut().zip(&sb) {
            *ui = rng.range(a, b);
        }
        let w = phi.eval(&u);
        if w == 0.0 {
            vals.push(0.0);
            continue;
        }
        spec.gamma_at(&u, &mut g);
        for k in 0..2 * n {
            y[k] = x[k] - t * g[k];
        }
        vals.push(vol * w * f.value(&y));
    }
    let (mean, stderr) = mean_stderr(&vals);
    Ok(Estimate {
        mean,
        stderr,
        samples: budget,
    })
}

/// Tensor Gauss-Legendre nodes on `[−1, 1]^n` split into uniform panels of
/// side `panel`, kept only where `φ` can be nonzero.
#[derive(Clone, Debug)]
pub struct TensorRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn new(phi: &CutoffSpec, panel: f64, order: usize) -> Result<Self> {
        let m = libm::round(2.0 / panel);
        if !(panel > 0.0) || libm::fabs(m * panel - 2.0) > 1e-12 {
            return Err(Error::invalid("panel side must divide 2"));
        }
        let m = m as usize;
        let n = phi.dim();
        let gl = GaussLegendre::new(order);
        let (mut xs, mut ws) = (Vec::new(), Vec::new());
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut axis_nodes: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
        for k in 0..m.pow(n as u32) {
            let mut idx = k;
            let mut lo = vec![0.0; n];
            let mut hi = vec![0.0; n];
            for d in 0..n {
                let i = idx % m;
                idx /= m;
                lo[d] = -1.0 + panel * i as f64;
                hi[d] = lo[d] + panel;
            }
            if phi.vanishes_on(&lo, &hi) {
                continue;
            }
            for d in 0..n {
                gl.mapped(lo[d], hi[d], &mut xs, &mut ws);
                axis_nodes[d] = xs.iter().copied().zip(ws.iter().copied()).collect();
            }
            for j in 0..order.pow(n as u32) {
                let mut jdx = j;
                let mut p = vec![0.0; n];
                let mut w = 1.0;
                for d in 0..n {
                    let (xv, wv) = axis_nodes[d][jdx % order];
                    jdx /= order;
                    p[d] = xv;
                    w *= wv;
                }
                let fw = phi.eval(&p);
                if fw != 0.0 {
                    points.push(p);
                    weights.push(w);
                }
            }
        }
        Ok(TensorRule { points, weights })
    }

    /// Values `f(x − tΓ(u))` at the nodes.
    pub fn input_values(&self, spec: &SurfaceSpec, f: &dyn InputFn, x: &[f64], t: f64) -> Vec<f64> {
        let n2 = x.len();
        let mut g = vec![0.0; n2];
        let mut y = vec![0.0; n2];
        self.points
            .iter()
            .map(|u| {
                spec.gamma_at(u, &mut g);
                for k in 0..n2 {
                    y[k] = x[k] - t * g[k];
                }
                f.value(&y)
            })
            .collect()
    }

    /// `Σ w_j φ(u_j) v_j` with a pairwise reduction.
    pub fn integrate(&self, phi: &CutoffSpec, values: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .zip(values)
            .map(|((u, w), v)| w * phi.eval(u) * v)
            .collect();
        pairwise_sum(&terms)
    }
}

/// Deterministic quadrature value of `A[φ]f(x,t)`.
pub fn average_quadrature(
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    f: &dyn InputFn,
    x: &[f64],
    t: f64,
    panel: f64,
    order: usize,
) -> Result<f64> {
    check_point(spec, phi, x)?;
    let rule = TensorRule::new(phi, panel, order)?;
    let vals = rule.input_values(spec, f, x, t);
    Ok(rule.integrate(phi, &vals))
}
