//! Periodic grids in `R^{2n}`, their transforms and the band-limited operator
//! `A_λ`. These paths are demonstration scale: at the default `N = 24`,
//! `L = 8` only `λ ≤ 2` is resolved.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use maxavg_core::operator::multiplier::Channel;
use maxavg_core::operator::{beta0, beta_lambda, CutoffSpec, QuadSettings, Quadrature};
use maxavg_core::quad::GaussLegendre;
use maxavg_core::SurfaceSpec;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::config::Config;
use crate::error::{LabError, Result};

pub const DEFAULT_POINTS: usize = 24;
pub const DEFAULT_SIDE: f64 = 8.0;

/// Samples on the torus `(R / L Z)^dims`, `N` per axis, last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub dims: usize,
    pub side: f64,
    pub points: usize,
    pub data: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(dims: usize, side: f64, points: usize) -> Result<Self> {
        if dims == 0 || points < 2 || !(side > 0.0) {
            return Err(LabError::input("grid needs dims ≥ 1, N ≥ 2 and L > 0"));
        }
        let len = points
            .checked_pow(dims as u32)
            .filter(|&l| l <= 1 << 28)
            .ok_or_else(|| LabError::input("grid too large"))?;
        Ok(GridField {
            dims,
            side,
            points,
            data: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// Unit mass at the origin sample.
    pub fn delta(dims: usize, side: f64, points: usize) -> Result<Self> {
        let mut g = Self::zeros(dims, side, points)?;
        g.data[0] = Complex64::new(1.0, 0.0);
        Ok(g)
    }

    pub fn from_fn(dims: usize, side: f64, points: usize, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let mut g = Self::zeros(dims, side, points)?;
        let mut x = vec![0.0; dims];
        for i in 0..g.data.len() {
            g.position(i, &mut x);
            g.data[i] = f(&x);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn wrapped(&self, k: usize) -> f64 {
        let k = k as i64;
        let n = self.points as i64;
        (if k >= (n + 1) / 2 { k - n } else { k }) as f64
    }

    fn multi_index(&self, mut i: usize, out: &mut [usize]) {
        for d in (0..self.dims).rev() {
            out[d] = i % self.points;
            i /= self.points;
        }
    }

    /// Coordinates of sample `i`, wrapped to `[−L/2, L/2)`.
    pub fn position(&self, i: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.dims];
        self.multi_index(i, &mut idx);
        let h = self.side / self.points as f64;
        for d in 0..self.dims {
            out[d] = self.wrapped(idx[d]) * h;
        }
    }

    /// Angular frequency of transform bin `i`.
    pub fn frequency(&self, i: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.dims];
        self.multi_index(i, &mut idx);
        let s = std::f64::consts::TAU / self.side;
        for d in 0..self.dims {
            out[d] = self.wrapped(idx[d]) * s;
        }
    }

    fn transform(&mut self, inverse: bool) {
        let n = self.points;
        let mut planner = FftPlanner::new();
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for axis in 0..self.dims {
            let stride = n.pow((self.dims - 1 - axis) as u32);
            let block = stride * n;
            for outer in (0..self.data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, c) in line.iter_mut().enumerate() {
                        *c = self.data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, c) in line.iter().enumerate() {
                        self.data[base + j * stride] = *c;
                    }
                }
            }
        }
        if inverse {
            let s = 1.0 / self.data.len() as f64;
            for c in &mut self.data {
                *c *= s;
            }
        }
    }

    /// `F_k = Σ_x f_x e^{−i ξ_k·x}`.
    pub fn forward(&mut self) {
        self.transform(false);
    }

    /// Inverse of [`GridField::forward`].
    pub fn backward(&mut self) {
        self.transform(true);
    }

    /// `(Σ |f|² h^d)^{1/2}` with `h = L/N`.
    pub fn l2_norm(&self) -> f64 {
        let cell = (self.side / self.points as f64).powi(self.dims as i32);
        (self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    fn meta_path(path: &Path) -> PathBuf {
        let mut p = path.as_os_str().to_owned();
        p.push(".meta");
        PathBuf::from(p)
    }

    /// Raw little-endian `f64` pairs `(re, im)` plus a `<path>.meta` sidecar.
    pub fn write_raw(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(16 * self.data.len());
        for c in &self.data {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        fs::File::create(path)?.write_all(&buf)?;
        let meta = format!("dims = {}\nL = {}\nN = {}\n", self.dims, self.side, self.points);
        fs::write(Self::meta_path(path), meta)?;
        Ok(())
    }

    pub fn read_raw(path: &Path) -> Result<Self> {
        let meta = Config::parse(&fs::read_to_string(Self::meta_path(path))?)?;
        let field = |k: &str| meta.get(k).ok_or_else(|| LabError::input(format!("grid sidecar lacks {k}")));
        let bad = |k: &str| LabError::input(format!("grid sidecar has a bad {k}"));
        let dims: usize = field("dims")?.parse().map_err(|_| bad("dims"))?;
        let side: f64 = field("L")?.parse().map_err(|_| bad("L"))?;
        let points: usize = field("N")?.parse().map_err(|_| bad("N"))?;
        let mut g = Self::zeros(dims, side, points)?;
        let mut raw = Vec::new();
        fs::File::open(path)?.read_to_end(&mut raw)?;
        if raw.len() != 16 * g.len() {
            return Err(LabError::input(format!("grid file has {} bytes, expected {}", raw.len(), 16 * g.len())));
        }
        for (c, chunk) in g.data.iter_mut().zip(raw.chunks_exact(16)) {
            let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
            *c = Complex64::new(re, im);
        }
        Ok(g)
    }
}

/// Fixed tensor Gauss-Legendre rule for `m(ξ)` at the moderate frequencies a
/// grid can hold.
#[derive(Clone, Debug)]
pub struct GridMultiplier {
    nodes: Vec<[f64; 4]>,
    weights: Vec<f64>,
}

impl GridMultiplier {
    pub fn new(spec: &SurfaceSpec, phi: &CutoffSpec, panels: usize, order: usize) -> Result<Self> {
        if spec.dim() != 2 || phi.dim() != 2 {
            return Err(LabError::input("grid operators are implemented for n = 2"));
        }
        let gl = GaussLegendre::new(order);
        let sb = phi.support_box();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut g = [0.0; 4];
        let width = |d: usize| (sb[d].1 - sb[d].0) / panels as f64;
        for pu in 0..panels {
            for pv in 0..panels {
                for (xu, wu) in gl.nodes.iter().zip(&gl.weights) {
                    for (xv, wv) in gl.nodes.iter().zip(&gl.weights) {
                        let u = sb[0].0 + width(0) * (pu as f64 + 0.5 * (xu + 1.0));
                        let v = sb[1].0 + width(1) * (pv as f64 + 0.5 * (xv + 1.0));
                        let f = phi.eval(&[u, v]);
                        if f == 0.0 {
                            continue;
                        }
                        spec.gamma_at(&[u, v], &mut g);
                        nodes.push(g);
                        weights.push(0.25 * width(0) * width(1) * wu * wv * f);
                    }
                }
            }
        }
        Ok(GridMultiplier { nodes, weights })
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (g, w) in self.nodes.iter().zip(&self.weights) {
            let p = g[0] * xi[0] + g[1] * xi[1] + g[2] * xi[2] + g[3] * xi[3];
            let (s, c) = p.sin_cos();
            acc += Complex64::new(w * c, -w * s);
        }
        acc
    }
}

/// Frequency pre-filter of the split `f = f₁ + f₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Whole,
    /// `β₀(|ξ′| / (2c_*|ξ″|))`, the part near the critical cone.
    F2,
    /// The complement `1 − β₀(…)`.
    F1,
}

pub fn split_factor(split: Split, c_star: f64, xi: &[f64]) -> f64 {
    if split == Split::Whole {
        return 1.0;
    }
    let n = xi.len() / 2;
    let a = xi[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
    let b = xi[n..].iter().map(|x| x * x).sum::<f64>().sqrt();
    let f2 = if b == 0.0 {
        if a == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        beta0(a / (2.0 * c_star * b))
    };
    match split {
        Split::F2 => f2,
        _ => 1.0 - f2,
    }
}

/// Largest `λ` with four samples per period at the top band frequency `2λ`.
pub fn max_resolved_lambda(side: f64, points: usize) -> f64 {
    std::f64::consts::PI * points as f64 / (4.0 * side)
}

fn band_weights(g: &GridField, c_star: f64, lambda: f64, split: Split) -> Vec<(usize, [f64; 4], f64)> {
    let mut xi = [0.0; 4];
    (0..g.len())
        .filter_map(|i| {
            g.frequency(i, &mut xi);
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let w = beta_lambda(r, lambda) * split_factor(split, c_star, &xi);
            (w != 0.0).then_some((i, xi, w))
        })
        .collect()
}

fn check_band(spec: &SurfaceSpec, g: &GridField, lambda: f64, t: f64) -> Result<()> {
    if g.dims != 2 * spec.dim() {
        return Err(LabError::input("grid dimension must be 2n"));
    }
    if !(1.0..=2.0).contains(&t) {
        return Err(LabError::input("t must lie in [1, 2]"));
    }
    if !(lambda > 0.0) || lambda > max_resolved_lambda(g.side, g.points) {
        return Err(LabError::input(format!(
            "grid with N = {}, L = {} does not resolve lambda = {lambda}",
            g.points, g.side
        )));
    }
    Ok(())
}

/// `A_λ[φ]f(·, t)`: multiply `f̂` by `m(tξ)β_λ(ξ)` and the split filter.
pub fn apply_band(
    spec: &SurfaceSpec,
    mult: &GridMultiplier,
    f: &GridField,
    lambda: f64,
    t: f64,
    split: Split,
) -> Result<GridField> {
    check_band(spec, f, lambda, t)?;
    let band = band_weights(f, spec.c_star(33), lambda, split);
    let factors: Vec<Complex64> = band
        .par_iter()
        .map(|(_, xi, w)| {
            let txi = [t * xi[0], t * xi[1], t * xi[2], t * xi[3]];
            mult.eval(&txi) * *w
        })
        .collect();
    let mut out = f.clone();
    out.forward();
    let mut next = 0;
    for i in 0..out.len() {
        if next < band.len() && band[next].0 == i {
            out.data[i] *= factors[next];
            next += 1;
        } else {
            out.data[i] = Complex64::new(0.0, 0.0);
        }
    }
    out.backward();
    Ok(out)
}

/// `sup_ξ |m(tξ) β_λ(ξ)|` over the grid frequencies, the Plancherel bound of
/// the band operator.
pub fn band_sup(spec: &SurfaceSpec, mult: &GridMultiplier, g: &GridField, lambda: f64, t: f64, split: Split) -> Result<f64> {
    check_band(spec, g, lambda, t)?;
    let band = band_weights(g, spec.c_star(33), lambda, split);
    Ok(band
        .par_iter()
        .map(|(_, xi, w)| (mult.eval(&[t * xi[0], t * xi[1], t * xi[2], t * xi[3]]) * *w).norm())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max))
}

/// The band kernel at the given sample indices, by direct summation over the
/// frequency lattice with the adaptive multiplier quadrature. Independent of
/// both the FFT and [`GridMultiplier`].
pub fn band_kernel_direct(
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    grid: &GridField,
    lambda: f64,
    t: f64,
    at: &[usize],
) -> Result<Vec<Complex64>> {
    check_band(spec, grid, lambda, t)?;
    let quad = Quadrature::new(QuadSettings {
        order: 16,
        check_order: Some(12),
        max_panel: 0.25,
        ..QuadSettings::default()
    });
    let band = band_weights(grid, spec.c_star(33), lambda, Split::Whole);
    let ms: Vec<Complex64> = band
        .par_iter()
        .map(|(_, xi, w)| {
            let txi = [t * xi[0], t * xi[1], t * xi[2], t * xi[3]];
            quad.evaluate(spec, phi, &txi, Channel::Value).map(|m| m.value * *w)
        })
        .collect::<maxavg_core::Result<_>>()?;
    let mut x = vec![0.0; grid.dims];
    let scale = 1.0 / grid.len() as f64;
    Ok(at
        .iter()
        .map(|&i| {
            grid.position(i, &mut x);
            let mut acc = Complex64::new(0.0, 0.0);
            for ((_, xi, _), m) in band.iter().zip(&ms) {
                let p: f64 = xi.iter().zip(&x).map(|(a, b)| a * b).sum();
                acc += m * Complex64::from_polar(1.0, p);
            }
            acc * scale
        })
        .collect())
}
