//! Extremizer sets for the necessity examples and the regions where the
//! averages of their indicators are bounded below.
//!
//! * family A: the vertical slab `{|y′|_∞ ≤ 2, |y″ + Φ(−y′)|_∞ ≤ C_Uδ}`, a
//!   reflected neighborhood of the surface; region `B(0, δ)`.
//! * family B: the Knapp slab with half-widths `C_Uδ^{1/2}` along
//!   `(e_i, ∂_iΦ(u∘))` and `C_Uδ` across; region `{tΓ(u) + ν·c}` with
//!   `|u − u∘|_∞ ≤ δ^{1/2}`, `t ∈ [1, 2]`, `|c|_∞ ≤ δ/2`.
//! * family C: the ball `B(0, δ)`; region `{tΓ(u) + ν·c}` with
//!   `|u − u∘|_∞ ≤ 1/8`, `t ∈ [1, 2]`, `|c|_∞ ≤ δ/4`.
//!
//! The local smoothing variant of family B fixes `t` and thickens in all `n`
//! normal directions.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::InputFn;
use crate::quad::GaussLegendre;
use crate::rng::Stream;
use crate::surfaces::{nondegeneracy_rank, SurfaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    C,
}

impl Family {
    pub fn tag(self) -> u64 {
        match self {
            Family::A => 0xA,
            Family::B => 0xB,
            Family::C => 0xC,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
        }
    }
}

pub const DEFAULT_INFLATION: f64 = 10.0;
const FAMILY_C_HALF: f64 = 0.125;

#[derive(Clone, Debug)]
pub struct SetDescriptor {
    pub family: Family,
    pub delta: f64,
    pub n: usize,
    pub spec: SurfaceSpec,
    pub inflation: f64,
    /// `u∘ = (1/2, …, 1/2)`.
    pub u0: Vec<f64>,
    /// Family B: unit long axes, then an orthonormal basis of their complement.
    basis: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

impl SetDescriptor {
    pub fn knapp_family(family: Family, spec: &SurfaceSpec, delta: f64, inflation: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.25) {
            return Err(Error::invalid("delta must lie in (0, 1/4]"));
        }
        if !(inflation >= 1.0) {
            return Err(Error::invalid("inflation must be at least 1"));
        }
        let n = spec.dim();
        let u0 = vec![0.5; n];
        let (rank, _) = nondegeneracy_rank(spec, &u0)?;
        if rank < n {
            return Err(Error::Degenerate("second derivatives of the surface lack full rank"));
        }
        let basis = if family == Family::B {
            let long = long_axes(spec, &u0);
            let short = linalg::orthonormal_complement(&long, 2 * n);
            let mut cols = long;
            cols.extend(short);
            let b = linalg::from_columns(&cols);
            let inv = b.clone().try_inverse().ok_or(Error::Degenerate("long axes are dependent"))?;
            Some((b, inv))
        } else {
            None
        };
        Ok(SetDescriptor {
            family,
            delta,
            n,
            spec: spec.clone(),
            inflation,
            u0,
            basis,
        })
    }

    /// Unit long axes of the family B slab.
    pub fn long_axes(&self) -> Vec<Vec<f64>> {
        long_axes(&self.spec, &self.u0)
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let n = self.n;
        let cu = self.inflation * self.delta;
        match self.family {
            Family::A => {
                if y[..n].iter().any(|v| libm::fabs(*v) > 2.0) {
                    return false;
                }
                let neg: Vec<f64> = y[..n].iter().map(|v| -v).collect();
                let mut p = vec![0.0; n];
                self.spec.phi_at(&neg, &mut p);
                y[n..].iter().zip(&p).all(|(a, b)| libm::fabs(a + b) <= cu)
            }
            Family::B => {
                let inv = &self.basis.as_ref().expect("family B carries a basis").1;
                let long = self.inflation * libm::sqrt(self.delta);
                for i in 0..2 * n {
                    let mut c = 0.0;
                    for k in 0..2 * n {
                        c += inv[(i, k)] * y[k];
                    }
                    let lim = if i < n { long } else { cu };
                    if libm::fabs(c) > lim {
                        return false;
                    }
                }
                true
            }
            Family::C => linalg::norm(y) <= self.delta,
        }
    }

    /// Family B: the times `t` with `x − t·g` in the slab, or `None`.
    pub fn slab_times(&self, x: &[f64], g: &[f64]) -> Option<(f64, f64)> {
        let inv = &self.basis.as_ref()?.1;
        let n = self.n;
        let long = self.inflation * libm::sqrt(self.delta);
        let short = self.inflation * self.delta;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..2 * n {
            let (mut a, mut b) = (0.0, 0.0);
            for k in 0..2 * n {
                a += inv[(i, k)] * x[k];
                b += inv[(i, k)] * g[k];
            }
            let lim = if i < n { long } else { short };
            // |a − t·b| ≤ lim
            if b == 0.0 {
                if libm::fabs(a) > lim {
                    return None;
                }
                continue;
            }
            let (t1, t2) = ((a - lim) / b, (a + lim) / b);
            lo = lo.max(t1.min(t2));
            hi = hi.min(t1.max(t2));
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Closed-form Lebesgue measure of the set.
    pub fn reference_measure(&self) -> f64 {
        let n = self.n as f64;
        let cu = self.inflation * self.delta;
        match self.family {
            Family::A => libm::pow(4.0, n) * libm::pow(2.0 * cu, n),
            Family::B => {
                let det = libm::fabs(self.basis.as_ref().expect("family B carries a basis").0.clone().determinant());
                det * libm::pow(2.0 * self.inflation * libm::sqrt(self.delta), n) * libm::pow(2.0 * cu, n)
            }
            Family::C => ball_volume(2 * self.n, self.delta),
        }
    }

    /// `‖χ‖_p = |set|^{1/p}`.
    pub fn fp_norm(&self, inv_p: f64) -> f64 {
        if inv_p == 0.0 {
            1.0
        } else {
            libm::pow(self.reference_measure(), inv_p)
        }
    }

    /// Time window of the supremum.
    pub fn t_window(&self) -> (f64, f64) {
        match self.family {
            Family::A => (1.0, 1.0 + self.delta),
            _ => (1.0, 2.0),
        }
    }

    pub fn region(&self) -> Result<LowerRegion> {
        let n = self.n;
        match self.family {
            Family::A => Ok(LowerRegion::Ball {
                dim: 2 * n,
                radius: self.delta,
            }),
            Family::B => LowerRegion::cone(&self.spec, &self.u0, libm::sqrt(self.delta), TimeRange::Window(1.0, 2.0), 0.5 * self.delta),
            Family::C => LowerRegion::cone(&self.spec, &self.u0, FAMILY_C_HALF, TimeRange::Window(1.0, 2.0), 0.25 * self.delta),
        }
    }

    /// Region of the fixed-time variant, `{tΓ(u) + ν·c}` with `n` normals.
    pub fn fixed_time_region(&self, t: f64) -> Result<LowerRegion> {
        match self.family {
            Family::B => LowerRegion::cone(&self.spec, &self.u0, libm::sqrt(self.delta), TimeRange::Fixed(t), 0.5 * self.delta),
            _ => Err(Error::Unsupported("the fixed-time variant is built for family B")),
        }
    }
}

impl InputFn for SetDescriptor {
    fn value(&self, y: &[f64]) -> f64 {
        if self.contains(y) {
            1.0
        } else {
            0.0
        }
    }
}

fn long_axes(spec: &SurfaceSpec, u0: &[f64]) -> Vec<Vec<f64>> {
    let n = spec.dim();
    let j = spec.jacobian_at(u0);
    (0..n)
        .map(|i| {
            let mut v = vec![0.0; 2 * n];
            v[i] = 1.0;
            for k in 0..n {
                v[n + k] = j[(k, i)];
            }
            let s = linalg::norm(&v);
            v.iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Volume of the Euclidean ball of radius `r` in `R^d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    let half = d as f64 / 2.0;
    libm::pow(core::f64::consts::PI, half) / libm::tgamma(half + 1.0) * libm::pow(r, d as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeRange {
    Window(f64, f64),
    Fixed(f64),
}

/// Parametrized lower-bound region.
#[derive(Clone, Debug)]
pub enum LowerRegion {
    Ball { dim: usize, radius: f64 },
    /// `x = tΓ(u) + Σ c_k ν_k`.
    Cone {
        spec: SurfaceSpec,
        time: TimeRange,
        u_center: Vec<f64>,
        u_half: f64,
        normals: Vec<Vec<f64>>,
        c_half: f64,
    },
}

/// A sampled point with the weight turning sample means into integrals over
/// the region.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSample {
    pub x: Vec<f64>,
    pub t: f64,
    pub u: Vec<f64>,
    pub c: Vec<f64>,
    pub weight: f64,
}

impl LowerRegion {
    pub fn cone(spec: &SurfaceSpec, u_center: &[f64], u_half: f64, time: TimeRange, c_half: f64) -> Result<Self> {
        let n = spec.dim();
        let j = spec.jacobian_at(u_center);
        let mut span: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; 2 * n];
                v[i] = 1.0;
                for k in 0..n {
                    v[n + k] = j[(k, i)];
                }
                v
            })
            .collect();
        if let TimeRange::Window(..) = time {
            span.push(spec.gamma(u_center));
        }
        let normals = linalg::orthonormal_complement(&span, 2 * n);
        let want = match time {
            TimeRange::Window(..) => n - 1,
            TimeRange::Fixed(_) => n,
        };
        if normals.len() != want {
            return Err(Error::Degenerate("cone directions are dependent at the center"));
        }
        Ok(LowerRegion::Cone {
            spec: spec.clone(),
            time,
            u_center: u_center.to_vec(),
            u_half,
            normals,
            c_half,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            LowerRegion::Ball { dim, .. } => *dim,
            LowerRegion::Cone { spec, .. } => 2 * spec.dim(),
        }
    }

    /// Volume of the parameter box.
    fn param_volume(&self) -> f64 {
        match self {
            LowerRegion::Ball { dim, radius } => ball_volume(*dim, *radius),
            LowerRegion::Cone {
                spec,
                time,
                u_half,
                normals,
                c_half,
                ..
            } => {
                let n = spec.dim() as f64;
                let tl = match time {
                    TimeRange::Window(a, b) => b - a,
                    TimeRange::Fixed(_) => 1.0,
                };
                tl * libm::pow(2.0 * u_half, n) * libm::pow(2.0 * c_half, normals.len() as f64)
            }
        }
    }

    /// `|det ∂x/∂(t, u, c)|`, or `|det ∂x/∂(u, c)|` at fixed time.
    pub fn jacobian(&self, t: f64, u: &[f64]) -> f64 {
        match self {
            LowerRegion::Ball { .. } => 1.0,
            LowerRegion::Cone { spec, time, normals, .. } => {
                let n = spec.dim();
                let j = spec.jacobian_at(u);
                let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
                if let TimeRange::Window(..) = time {
                    cols.push(spec.gamma(u));
                }
                for i in 0..n {
                    let mut v = vec![0.0; 2 * n];
                    v[i] = t;
                    for k in 0..n {
                        v[n + k] = t * j[(k, i)];
                    }
                    cols.push(v);
                }
                cols.extend(normals.iter().cloned());
                libm::fabs(linalg::from_columns(&cols).determinant())
            }
        }
    }

    fn map(&self, t: f64, u: &[f64], c: &[f64], out: &mut [f64]) {
        if let LowerRegion::Cone { spec, normals, .. } = self {
            spec.gamma_at(u, out);
            for v in out.iter_mut() {
                *v *= t;
            }
            for (ck, nu) in c.iter().zip(normals) {
                for (o, e) in out.iter_mut().zip(nu) {
                    *o += ck * e;
                }
            }
        }
    }

    pub fn sample(&self, stream: &mut Stream) -> RegionSample {
        match self {
            LowerRegion::Ball { dim, radius } => {
                let mut x = vec![0.0; *dim];
                stream.in_ball(&mut x, *radius);
                RegionSample {
                    x,
                    t: 1.0,
                    u: Vec::new(),
                    c: Vec::new(),
                    weight: ball_volume(*dim, *radius),
                }
            }
            LowerRegion::Cone {
                spec,
                time,
                u_center,
                u_half,
                normals,
                c_half,
            } => {
                let n = spec.dim();
                let t = match time {
                    TimeRange::Window(a, b) => stream.range(*a, *b),
                    TimeRange::Fixed(t) => *t,
                };
                let u: Vec<f64> = u_center.iter().map(|c| stream.range(c - u_half, c + u_half)).collect();
                let c: Vec<f64> = (0..normals.len()).map(|_| stream.range(-c_half, *c_half)).collect();
                let mut x = vec![0.0; 2 * n];
                self.map(t, &u, &c, &mut x);
                let weight = self.param_volume() * self.jacobian(t, &u);
                RegionSample { x, t, u, c, weight }
            }
        }
    }

    /// Exact measure: the Jacobian is polynomial in `u` and a power of `t`.
    pub fn measure(&self) -> f64 {
        match self {
            LowerRegion::Ball { dim, radius } => ball_volume(*dim, *radius),
            LowerRegion::Cone {
                spec,
                time,
                u_center,
                u_half,
                normals,
                c_half,
            } => {
                let n = spec.dim();
                let (t_ref, t_factor) = match time {
                    TimeRange::Window(a, b) => (
                        1.0,
                        (libm::pow(*b, n as f64 + 1.0) - libm::pow(*a, n as f64 + 1.0)) / (n as f64 + 1.0),
                    ),
                    TimeRange::Fixed(t) => (*t, 1.0),
                };
                let order = 8usize;
                let panels = 4usize;
                let gl = GaussLegendre::new(order);
                let (mut xs, mut ws) = (Vec::new(), Vec::new());
                // Offsets from the center, shared by all axes.
                let mut nodes: Vec<(f64, f64)> = Vec::new();
                for p in 0..panels {
                    let lo = -u_half + 2.0 * u_half * p as f64 / panels as f64;
                    gl.mapped(lo, lo + 2.0 * u_half / panels as f64, &mut xs, &mut ws);
                    nodes.extend(xs.iter().copied().zip(ws.iter().copied()));
                }
                let per = nodes.len();
                let mut terms = Vec::with_capacity(per.pow(n as u32));
                let mut u = vec![0.0; n];
                for idx in 0..per.pow(n as u32) {
                    let mut j = idx;
                    let mut w = 1.0;
                    for d in 0..n {
                        let (x, wx) = nodes[j % per];
                        j /= per;
                        u[d] = u_center[d] + x;
                        w *= wx;
                    }
                    terms.push(w * self.jacobian(t_ref, &u));
                }
                crate::stats::pairwise_sum(&terms) * t_factor * libm::pow(2.0 * c_half, normals.len() as f64)
            }
        }
    }

    /// Membership by Newton inversion of the parametrization from several
    /// starting times.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            LowerRegion::Ball { radius, .. } => linalg::norm(x) <= *radius,
            LowerRegion::Cone {
                spec,
                time,
                u_center,
                u_half,
                normals,
                c_half,
            } => {
                let n = spec.dim();
                let slack = 1e-9;
                let starts: Vec<f64> = match time {
                    TimeRange::Window(a, b) => (0..5).map(|i| a + (b - a) * i as f64 / 4.0).collect(),
                    TimeRange::Fixed(t) => vec![*t],
                };
                let windowed = matches!(time, TimeRange::Window(..));
                for t0 in starts {
                    let mut t = t0;
                    let mut u: Vec<f64> = x[..n].iter().map(|v| v / t0).collect();
                    let mut c = vec![0.0; normals.len()];
                    let mut out = vec![0.0; 2 * n];
                    let mut converged = false;
                    for _ in 0..50 {
                        self.map(t, &u, &c, &mut out);
                        let r = DVector::from_iterator(2 * n, out.iter().zip(x).map(|(a, b)| a - b));
                        if r.norm() <= 1e-13 * (1.0 + linalg::norm(x)) {
                            converged = true;
                            break;
                        }
                        let jac = spec.jacobian_at(&u);
                        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
                        if windowed {
                            cols.push(spec.gamma(&u));
                        }
                        for i in 0..n {
                            let mut v = vec![0.0; 2 * n];
                            v[i] = t;
                            for k in 0..n {
                                v[n + k] = t * jac[(k, i)];
                            }
                            cols.push(v);
                        }
                        cols.extend(normals.iter().cloned());
                        let Some(step) = linalg::from_columns(&cols).lu().solve(&r) else { break };
                        let mut o = 0;
                        if windowed {
                            t -= step[0];
                            o = 1;
                        }
                        for i in 0..n {
                            u[i] -= step[o + i];
                        }
                        for k in 0..c.len() {
                            c[k] -= step[o + n + k];
                        }
                    }
                    if !converged {
                        continue;
                    }
                    let t_ok = match time {
                        TimeRange::Window(a, b) => t >= a - slack && t <= b + slack,
                        TimeRange::Fixed(_) => true,
                    };
                    let u_ok = u.iter().zip(u_center).all(|(a, b)| libm::fabs(a - b) <= u_half + slack);
                    let c_ok = c.iter().all(|v| libm::fabs(*v) <= c_half + slack);
                    if t_ok && u_ok && c_ok {
                        return true;
                    }
                }
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{average_point, CutoffSpec};

    #[test]
    fn knapp_axes_for_the_model() {
        let spec = SurfaceSpec::gamma_circ();
        let d = SetDescriptor::knapp_family(Family::B, &spec, 1.0 / 16.0, DEFAULT_INFLATION).unwrap();
        let s = 1.0 / libm::sqrt(3.0);
        let ax = d.long_axes();
        let want = [[s, 0.0, s, s], [0.0, s, -s, s]];
        for (a, w) in ax.iter().zip(&want) {
            for (x, y) in a.iter().zip(w) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        // Orthonormal basis here, so the volume is the product of side lengths.
        let cu = DEFAULT_INFLATION;
        let delta: f64 = 1.0 / 16.0;
        let want = (2.0 * cu * delta.sqrt()).powi(2) * (2.0 * cu * delta).powi(2);
        assert!((d.reference_measure() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn reflected_neighborhood() {
        let spec = SurfaceSpec::gamma_circ();
        let d = SetDescriptor::knapp_family(Family::A, &spec, 1.0 / 64.0, DEFAULT_INFLATION).unwrap();
        let g = spec.gamma(&[0.5, 0.5]);
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        assert!(d.contains(&neg));
        assert!(!d.contains(&g));
    }

    #[test]
    fn ball_volume_in_four_dims() {
        let delta: f64 = 0.1;
        let want = core::f64::consts::PI.powi(2) / 2.0 * delta.powi(4);
        assert!((ball_volume(4, delta) - want).abs() < 1e-15);
        let spec = SurfaceSpec::gamma_circ();
        let d = SetDescriptor::knapp_family(Family::C, &spec, delta, DEFAULT_INFLATION).unwrap();
        assert!((d.fp_norm(0.25) - want.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn delta_range() {
        let spec = SurfaceSpec::gamma_circ();
        assert!(SetDescriptor::knapp_family(Family::C, &spec, 0.3, DEFAULT_INFLATION).is_err());
        assert!(SetDescriptor::knapp_family(Family::C, &spec, 0.0, DEFAULT_INFLATION).is_err());
    }

    #[test]
    fn samplers_satisfy_membership() {
        let spec = SurfaceSpec::gamma_circ();
        for fam in [Family::A, Family::B, Family::C] {
            let d = SetDescriptor::knapp_family(fam, &spec, 1.0 / 16.0, DEFAULT_INFLATION).unwrap();
            let mut regions = vec![d.region().unwrap()];
            if fam == Family::B {
                regions.push(d.fixed_time_region(1.5).unwrap());
            }
            for r in regions {
                let mut s = Stream::new(3, &[fam.tag()]);
                for _ in 0..500 {
                    let p = r.sample(&mut s);
                    assert!(r.contains(&p.x), "{fam:?} {p:?}");
                }
            }
        }
    }

    #[test]
    fn region_measure_matches_sample_weights() {
        let spec = SurfaceSpec::gamma_circ();
        let d = SetDescriptor::knapp_family(Family::C, &spec, 1.0 / 8.0, DEFAULT_INFLATION).unwrap();
        let r = d.region().unwrap();
        let mut s = Stream::new(9, &[]);
        let w: Vec<f64> = (0..20000).map(|_| r.sample(&mut s).weight).collect();
        let (m, e) = crate::stats::mean_stderr(&w);
        assert!((m - r.measure()).abs() < 4.0 * e, "{m} {e} {}", r.measure());
    }

    #[test]
    fn points_outside_are_rejected() {
        let spec = SurfaceSpec::gamma_circ();
        let d = SetDescriptor::knapp_family(Family::B, &spec, 1.0 / 16.0, DEFAULT_INFLATION).unwrap();
        let r = d.region().unwrap();
        let mut x = spec.gamma(&[0.5, 0.5]);
        for v in x.iter_mut() {
            *v *= 2.5;
        }
        assert!(!r.contains(&x));
        assert!(!r.contains(&[0.0; 4]));
    }

    #[test]
    fn small_ball_average_at_a_cone_point() {
        let spec = SurfaceSpec::gamma_circ();
        let phi = CutoffSpec::default_bump(2);
        let delta = 1.0 / 16.0;
        let d = SetDescriptor::knapp_family(Family::C, &spec, delta, DEFAULT_INFLATION).unwrap();
        let x: Vec<f64> = spec.gamma(&[0.5, 0.5]).iter().map(|v| 1.5 * v).collect();
        let e = average_point(&spec, &phi, &d, &x, 1.5, 400_000, 2).unwrap();
        // Oracle: φ(u∘)·area{|1.5 DΓ h| ≤ δ} = e^{-1}·πδ²/6.75.
        let oracle = libm::exp(-1.0) * core::f64::consts::PI * delta * delta / 6.75;
        assert!((e.mean - oracle).abs() < 4.0 * e.stderr + 0.05 * oracle, "{} {} {oracle}", e.mean, e.stderr);
        assert!(e.mean >= 0.1 * delta * delta);
    }

    #[test]
    fn knapp_average_at_the_center() {
        let spec = SurfaceSpec::gamma_circ();
        let phi = CutoffSpec::default_bump(2);
        let delta: f64 = 1.0 / 64.0;
        let d = SetDescriptor::knapp_family(Family::B, &spec, delta, DEFAULT_INFLATION).unwrap();
        let t0 = 1.3;
        let x: Vec<f64> = spec.gamma(&[0.5, 0.5]).iter().map(|v| t0 * v).collect();
        let e = average_point(&spec, &phi, &d, &x, t0, 200_000, 5).unwrap();
        // ∫ over |u − u∘| ≤ δ^{1/2} of φ, by a fine midpoint rule.
        let r = delta.sqrt();
        let m = 400;
        let mut want = 0.0;
        for i in 0..m {
            for j in 0..m {
                let a = -r + 2.0 * r * (i as f64 + 0.5) / m as f64;
                let b = -r + 2.0 * r * (j as f64 + 0.5) / m as f64;
                if a * a + b * b <= r * r {
                    want += phi.eval(&[0.5 + a, 0.5 + b]) * (2.0 * r / m as f64).powi(2);
                }
            }
        }
        assert!(e.mean >= 0.5 * want, "{} {want}", e.mean);
    }
}
