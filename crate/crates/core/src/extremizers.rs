//! δ-sweeps of the extremizer families: lower bounds for
//! `‖sup_t |A χ_S|‖_{L^q(R)} / ‖χ_S‖_p` and their log-log slopes.
//!
//! Each outer sample draws `x` from the lower-bound region `R` with its
//! importance weight. The inner average is estimated twice: a pilot pass on a
//! shared set of inner points over the whole `t`-grid picks `t*`, then fresh
//! points give an unbiased estimate of `A χ_S(x, t*) ≤ sup_t A χ_S(x, t)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exponents::{predicted_ratio_slope, to_f64, ExponentPoint, Variant};
use crate::freqgeo::sets::{Family, LowerRegion, SetDescriptor, DEFAULT_INFLATION};
use crate::operator::CutoffSpec;
use crate::rng::{stratified, Stream};
use crate::stats::{fit_line, mean_stderr, LineFit};
use crate::surfaces::SurfaceSpec;

/// Time of the fixed-time variant.
pub const FIXED_TIME: f64 = 1.5;
/// A record with `stderr > UNDER_RESOLVED·norm_lb` is under-resolved.
pub const UNDER_RESOLVED: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub family: Family,
    pub variant: Variant,
    pub n: usize,
    pub delta: f64,
    pub inv_p: f64,
    pub inv_q: f64,
    pub fp_norm: f64,
    pub norm_lb: f64,
    pub stderr: f64,
    pub samples: usize,
    pub under_resolved: bool,
}

impl SweepRecord {
    pub fn ratio(&self) -> f64 {
        self.norm_lb / self.fp_norm
    }
}

/// Result of one outer sample: the importance weight and the inner estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SampleOutcome {
    pub weight: f64,
    pub value: f64,
    pub t_star: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerCounts {
    pub pilot: usize,
    pub fresh: usize,
}

impl InnerCounts {
    pub fn for_family(family: Family, variant: Variant) -> Self {
        match (family, variant) {
            (_, Variant::LocalSmoothing) => InnerCounts { pilot: 0, fresh: 128 },
            (Family::A, _) | (Family::B, _) => InnerCounts { pilot: 64, fresh: 64 },
            (Family::C, _) => InnerCounts { pilot: 16, fresh: 256 },
        }
    }
}

/// Everything needed to evaluate outer samples at one `δ`.
#[derive(Clone, Debug)]
pub struct DeltaPlan {
    pub desc: SetDescriptor,
    pub region: LowerRegion,
    pub variant: Variant,
    pub phi: CutoffSpec,
    pub t_grid: Vec<f64>,
    pub counts: InnerCounts,
    c_star: f64,
}

impl DeltaPlan {
    pub fn new(spec: &SurfaceSpec, phi: &CutoffSpec, family: Family, variant: Variant, delta: f64, inflation: f64) -> Result<Self> {
        let desc = SetDescriptor::knapp_family(family, spec, delta, inflation)?;
        let (region, t_grid) = match variant {
            Variant::Maximal => {
                let (a, b) = desc.t_window();
                let m = libm::ceil((b - a) / (0.25 * delta) - 1e-9) as usize;
                (desc.region()?, (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect())
            }
            Variant::LocalSmoothing => {
                if family != Family::B {
                    return Err(Error::Unsupported("the fixed-time sweep uses family B"));
                }
                (desc.fixed_time_region(FIXED_TIME)?, vec![FIXED_TIME])
            }
        };
        Ok(DeltaPlan {
            desc,
            region,
            variant,
            phi: phi.clone(),
            t_grid,
            counts: InnerCounts::for_family(family, variant),
            c_star: spec.c_star(33),
        })
    }

    /// The `index`-th outer sample; depends only on `(seed, δ-index, index)`.
    pub fn sample(&self, seed: u64, delta_index: u64, index: u64) -> SampleOutcome {
        let vtag = match self.variant {
            Variant::Maximal => 0,
            Variant::LocalSmoothing => 1,
        };
        let mut stream = Stream::new(seed, &[self.desc.family.tag(), vtag, delta_index, index]);
        let p = self.region.sample(&mut stream);
        let (value, t_star) = match self.desc.family {
            Family::A => self.inner_box(&mut stream, &p.x, &self.phi.support_box()),
            Family::B => {
                let r = libm::sqrt(self.desc.delta);
                let bx: Vec<(f64, f64)> = self.desc.u0.iter().map(|c| (c - r, c + r)).collect();
                self.inner_box(&mut stream, &p.x, &bx)
            }
            Family::C => self.inner_ball(&mut stream, &p.x),
        };
        SampleOutcome {
            weight: p.weight,
            value,
            t_star,
        }
    }

    fn integrand(&self, x: &[f64], t: f64, u: &[f64], g: &mut [f64], y: &mut [f64]) -> f64 {
        let w = self.phi.eval(u);
        if w == 0.0 {
            return 0.0;
        }
        self.desc.spec.gamma_at(u, g);
        for k in 0..y.len() {
            y[k] = x[k] - t * g[k];
        }
        if self.desc.contains(y) {
            w
        } else {
            0.0
        }
    }

    fn draw_box(stream: &mut Stream, bx: &[(f64, f64)], count: usize, buf: &mut Vec<f64>) -> Vec<Vec<f64>> {
        stratified(stream, bx.len(), count, buf);
        buf.chunks(bx.len())
            .map(|c| c.iter().zip(bx).map(|(s, (a, b))| a + (b - a) * s).collect())
            .collect()
    }

    /// Uniform inner points on a box of `u`.
    fn inner_box(&self, stream: &mut Stream, x: &[f64], bx: &[(f64, f64)]) -> (f64, f64) {
        let n = self.desc.n;
        let vol: f64 = bx.iter().map(|(a, b)| b - a).product();
        let mut buf = Vec::new();
        let mut g = vec![0.0; 2 * n];
        let mut y = vec![0.0; 2 * n];
        let t_star = if self.t_grid.len() == 1 {
            self.t_grid[0]
        } else {
            let pts = Self::draw_box(stream, bx, self.counts.pilot, &mut buf);
            let scores: Vec<f64> = if self.desc.family == Family::B {
                self.slab_scores(x, &pts, &mut g)
            } else {
                self.t_grid
                    .iter()
                    .map(|&t| pts.iter().map(|u| self.integrand(x, t, u, &mut g, &mut y)).sum())
                    .collect()
            };
            plateau_median(&self.t_grid, &scores)
        };
        let pts = Self::draw_box(stream, bx, self.counts.fresh, &mut buf);
        let s: f64 = pts.iter().map(|u| self.integrand(x, t_star, u, &mut g, &mut y)).sum();
        (vol * s / pts.len() as f64, t_star)
    }

    /// Pilot scores on the uniform `t`-grid: each inner point adds `φ(u)` on
    /// the interval of times where it hits the slab.
    fn slab_scores(&self, x: &[f64], pts: &[Vec<f64>], g: &mut [f64]) -> Vec<f64> {
        let m = self.t_grid.len();
        let a = self.t_grid[0];
        let dt = (self.t_grid[m - 1] - a) / (m - 1) as f64;
        let mut diff = vec![0.0; m + 1];
        for u in pts {
            let w = self.phi.eval(u);
            if w == 0.0 {
                continue;
            }
            self.desc.spec.gamma_at(u, g);
            let Some((lo, hi)) = self.desc.slab_times(x, g) else { continue };
            let i0 = libm::ceil((lo - a) / dt - 1e-9).max(0.0);
            let i1 = libm::floor((hi - a) / dt + 1e-9).min((m - 1) as f64);
            if i0 > i1 {
                continue;
            }
            diff[i0 as usize] += w;
            diff[i1 as usize + 1] -= w;
        }
        let mut acc = 0.0;
        diff[..m]
            .iter()
            .map(|d| {
                acc += d;
                acc
            })
            .collect()
    }

    /// Family C in the variables `s = tu − x′ ∈ [−δ, δ]^n`, `du = t^{−n} ds`.
    fn inner_ball(&self, stream: &mut Stream, x: &[f64]) -> (f64, f64) {
        let n = self.desc.n;
        let d = self.desc.delta;
        let bx = vec![(-d, d); n];
        let vol = libm::pow(2.0 * d, n as f64);
        let mut buf = Vec::new();
        let mut u = vec![0.0; n];
        let mut p = vec![0.0; n];
        let value_at = |t: f64, s: &[f64], u: &mut [f64], p: &mut [f64]| -> f64 {
            let s2: f64 = s.iter().map(|v| v * v).sum();
            if s2 > d * d {
                return 0.0;
            }
            for i in 0..n {
                u[i] = (x[i] + s[i]) / t;
            }
            let w = self.phi.eval(u);
            if w == 0.0 {
                return 0.0;
            }
            self.desc.spec.phi_at(u, p);
            let r2: f64 = (0..n).map(|k| (x[n + k] - t * p[k]).powi(2)).sum();
            if s2 + r2 <= d * d {
                w * libm::pow(t, -(n as f64))
            } else {
                0.0
            }
        };
        let limit = d * (1.0 + 1.1 * self.c_star);
        let mut candidates = Vec::new();
        for &t in &self.t_grid {
            for i in 0..n {
                u[i] = x[i] / t;
            }
            self.desc.spec.phi_at(&u, &mut p);
            let r2: f64 = (0..n).map(|k| (x[n + k] - t * p[k]).powi(2)).sum();
            if r2 <= limit * limit {
                candidates.push(t);
            }
        }
        if candidates.is_empty() {
            return (0.0, self.t_grid[0]);
        }
        let t_star = if candidates.len() == 1 {
            candidates[0]
        } else {
            let pts = Self::draw_box(stream, &bx, self.counts.pilot, &mut buf);
            let scores: Vec<f64> = candidates
                .iter()
                .map(|&t| pts.iter().map(|s| value_at(t, s, &mut u, &mut p)).sum())
                .collect();
            plateau_median(&candidates, &scores)
        };
        let pts = Self::draw_box(stream, &bx, self.counts.fresh, &mut buf);
        let s: f64 = pts.iter().map(|s| value_at(t_star, s, &mut u, &mut p)).sum();
        (vol * s / pts.len() as f64, t_star)
    }

    /// Record from outcomes listed in sample order.
    pub fn finish(&self, delta: f64, point: ExponentPoint, outcomes: &[SampleOutcome]) -> SweepRecord {
        let (inv_p, inv_q) = point.to_f64();
        let (norm_lb, stderr) = if inv_q == 0.0 {
            (outcomes.iter().fold(0.0f64, |m, o| m.max(o.value)), 0.0)
        } else {
            let qq = 1.0 / inv_q;
            let vals: Vec<f64> = outcomes.iter().map(|o| o.weight * libm::pow(o.value, qq)).collect();
            let (m, e) = mean_stderr(&vals);
            if m > 0.0 {
                let norm = libm::pow(m, inv_q);
                (norm, norm * inv_q * e / m)
            } else {
                (0.0, f64::INFINITY)
            }
        };
        SweepRecord {
            family: self.desc.family,
            variant: self.variant,
            n: self.desc.n,
            delta,
            inv_p,
            inv_q,
            fp_norm: self.desc.fp_norm(inv_p),
            norm_lb,
            stderr,
            samples: outcomes.len(),
            under_resolved: !(stderr <= UNDER_RESOLVED * norm_lb),
        }
    }
}

/// Median grid point of the set where `scores` attains its maximum, up to
/// rounding in the accumulated sums.
fn plateau_median(ts: &[f64], scores: &[f64]) -> f64 {
    let best = scores.iter().fold(f64::NEG_INFINITY, |m, s| m.max(*s));
    let cut = best - 1e-12 * libm::fabs(best);
    let top: Vec<f64> = ts.iter().zip(scores).filter(|(_, s)| **s >= cut).map(|(t, _)| *t).collect();
    top[(top.len() - 1) / 2]
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub variant: Variant,
    pub point: ExponentPoint,
    pub deltas: Vec<f64>,
    pub budget: usize,
    pub seed: u64,
    pub inflation: f64,
}

impl SweepConfig {
    pub fn new(family: Family, variant: Variant, point: ExponentPoint, deltas: Vec<f64>, budget: usize, seed: u64) -> Self {
        SweepConfig {
            family,
            variant,
            point,
            deltas,
            budget,
            seed,
            inflation: DEFAULT_INFLATION,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::invalid("no deltas given"));
        }
        for &d in &self.deltas {
            let l = -libm::log2(d);
            if !(l >= 3.0 - 1e-12 && l <= 8.0 + 1e-12) || libm::fabs(l - libm::round(l)) > 1e-12 {
                return Err(Error::invalid("deltas must be dyadic between 2^-8 and 2^-3"));
            }
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget must be positive"));
        }
        Ok(())
    }
}

/// Serial sweep; parallel drivers call [`DeltaPlan::sample`] per index and
/// [`DeltaPlan::finish`] on the outcomes in index order.
pub fn sweep(spec: &SurfaceSpec, phi: &CutoffSpec, cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.check()?;
    let mut out = Vec::with_capacity(cfg.deltas.len());
    for (di, &delta) in cfg.deltas.iter().enumerate() {
        let plan = DeltaPlan::new(spec, phi, cfg.family, cfg.variant, delta, cfg.inflation)?;
        let outcomes: Vec<SampleOutcome> = (0..cfg.budget as u64).map(|i| plan.sample(cfg.seed, di as u64, i)).collect();
        out.push(plan.finish(delta, cfg.point, &outcomes));
    }
    Ok(out)
}

pub type FitResult = LineFit;

/// Least squares of `log₂ ratio` on `log₂ δ`.
pub fn fit_slope(records: &[SweepRecord], force: bool) -> Result<FitResult> {
    if records.len() < 4 {
        return Err(Error::invalid("slope fits need at least four records"));
    }
    let bad = records.iter().filter(|r| r.under_resolved).count();
    if bad > 0 && !force {
        return Err(Error::UnderResolved(bad));
    }
    if records.iter().any(|r| !(r.norm_lb > 0.0)) {
        return Err(Error::invalid("a record has a zero lower bound"));
    }
    let x: Vec<f64> = records.iter().map(|r| libm::log2(r.delta)).collect();
    let y: Vec<f64> = records.iter().map(|r| libm::log2(r.ratio())).collect();
    Ok(fit_line(&x, &y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violation,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violation => "violation",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

pub const DEFAULT_TOL: f64 = 0.15;

pub fn verdict(fit: &FitResult, predicted: f64, tol: f64) -> Verdict {
    let s = fit.slope;
    if libm::fabs(s - predicted) <= tol || s > predicted {
        Verdict::Consistent
    } else if s < predicted - tol && fit.stderr_slope < 0.5 * tol {
        Verdict::Violation
    } else {
        Verdict::Inconclusive
    }
}

/// Predicted slope as a float.
pub fn predicted_slope(family: Family, n: usize, point: ExponentPoint, variant: Variant) -> Result<f64> {
    Ok(to_f64(predicted_ratio_slope(family, n as u32, point, variant)?))
}
