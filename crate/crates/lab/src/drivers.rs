//! Rayon drivers. Work items are indexed and collected in index order, so
//! results do not depend on the number of worker threads.

use maxavg_core::extremizers::{DeltaPlan, SampleOutcome, SweepConfig, SweepRecord};
use maxavg_core::freqgeo::{overlap_sample, plate_family, summarize_overlap, OverlapAudit};
use maxavg_core::operator::{broad_narrow_certify, decay_fit, BroadNarrow, CutoffSpec, DecayFit, GaussianBlobs, Quadrature};
use maxavg_core::rng::Stream;
use maxavg_core::SurfaceSpec;
use rayon::prelude::*;

use crate::error::Result;

pub fn sweep(spec: &SurfaceSpec, phi: &CutoffSpec, cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.check()?;
    let mut out = Vec::with_capacity(cfg.deltas.len());
    for (di, &delta) in cfg.deltas.iter().enumerate() {
        let plan = DeltaPlan::new(spec, phi, cfg.family, cfg.variant, delta, cfg.inflation)?;
        let outcomes: Vec<SampleOutcome> = (0..cfg.budget as u64)
            .into_par_iter()
            .map(|i| plan.sample(cfg.seed, di as u64, i))
            .collect();
        out.push(plan.finish(delta, cfg.point, &outcomes));
    }
    Ok(out)
}

pub fn plate_audit(spec: &SurfaceSpec, lambda: f64, h: f64, samples: usize, seed: u64) -> Result<OverlapAudit> {
    let plates = plate_family(spec, lambda, h)?;
    let res: Vec<_> = (0..samples as u64)
        .into_par_iter()
        .map(|i| overlap_sample(&plates, seed, i))
        .collect::<maxavg_core::Result<_>>()?;
    Ok(summarize_overlap(lambda, h, plates.len(), &res))
}

/// One decay fit per direction.
pub fn decay_fits(
    quad: &Quadrature,
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    directions: &[Vec<f64>],
    lambdas: &[f64],
) -> Result<Vec<DecayFit>> {
    Ok(directions
        .par_iter()
        .map(|d| decay_fit(quad, spec, phi, d, lambdas))
        .collect::<maxavg_core::Result<_>>()?)
}

/// A seeded broad-narrow case: `f` a sum of three Gaussian blobs near the
/// origin and `x` close to `tΓ(u₀)`, so the average is not negligible.
#[derive(Clone, Debug)]
pub struct BroadNarrowCase {
    pub x: Vec<f64>,
    pub t: f64,
    pub f: GaussianBlobs,
}

pub fn broad_narrow_case(spec: &SurfaceSpec, seed: u64, index: u64) -> BroadNarrowCase {
    let n = spec.dim();
    let mut st = Stream::new(seed, &[0x424E, index]);
    let t = st.range(1.0, 2.0);
    let mut u0 = vec![0.0; n];
    st.in_ball(&mut u0, 0.8);
    let g = spec.gamma(&u0);
    let x: Vec<f64> = g.iter().map(|c| t * c + 0.05 * st.normal()).collect();
    let f = GaussianBlobs::random(2 * n, 3, 0.5, 0.4, &mut st);
    BroadNarrowCase { x, t, f }
}

pub fn broad_narrow_cases(
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    h: f64,
    order: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<BroadNarrow>> {
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| {
            let c = broad_narrow_case(spec, seed, i);
            broad_narrow_certify(spec, phi, &c.f, &c.x, c.t, h, order)
        })
        .collect::<maxavg_core::Result<_>>()?)
}
