//! Pointwise check of the broad-narrow bound
//! `|A[φ]f| ≤ C·max_q |A[φ_q]f| + h⁻²·max_{separated triples} Π |A[φ_qi]f|^{1/3}`.
//!
//! All pieces share one tensor rule on panels of side `h/4`, aligned with the
//! piece grid, so the partition identity `Σ_q A[φ_q]f = A[φ]f` is checked on
//! identical nodes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stats::pairwise_sum;
use crate::surfaces::SurfaceSpec;

use super::average::{InputFn, TensorRule};
use super::cutoff::{chi_tilde, CutoffSpec};

/// Number of side-`h` squares within distance `h` of two selected squares.
pub const BROAD_NARROW_C: f64 = 50.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BroadNarrow {
    pub lhs: f64,
    pub max_single: f64,
    pub max_triple: f64,
    pub rhs: f64,
    pub ok: bool,
    /// `|Σ_q A[φ_q]f − A[φ]f|`.
    pub partition_error: f64,
    pub pieces: Vec<(Vec<f64>, f64)>,
}

/// Euclidean distance between the closed squares `w + [−h/2, h/2]^n`.
pub fn square_distance(a: &[f64], b: &[f64], h: f64) -> f64 {
    let s: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let g = (libm::fabs(x - y) - h).max(0.0);
            g * g
        })
        .sum();
    libm::sqrt(s)
}

pub fn broad_narrow_certify(
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    f: &dyn InputFn,
    x: &[f64],
    t: f64,
    h: f64,
    order: usize,
) -> Result<BroadNarrow> {
    let n = spec.dim();
    if phi.dim() != n || x.len() != 2 * n {
        return Err(Error::invalid("dimension mismatch between surface, cutoff and point"));
    }
    if phi.window.is_some() {
        return Err(Error::invalid("broad-narrow check needs an unwindowed cutoff"));
    }
    let centers = phi.piece_centers(h)?;
    let m = libm::round(2.0 / h) as i64 + 1;
    let mut slot = vec![usize::MAX; (m as usize).pow(n as u32)];
    for (k, w) in centers.iter().enumerate() {
        slot[grid_index(w, h, m)] = k;
    }
    let rule = TensorRule::new(phi, 0.25 * h, order)?;
    let vals = rule.input_values(spec, f, x, t);

    let mut whole = Vec::with_capacity(vals.len());
    let mut per_piece: Vec<Vec<f64>> = vec![Vec::new(); centers.len()];
    let mut near: Vec<Vec<(i64, f64)>> = vec![Vec::new(); n];
    for ((u, w), v) in rule.points.iter().zip(&rule.weights).zip(&vals) {
        let base = w * phi.eval(u) * v;
        whole.push(base);
        // Each coordinate sees at most two window centers.
        for d in 0..n {
            near[d].clear();
            let s = (u[d] + 1.0) / h;
            let lo = libm::floor(s) as i64;
            for i in [lo, lo + 1] {
                if (0..m).contains(&i) {
                    let c = chi_tilde(s - i as f64);
                    if c != 0.0 {
                        near[d].push((i, c));
                    }
                }
            }
        }
        let combos: usize = near.iter().map(|v| v.len()).product();
        for j in 0..combos {
            let mut jdx = j;
            let mut idx = 0usize;
            let mut stride = 1usize;
            let mut weight = base;
            for nd in near.iter() {
                let (i, c) = nd[jdx % nd.len()];
                jdx /= nd.len();
                idx += i as usize * stride;
                stride *= m as usize;
                weight *= c;
            }
            let k = slot[idx];
            if k != usize::MAX {
                per_piece[k].push(weight);
            }
        }
    }
    let total = pairwise_sum(&whole);
    let values: Vec<f64> = per_piece.iter().map(|p| pairwise_sum(p)).collect();
    let recon = pairwise_sum(&values);
    let mags: Vec<f64> = values.iter().map(|v| libm::fabs(*v)).collect();
    let max_single = mags.iter().fold(0.0f64, |a, b| a.max(*b));

    let mut order_idx: Vec<usize> = (0..centers.len()).collect();
    order_idx.sort_by(|a, b| mags[*b].total_cmp(&mags[*a]).then(a.cmp(b)));
    let mut best = 0.0f64;
    // Magnitudes are sorted, so a triple starting at i cannot beat mags[i].
    for (ai, &i) in order_idx.iter().enumerate() {
        if mags[i] <= best {
            break;
        }
        for (bj, &j) in order_idx.iter().enumerate().skip(ai + 1) {
            if libm::cbrt(mags[i] * mags[j] * mags[j]) <= best {
                break;
            }
            if square_distance(&centers[i], &centers[j], h) < h {
                continue;
            }
            for &k in order_idx.iter().skip(bj + 1) {
                let g = libm::cbrt(mags[i] * mags[j] * mags[k]);
                if g <= best {
                    break;
                }
                if square_distance(&centers[i], &centers[k], h) >= h
                    && square_distance(&centers[j], &centers[k], h) >= h
                {
                    best = g;
                    break;
                }
            }
        }
    }
    let lhs = libm::fabs(total);
    let rhs = BROAD_NARROW_C * max_single + best / (h * h);
    Ok(BroadNarrow {
        lhs,
        max_single,
        max_triple: best,
        rhs,
        ok: lhs <= rhs,
        partition_error: libm::fabs(recon - total),
        pieces: centers.into_iter().zip(values).collect(),
    })
}

fn grid_index(w: &[f64], h: f64, m: i64) -> usize {
    let mut idx = 0usize;
    let mut stride = 1usize;
    for c in w {
        let i = libm::round((c + 1.0) / h) as usize;
        idx += i * stride;
        stride *= m as usize;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::average::{average_quadrature, Everywhere, GaussianBlobs};
    use crate::rng::Stream;

    #[test]
    fn pieces_match_windowed_quadrature() {
        let spec = SurfaceSpec::gamma_circ();
        let phi = CutoffSpec::default_bump(2);
        let mut s = Stream::new(11, &[]);
        let f = GaussianBlobs::random(4, 3, 1.0, 0.7, &mut s);
        let x = [0.1, 0.2, -0.3, 0.1];
        let bn = broad_narrow_certify(&spec, &phi, &f, &x, 1.2, 0.25, 10).unwrap();
        assert!(bn.ok);
        assert!(bn.partition_error < 1e-12);
        for (w, v) in bn.pieces.iter().take(12) {
            let piece = phi.piece(w, 0.25);
            let q = average_quadrature(&spec, &piece, &f, &x, 1.2, 0.0625, 10).unwrap();
            assert!((q - v).abs() < 1e-13, "{w:?} {q} {v}");
        }
    }

    #[test]
    fn constant_input_reconstructs_integral() {
        let spec = SurfaceSpec::gamma_circ();
        let phi = CutoffSpec::default_bump(2);
        let bn = broad_narrow_certify(&spec, &phi, &Everywhere, &[0.0; 4], 1.0, 0.25, 10).unwrap();
        assert!((bn.lhs - phi.integral()).abs() < 1e-9);
        assert!(bn.ok);
    }

    #[test]
    fn lhs_bounded_by_piece_sum() {
        let spec = SurfaceSpec::gamma_circ();
        let phi = CutoffSpec::default_bump(2);
        let mut s = Stream::new(2, &[]);
        let f = GaussianBlobs::random(4, 5, 1.5, 0.5, &mut s);
        let bn = broad_narrow_certify(&spec, &phi, &f, &[0.3, 0.0, 0.2, -0.4], 1.7, 0.5, 10).unwrap();
        let sum: f64 = bn.pieces.iter().map(|p| p.1.abs()).sum();
        assert!(bn.lhs <= sum + 1e-14);
        assert!(bn.max_triple <= bn.max_single);
    }

    #[test]
    fn square_distance_examples() {
        assert_eq!(square_distance(&[0.0, 0.0], &[0.25, 0.0], 0.25), 0.0);
        assert!((square_distance(&[0.0, 0.0], &[0.5, 0.0], 0.25) - 0.25).abs() < 1e-15);
    }
}
