//! Small dense helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with threshold `rel_tol * sigma_max`, plus the smallest singular value.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> (usize, f64) {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let r = s.iter().filter(|&&v| v > rel_tol * smax && v > 0.0).count();
    (r, s.last().copied().unwrap_or(0.0))
}

/// Orthonormal basis of the orthogonal complement of `span` in `R^dim`.
pub fn orthonormal_complement(span: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let push = |basis: &mut Vec<Vec<f64>>, v: &[f64]| -> bool {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let nw = norm(&w);
        if nw > 1e-10 * libm::fmax(norm(v), 1e-300) {
            for wi in w.iter_mut() {
                *wi /= nw;
            }
            basis.push(w);
            true
        } else {
            false
        }
    };
    for v in span {
        push(&mut basis, v);
    }
    let start = basis.len();
    while basis.len() < dim {
        // Add the standard vector with the largest residual.
        let mut best = (0usize, -1.0f64);
        for k in 0..dim {
            let mut e = alloc::vec![0.0; dim];
            e[k] = 1.0;
            let mut r2 = 1.0;
            for b in &basis {
                r2 -= b[k] * b[k];
            }
            if r2 > best.1 {
                best = (k, r2);
            }
        }
        let mut e = alloc::vec![0.0; dim];
        e[best.0] = 1.0;
        if !push(&mut basis, &e) {
            break;
        }
    }
    basis.split_off(start)
}

pub fn from_columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let span = vec![vec![1.0, 0.0, 1.0, 1.0], vec![0.0, 1.0, -1.0, 1.0]];
        let c = orthonormal_complement(&span, 4);
        assert_eq!(c.len(), 2);
        for a in &c {
            assert!((norm(a) - 1.0).abs() < 1e-12);
            for s in &span {
                assert!(dot(a, s).abs() < 1e-12);
            }
        }
        assert!(dot(&c[0], &c[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_of_proportional_rows() {
        let m = DMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 4.0, 0.0, 0.0]);
        assert_eq!(rank(&m, 1e-9).0, 1);
    }
}
