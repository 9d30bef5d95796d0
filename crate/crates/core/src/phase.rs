//! Stationary points, the phase `Ψ(ξ) = Γ(z(ξ))·ξ`, normal frames and the
//! transversality determinant of normal triples.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::surfaces::SurfaceSpec;

const MAX_NEWTON: usize = 50;
const NEWTON_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct PhasePoint {
    pub xi: Vec<f64>,
    pub z: Vec<f64>,
    pub psi: f64,
    /// `∇Ψ(ξ)`, equal to `Γ(z(ξ))`.
    pub grad: Vec<f64>,
    pub hessian: DMatrix<f64>,
    /// Singular values of the Hessian in decreasing order.
    pub hess_svals: Vec<f64>,
    /// Whether `z(ξ)` lies in the chart domain of the spec.
    pub in_domain: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFrame {
    pub n: [f64; 6],
    pub n_bar: [f64; 6],
}

#[derive(Clone, Copy, Debug)]
pub struct Transversality {
    pub det6: f64,
    pub cdet: f64,
    /// `∏_{j<k} |z_j − z_k|`.
    pub separation_product: f64,
}

fn split(spec: &SurfaceSpec, xi: &[f64]) -> Result<(usize, f64)> {
    let n = spec.dim();
    if xi.len() != 2 * n {
        return Err(Error::invalid("frequency must have 2n components"));
    }
    if xi[n..].iter().all(|&x| x == 0.0) {
        return Err(Error::SingularDirection);
    }
    Ok((n, linalg::norm(xi)))
}

/// `∇_z(Γ(z)·ξ) = ξ' + J_Φ(z)^T ξ''`.
fn stationarity(spec: &SurfaceSpec, xi: &[f64], z: &[f64]) -> DVector<f64> {
    let n = spec.dim();
    let j = spec.jacobian_at(z);
    let xi2 = DVector::from_column_slice(&xi[n..]);
    DVector::from_column_slice(&xi[..n]) + j.transpose() * xi2
}

/// Root of `ξ' + J_Φ(z)^T ξ'' = 0` by damped Newton.
///
/// The start point solves the system linearized at the origin, which is the
/// exact root when `Φ` is quadratic.
pub fn stationary_point(spec: &SurfaceSpec, xi: &[f64]) -> Result<Vec<f64>> {
    let (n, xnorm) = split(spec, xi)?;
    let origin = vec![0.0; n];
    let s0 = spec.weighted_hessian(&origin, &xi[n..]);
    let g0 = stationarity(spec, xi, &origin);
    let mut z: DVector<f64> = match s0.lu().solve(&(-&g0)) {
        Some(step) => step,
        None => DVector::zeros(n),
    };
    let tol = NEWTON_TOL * xnorm;
    let mut g = stationarity(spec, xi, z.as_slice());
    let mut gn = g.norm();
    for _ in 0..MAX_NEWTON {
        if gn <= 1e-3 * tol {
            break;
        }
        let s = spec.weighted_hessian(z.as_slice(), &xi[n..]);
        let Some(step) = s.lu().solve(&(-&g)) else {
            break;
        };
        let mut damp = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = &z + &step * damp;
            let gt = stationarity(spec, xi, trial.as_slice());
            let gtn = gt.norm();
            if gtn < gn {
                z = trial;
                g = gt;
                gn = gtn;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if gn <= tol {
        Ok(z.as_slice().to_vec())
    } else {
        Err(Error::Convergence {
            iterations: MAX_NEWTON,
            residual: gn,
        })
    }
}

/// Closed-form stationary point for `Γ∘`:
/// `z = −(ξ₁ξ₃ + ξ₂ξ₄, ξ₁ξ₄ − ξ₂ξ₃) / (2|ξ''|²)`.
pub fn gamma_circ_stationary_point(xi: &[f64]) -> [f64; 2] {
    let d = 2.0 * (xi[2] * xi[2] + xi[3] * xi[3]);
    [
        -(xi[0] * xi[2] + xi[1] * xi[3]) / d,
        -(xi[0] * xi[3] - xi[1] * xi[2]) / d,
    ]
}

pub fn phase(spec: &SurfaceSpec, xi: &[f64]) -> Result<PhasePoint> {
    let z = stationary_point(spec, xi)?;
    let grad = spec.gamma(&z);
    let psi = linalg::dot(&grad, xi);
    let hessian = phase_hessian_at(spec, xi, &z)?;
    let mut hess_svals: Vec<f64> = hessian
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|v| libm::fabs(*v))
        .collect();
    hess_svals.sort_by(|a, b| b.total_cmp(a));
    let in_domain = spec.in_domain(&z);
    Ok(PhasePoint {
        xi: xi.to_vec(),
        z,
        psi,
        grad,
        hessian,
        hess_svals,
        in_domain,
    })
}

/// `∇²Ψ = −DΓ S⁻¹ DΓ^T` with `DΓ = [I; J_Φ]` and `S = Σ ξ''_i ∇²φ_i`, from
/// differentiating `∇Ψ = Γ(z(ξ))` through the implicit function `z(ξ)`.
fn phase_hessian_at(spec: &SurfaceSpec, xi: &[f64], z: &[f64]) -> Result<DMatrix<f64>> {
    let n = spec.dim();
    let s = spec.weighted_hessian(z, &xi[n..]);
    let sinv = s
        .try_inverse()
        .ok_or(Error::Degenerate("phase Hessian: curvature matrix is singular"))?;
    let j = spec.jacobian_at(z);
    let mut dg = DMatrix::zeros(2 * n, n);
    dg.view_mut((0, 0), (n, n)).fill_with_identity();
    dg.view_mut((n, 0), (n, n)).copy_from(&j);
    let h = -(&dg * sinv * dg.transpose());
    Ok((&h + h.transpose()) * 0.5)
}

/// `Ψ(ξ)` alone.
pub fn psi(spec: &SurfaceSpec, xi: &[f64]) -> Result<f64> {
    let z = stationary_point(spec, xi)?;
    Ok(linalg::dot(&spec.gamma(&z), xi))
}

/// Central-difference Hessian of `Ψ`, an independent path for cross-checks.
pub fn phase_hessian_fd(spec: &SurfaceSpec, xi: &[f64], step: f64) -> Result<DMatrix<f64>> {
    let d = xi.len();
    let h = step * linalg::norm(xi);
    let eval = |shift: &[(usize, f64)]| -> Result<f64> {
        let mut x = xi.to_vec();
        for &(i, s) in shift {
            x[i] += s;
        }
        psi(spec, &x)
    };
    let mut m = DMatrix::zeros(d, d);
    let f0 = eval(&[])?;
    for i in 0..d {
        for k in i..d {
            let v = if i == k {
                (eval(&[(i, h)])? - 2.0 * f0 + eval(&[(i, -h)])?) / (h * h)
            } else {
                (eval(&[(i, h), (k, h)])? - eval(&[(i, h), (k, -h)])? - eval(&[(i, -h), (k, h)])?
                    + eval(&[(i, -h), (k, -h)])?)
                    / (4.0 * h * h)
            };
            m[(i, k)] = v;
            m[(k, i)] = v;
        }
    }
    Ok(m)
}

pub fn normal_frame_at(spec: &SurfaceSpec, z: &[f64]) -> Result<NormalFrame> {
    if spec.dim() != 2 {
        return Err(Error::Unsupported("normal frames are defined for n = 2"));
    }
    let mut phi = [0.0; 2];
    spec.phi_at(z, &mut phi);
    let (u, v) = (z[0], z[1]);
    Ok(NormalFrame {
        n: [u, v, phi[0], phi[1], -1.0, 0.0],
        n_bar: [-v, u, -phi[1], phi[0], 0.0, -1.0],
    })
}

pub fn normal_frame(spec: &SurfaceSpec, xi: &[f64]) -> Result<NormalFrame> {
    let z = stationary_point(spec, xi)?;
    normal_frame_at(spec, &z)
}

/// Both transversality determinants for three points of the surface.
///
/// `det6` is the real 6×6 determinant of `[n₁ n̄₁ n₂ n̄₂ n₃ n̄₃]`; each pair
/// `(n, n̄)` is the realification of the complex vector `(ω, Φ(ω), −1)`, so
/// `det6 = cdet²`.
pub fn transversality_volume(spec: &SurfaceSpec, zs: [&[f64]; 3]) -> Result<Transversality> {
    let frames: Vec<NormalFrame> = zs
        .iter()
        .map(|z| normal_frame_at(spec, z))
        .collect::<Result<_>>()?;
    let cols: Vec<Vec<f64>> = frames
        .iter()
        .flat_map(|f| [f.n.to_vec(), f.n_bar.to_vec()])
        .collect();
    let det6 = libm::fabs(linalg::from_columns(&cols).determinant());

    let c: Vec<[Complex64; 3]> = frames
        .iter()
        .map(|f| {
            [
                Complex64::new(f.n[0], f.n[1]),
                Complex64::new(f.n[2], f.n[3]),
                Complex64::new(-1.0, 0.0),
            ]
        })
        .collect();
    let det3 = c[0][0] * (c[1][1] * c[2][2] - c[2][1] * c[1][2])
        - c[1][0] * (c[0][1] * c[2][2] - c[2][1] * c[0][2])
        + c[2][0] * (c[0][1] * c[1][2] - c[1][1] * c[0][2]);
    let dist = |a: &[f64], b: &[f64]| libm::hypot(a[0] - b[0], a[1] - b[1]);
    Ok(Transversality {
        det6,
        cdet: det3.norm(),
        separation_product: dist(zs[0], zs[1]) * dist(zs[0], zs[2]) * dist(zs[1], zs[2]),
    })
}
