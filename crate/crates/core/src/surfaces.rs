//! Graph surfaces `Γ(u) = (u, Φ(u))` with polynomial `Φ`, their jets, the
//! curvature hypotheses and the parabolic rescaling `Γ_w^h`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Polynomial;
use crate::rng::Stream;

const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceKind {
    /// `Φ(u,v) = (u² − v², 2uv)`, the square map `ω ↦ ω²`.
    GammaCirc,
    /// `Φ(u,v) = (u², v²)`.
    GammaOne,
    Polynomial,
    /// Output of [`rescale`].
    Composed { base: Box<SurfaceKind>, w: Vec<f64>, h: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    kind: SurfaceKind,
    phi: Vec<Polynomial>,
    domain: Vec<(f64, f64)>,
    d1: Vec<Vec<Polynomial>>,
    d2: Vec<Vec<Vec<Polynomial>>>,
    third_bound: f64,
}

#[derive(Clone, Debug)]
pub struct Jet {
    /// `Γ(z)` in `R^{2n}`.
    pub value: Vec<f64>,
    /// `J[i][j] = ∂_j φ_i`.
    pub jacobian: DMatrix<f64>,
    pub hessians: Vec<DMatrix<f64>>,
    pub third_order_bound: f64,
}

#[derive(Clone, Debug)]
pub struct RescaleMap {
    pub w: Vec<f64>,
    pub h: f64,
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct CurvatureMargin {
    /// Minimum of `|det Σ θ_i H_i|` over the sampled directions.
    pub sampled: f64,
    pub sampled_witness: Vec<f64>,
    /// Exact minimum over the circle, available for `n = 2`.
    pub exact: Option<f64>,
    pub exact_witness: Option<Vec<f64>>,
}

impl SurfaceSpec {
    pub fn gamma_circ() -> Self {
        let phi1 = &Polynomial::monomial(1.0, &[2, 0]) - &Polynomial::monomial(1.0, &[0, 2]);
        let phi2 = Polynomial::monomial(2.0, &[1, 1]);
        Self::build(SurfaceKind::GammaCirc, vec![phi1, phi2], vec![(-1.0, 1.0); 2])
    }

    pub fn gamma_one() -> Self {
        let phi1 = Polynomial::monomial(1.0, &[2, 0]);
        let phi2 = Polynomial::monomial(1.0, &[0, 2]);
        Self::build(SurfaceKind::GammaOne, vec![phi1, phi2], vec![(-1.0, 1.0); 2])
    }

    /// A polynomial graph over `[-1,1]^n`, one component per variable.
    pub fn polynomial(phi: Vec<Polynomial>) -> Result<Self> {
        let n = phi.len();
        if n < 2 {
            return Err(Error::invalid("a surface needs n >= 2 components"));
        }
        if phi.iter().any(|p| p.nvars() != n) {
            return Err(Error::invalid("every component must be a polynomial in n variables"));
        }
        Ok(Self::build(SurfaceKind::Polynomial, phi, vec![(-1.0, 1.0); n]))
    }

    pub fn with_domain(self, domain: Vec<(f64, f64)>) -> Result<Self> {
        if domain.len() != self.dim() || domain.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::invalid("domain must be a nondegenerate box of dimension n"));
        }
        Ok(Self::build(self.kind, self.phi, domain))
    }

    fn build(kind: SurfaceKind, phi: Vec<Polynomial>, domain: Vec<(f64, f64)>) -> Self {
        let n = phi.len();
        let d1: Vec<Vec<Polynomial>> = phi
            .iter()
            .map(|p| (0..n).map(|j| p.partial(j)).collect())
            .collect();
        let d2: Vec<Vec<Vec<Polynomial>>> = d1
            .iter()
            .map(|row| row.iter().map(|pj| (0..n).map(|k| pj.partial(k)).collect()).collect())
            .collect();
        let mut third_bound: f64 = 0.0;
        for p in &phi {
            for alpha in Polynomial::multi_indices(n, 3) {
                third_bound = third_bound.max(p.derivative(&alpha).abs_bound(&domain));
            }
        }
        SurfaceSpec {
            kind,
            phi,
            domain,
            d1,
            d2,
            third_bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn phi(&self) -> &[Polynomial] {
        &self.phi
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn degree(&self) -> u32 {
        self.phi.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn in_domain(&self, z: &[f64]) -> bool {
        z.len() == self.dim()
            && z.iter()
                .zip(&self.domain)
                .all(|(&x, &(lo, hi))| x >= lo - DOMAIN_SLACK && x <= hi + DOMAIN_SLACK)
    }

    fn check(&self, z: &[f64]) -> Result<()> {
        if self.in_domain(z) {
            Ok(())
        } else {
            Err(Error::Domain)
        }
    }

    /// `Φ(z)` without a domain check (the polynomial extends to all of `R^n`).
    pub fn phi_at(&self, z: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.phi) {
            *o = p.eval(z);
        }
    }

    /// `Γ(z)` without a domain check.
    pub fn gamma_at(&self, z: &[f64], out: &mut [f64]) {
        let n = self.dim();
        out[..n].copy_from_slice(z);
        self.phi_at(z, &mut out[n..2 * n]);
    }

    pub fn gamma(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.dim()];
        self.gamma_at(z, &mut out);
        out
    }

    pub fn jacobian_at(&self, z: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.d1[i][j].eval(z))
    }

    pub fn hessians_at(&self, z: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| DMatrix::from_fn(n, n, |j, k| self.d2[i][j][k].eval(z)))
            .collect()
    }

    /// `Σ_i c_i ∇²φ_i(z)`.
    pub fn weighted_hessian(&self, z: &[f64], c: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |j, k| {
            (0..n).map(|i| c[i] * self.d2[i][j][k].eval(z)).sum()
        })
    }

    pub fn third_order_bound(&self) -> f64 {
        self.third_bound
    }

    /// Supremum of the operator norm of `J_Φ^T` over a grid of the domain
    /// (corners included). This is the constant `c_*` of the frequency annulus.
    pub fn c_star(&self, grid: usize) -> f64 {
        let n = self.dim();
        let g = grid.max(2);
        let total = g.pow(n as u32);
        let mut best: f64 = 0.0;
        let mut z = vec![0.0; n];
        for k in 0..total {
            let mut idx = k;
            for (i, zi) in z.iter_mut().enumerate() {
                let (lo, hi) = self.domain[i];
                *zi = lo + (hi - lo) * (idx % g) as f64 / (g - 1) as f64;
                idx /= g;
            }
            let s = linalg::singular_values(&self.jacobian_at(&z));
            best = best.max(s[0]);
        }
        best
    }
}

pub fn jet(spec: &SurfaceSpec, z: &[f64]) -> Result<Jet> {
    spec.check(z)?;
    Ok(Jet {
        value: spec.gamma(z),
        jacobian: spec.jacobian_at(z),
        hessians: spec.hessians_at(z),
        third_order_bound: spec.third_order_bound(),
    })
}

/// Jet from central differences of `Φ` alone, used to cross-check [`jet`].
pub fn jet_fd(spec: &SurfaceSpec, z: &[f64], step: f64) -> Result<Jet> {
    spec.check(z)?;
    let n = spec.dim();
    let f = |p: &[f64]| -> Vec<f64> {
        let mut o = vec![0.0; n];
        spec.phi_at(p, &mut o);
        o
    };
    let shifted = |d: &[(usize, f64)]| -> Vec<f64> {
        let mut p = z.to_vec();
        for &(i, s) in d {
            p[i] += s;
        }
        f(&p)
    };
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let fp = shifted(&[(j, step)]);
        let fm = shifted(&[(j, -step)]);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    let mut hessians = vec![DMatrix::zeros(n, n); n];
    let f0 = f(z);
    for j in 0..n {
        for k in j..n {
            let vals: Vec<f64> = if j == k {
                let fp = shifted(&[(j, step)]);
                let fm = shifted(&[(j, -step)]);
                (0..n).map(|i| (fp[i] - 2.0 * f0[i] + fm[i]) / (step * step)).collect()
            } else {
                let pp = shifted(&[(j, step), (k, step)]);
                let pm = shifted(&[(j, step), (k, -step)]);
                let mp = shifted(&[(j, -step), (k, step)]);
                let mm = shifted(&[(j, -step), (k, -step)]);
                (0..n)
                    .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * step * step))
                    .collect()
            };
            for i in 0..n {
                hessians[i][(j, k)] = vals[i];
                hessians[i][(k, j)] = vals[i];
            }
        }
    }
    Ok(Jet {
        value: spec.gamma(z),
        jacobian: jac,
        hessians,
        third_order_bound: spec.third_order_bound(),
    })
}

/// Rank of the `n × n(n+1)/2` matrix of second derivatives, and its smallest
/// singular value.
pub fn nondegeneracy_rank(spec: &SurfaceSpec, z: &[f64]) -> Result<(usize, f64)> {
    spec.check(z)?;
    Ok(linalg::rank(&second_derivative_matrix(spec, z), 1e-9))
}

pub fn second_derivative_matrix(spec: &SurfaceSpec, z: &[f64]) -> DMatrix<f64> {
    let n = spec.dim();
    let hs = spec.hessians_at(z);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    DMatrix::from_fn(n, pairs.len(), |i, c| hs[i][pairs[c]])
}

/// Minimum of `|det Σ θ_i ∇²φ_i(z)|` over unit `θ`.
pub fn curvature_margin(spec: &SurfaceSpec, z: &[f64], grid_m: usize) -> Result<CurvatureMargin> {
    spec.check(z)?;
    if grid_m < 64 {
        return Err(Error::invalid("curvature_margin needs at least 64 directions"));
    }
    let n = spec.dim();
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut consider = |theta: Vec<f64>| {
        let d = libm::fabs(spec.weighted_hessian(z, &theta).determinant());
        if d < best.0 {
            best = (d, theta);
        }
    };
    if n == 2 {
        for k in 0..grid_m {
            let s = core::f64::consts::TAU * k as f64 / grid_m as f64;
            consider(vec![libm::cos(s), libm::sin(s)]);
        }
    } else {
        let mut rng = Stream::new(0x5EED_C0DE, &[n as u64, grid_m as u64]);
        for _ in 0..grid_m {
            let mut t: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let nt = linalg::norm(&t);
            t.iter_mut().for_each(|x| *x /= nt);
            consider(t);
        }
    }
    let (exact, exact_witness) = if n == 2 {
        let (m, w) = exact_margin_2d(&spec.hessians_at(z));
        (Some(m), Some(w))
    } else {
        (None, None)
    };
    Ok(CurvatureMargin {
        sampled: best.0,
        sampled_witness: best.1,
        exact,
        exact_witness,
    })
}

/// For 2×2 Hessians `det(θ₁H₁ + θ₂H₂)` is a quadratic form `A + R cos(2s − φ)`
/// in the angle `s` of `θ`, so the minimum of its modulus is explicit.
fn exact_margin_2d(h: &[DMatrix<f64>]) -> (f64, Vec<f64>) {
    let (a1, b1, d1) = (h[0][(0, 0)], h[0][(0, 1)], h[0][(1, 1)]);
    let (a2, b2, d2) = (h[1][(0, 0)], h[1][(0, 1)], h[1][(1, 1)]);
    let q11 = a1 * d1 - b1 * b1;
    let q22 = a2 * d2 - b2 * b2;
    let q12 = 0.5 * (a1 * d2 + a2 * d1 - 2.0 * b1 * b2);
    let mean = 0.5 * (q11 + q22);
    let half = 0.5 * (q11 - q22);
    let r = libm::hypot(half, q12);
    let ph = libm::atan2(q12, half);
    let s = if libm::fabs(mean) <= r && r > 0.0 {
        0.5 * (ph - libm::acos(-mean / r))
    } else if mean > 0.0 {
        0.5 * (ph + core::f64::consts::PI)
    } else {
        0.5 * ph
    };
    let s = s.rem_euclid(core::f64::consts::PI);
    let margin = if libm::fabs(mean) <= r { 0.0 } else { libm::fabs(mean) - r };
    (margin, vec![libm::cos(s), libm::sin(s)])
}

/// `|∂_u φ₁ − ∂_v φ₂| + |∂_v φ₁ + ∂_u φ₂|`.
pub fn cauchy_riemann_residual(spec: &SurfaceSpec, z: &[f64]) -> Result<f64> {
    if spec.dim() != 2 {
        return Err(Error::Unsupported("Cauchy-Riemann residual is defined for n = 2"));
    }
    spec.check(z)?;
    let j = spec.jacobian_at(z);
    Ok(libm::fabs(j[(0, 0)] - j[(1, 1)]) + libm::fabs(j[(0, 1)] + j[(1, 0)]))
}

/// The normalized surface `Γ_w^h(z) = (M_w^h)^{-1}(Γ(hz + w) − Γ(w))` on `[-1,1]²`.
///
/// `M_w^h` is block lower triangular: `h·I` on the top left, `h·J_Φ(w)` on the
/// bottom left and `(h²/2)[[a, −b], [b, a]]` on the bottom right with
/// `a = ∂²_u φ₁(w)`, `b = ∂²_u φ₂(w)`. The factor ½ is what makes `Γ∘` a fixed
/// point and gives `det M = h⁶` for the model.
pub fn rescale(spec: &SurfaceSpec, w: &[f64], h: f64) -> Result<(SurfaceSpec, RescaleMap)> {
    if spec.dim() != 2 {
        return Err(Error::Unsupported("rescale is defined for n = 2"));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::invalid("scale h must lie in (0, 1]"));
    }
    spec.check(w)?;
    for &(zu, zv) in &[(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
        if !spec.in_domain(&[w[0] + h * zu, w[1] + h * zv]) {
            return Err(Error::Domain);
        }
    }
    if cauchy_riemann_residual(spec, w)? > 1e-8 {
        return Err(Error::Degenerate("rescale needs the Cauchy-Riemann structure at w"));
    }
    let hs = spec.hessians_at(w);
    let a = hs[0][(0, 0)];
    let b = hs[1][(0, 0)];
    if a == 0.0 && b == 0.0 {
        return Err(Error::Degenerate("both second u-derivatives vanish at w"));
    }
    let jw = spec.jacobian_at(w);
    let c = DMatrix::from_row_slice(2, 2, &[a, -b, b, a]) * (0.5 * h * h);
    let cinv = c.clone().try_inverse().ok_or(Error::Degenerate("singular curvature block"))?;
    let bmat = &jw * h;

    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = h;
    m[(1, 1)] = h;
    m.view_mut((2, 0), (2, 2)).copy_from(&bmat);
    m.view_mut((2, 2), (2, 2)).copy_from(&c);
    let mut inv = DMatrix::zeros(4, 4);
    inv[(0, 0)] = 1.0 / h;
    inv[(1, 1)] = 1.0 / h;
    let low = -(&cinv * &bmat) / h;
    inv.view_mut((2, 0), (2, 2)).copy_from(&low);
    inv.view_mut((2, 2), (2, 2)).copy_from(&cinv);

    // φ'_i = Σ_j (C⁻¹)_ij (φ_j(hz + w) − φ_j(w) − h ∇φ_j(w)·z)
    let phi0: Vec<f64> = spec.phi.iter().map(|p| p.eval(w)).collect();
    let shifted: Vec<Polynomial> = (0..2)
        .map(|j| {
            let mut p = &spec.phi[j].compose_affine(h, w) - &Polynomial::constant(2, phi0[j]);
            for k in 0..2 {
                p = &p - &Polynomial::var(2, k).scale(bmat[(j, k)]);
            }
            p
        })
        .collect();
    let new_phi: Vec<Polynomial> = (0..2)
        .map(|i| &shifted[0].scale(cinv[(i, 0)]) + &shifted[1].scale(cinv[(i, 1)]))
        .collect();
    let kind = SurfaceKind::Composed {
        base: Box::new(spec.kind.clone()),
        w: w.to_vec(),
        h,
    };
    let out = SurfaceSpec::build(kind, new_phi, vec![(-1.0, 1.0); 2]);
    Ok((
        out,
        RescaleMap {
            w: w.to_vec(),
            h,
            matrix: m,
            inverse: inv,
        },
    ))
}

/// `max over a 64×64 grid of Σ_{|α|≤m} |∂^α(Φ − Φ∘)|`.
pub fn model_distance(spec: &SurfaceSpec, m: u32) -> Result<f64> {
    if spec.dim() != 2 {
        return Err(Error::Unsupported("model distance is defined for n = 2"));
    }
    if m > 4 {
        return Err(Error::invalid("model distance is truncated at order 4"));
    }
    let model = SurfaceSpec::gamma_circ();
    let mut derivs = Vec::new();
    for i in 0..2 {
        let diff = &spec.phi[i] - &model.phi[i];
        for k in 0..=m {
            for alpha in Polynomial::multi_indices(2, k) {
                let d = diff.derivative(&alpha);
                if !d.is_zero() {
                    derivs.push(d);
                }
            }
        }
    }
    let g = 64;
    let mut best: f64 = 0.0;
    for a in 0..g {
        for b in 0..g {
            let z = [
                grid_point(spec.domain[0], a, g),
                grid_point(spec.domain[1], b, g),
            ];
            let s: f64 = derivs.iter().map(|d| libm::fabs(d.eval(&z))).sum();
            best = best.max(s);
        }
    }
    Ok(best)
}

fn grid_point((lo, hi): (f64, f64), k: usize, g: usize) -> f64 {
    lo + (hi - lo) * k as f64 / (g - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol
    }

    #[test]
    fn model_jets_at_origin() {
        let j = jet(&SurfaceSpec::gamma_circ(), &[0.0, 0.0]).unwrap();
        assert_eq!(j.value, vec![0.0; 4]);
        assert_eq!(j.jacobian, DMatrix::zeros(2, 2));
        assert_eq!(j.hessians[0], DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -2.0]));
        assert_eq!(j.hessians[1], DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]));
    }

    #[test]
    fn gamma_circ_jacobian_at_one_one() {
        let j = jet(&SurfaceSpec::gamma_circ(), &[1.0, 1.0]).unwrap();
        assert_eq!(j.jacobian, DMatrix::from_row_slice(2, 2, &[2.0, -2.0, 2.0, 2.0]));
    }

    #[test]
    fn gamma_one_hessians() {
        let j = jet(&SurfaceSpec::gamma_one(), &[1.0, 0.0]).unwrap();
        assert_eq!(j.hessians[0], DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]));
        assert_eq!(j.hessians[1], DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert_eq!(jet(&SurfaceSpec::gamma_circ(), &[1.5, 0.0]).unwrap_err(), Error::Domain);
    }

    #[test]
    fn ranks() {
        assert_eq!(nondegeneracy_rank(&SurfaceSpec::gamma_circ(), &[0.3, -0.2]).unwrap().0, 2);
        assert_eq!(nondegeneracy_rank(&SurfaceSpec::gamma_one(), &[0.3, -0.2]).unwrap().0, 2);
        let degen = SurfaceSpec::polynomial(vec![
            Polynomial::monomial(1.0, &[2, 0]),
            Polynomial::monomial(2.0, &[2, 0]),
        ])
        .unwrap();
        assert_eq!(nondegeneracy_rank(&degen, &[0.0, 0.0]).unwrap().0, 1);
    }

    #[test]
    fn curvature_margins() {
        let m = curvature_margin(&SurfaceSpec::gamma_circ(), &[0.2, 0.4], 4096).unwrap();
        assert!(close(m.sampled, 4.0, 1e-12));
        assert!(close(m.exact.unwrap(), 4.0, 1e-12));

        let m1 = curvature_margin(&SurfaceSpec::gamma_one(), &[0.0, 0.0], 4096).unwrap();
        assert_eq!(m1.sampled, 0.0);
        assert_eq!(m1.sampled_witness, vec![1.0, 0.0]);
        assert!(close(m1.exact.unwrap(), 0.0, 1e-15));
        let w = m1.exact_witness.unwrap();
        assert!(close(w[0], 1.0, 1e-12) && close(w[1], 0.0, 1e-12));
    }

    #[test]
    fn perturbed_model_keeps_positive_margin() {
        let phi1 = &(&Polynomial::monomial(1.0, &[2, 0]) - &Polynomial::monomial(1.0, &[0, 2]))
            + &Polynomial::monomial(1.0, &[1, 1]);
        let spec = SurfaceSpec::polynomial(vec![phi1, Polynomial::monomial(2.0, &[1, 1])]).unwrap();
        let m = curvature_margin(&spec, &[0.0, 0.0], 4096).unwrap();
        // Dense sweep oracle, independent of the closed form.
        let mut dense = f64::INFINITY;
        for k in 0..100_000 {
            let s = core::f64::consts::TAU * k as f64 / 100_000.0;
            let (c, si) = (libm::cos(s), libm::sin(s));
            // θ₁H₁ + θ₂H₂ with H₁ = [[2,1],[1,−2]], H₂ = [[0,2],[2,0]].
            let (a, b, d) = (2.0 * c, c + 2.0 * si, -2.0 * c);
            dense = dense.min(libm::fabs(a * d - b * b));
        }
        assert!(m.exact.unwrap() > 0.0);
        assert!(close(m.exact.unwrap(), dense, 1e-6));
        assert!(m.sampled >= m.exact.unwrap() - 1e-12);
    }

    #[test]
    fn cauchy_riemann() {
        let g1 = SurfaceSpec::gamma_one();
        assert_eq!(cauchy_riemann_residual(&SurfaceSpec::gamma_circ(), &[0.3, 0.9]).unwrap(), 0.0);
        assert_eq!(cauchy_riemann_residual(&g1, &[1.0, 0.0]).unwrap(), 2.0);
        for t in [-1.0, -0.25, 0.0, 0.5] {
            assert_eq!(cauchy_riemann_residual(&g1, &[t, t]).unwrap(), 0.0);
        }
    }

    #[test]
    fn rescale_fixes_the_model() {
        let g = SurfaceSpec::gamma_circ();
        let (r, map) = rescale(&g, &[0.0, 0.0], 0.25).unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.25, 0.0, 0.0, 0.0, //
                0.0, 0.25, 0.0, 0.0, //
                0.0, 0.0, 0.0625, 0.0, //
                0.0, 0.0, 0.0, 0.0625,
            ],
        );
        assert_eq!(map.matrix, expect);
        assert!(close(map.matrix.determinant(), 0.25f64.powi(6), 1e-18));
        for z in [[0.3, -0.7], [1.0, 1.0], [-0.5, 0.2]] {
            let a = r.gamma(&z);
            let b = g.gamma(&z);
            for k in 0..4 {
                assert!(close(a[k], b[k], 1e-12));
            }
        }
        let (_, map2) = rescale(&g, &[0.3, -0.4], 0.5).unwrap();
        let id = &map2.matrix * &map2.inverse;
        assert!((id - DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-12);
    }

    #[test]
    fn rescale_rejects_non_holomorphic_and_out_of_range() {
        let cubic = SurfaceSpec::polynomial(vec![
            &(&Polynomial::monomial(1.0, &[2, 0]) - &Polynomial::monomial(1.0, &[0, 2]))
                + &Polynomial::monomial(1.0, &[3, 0]),
            Polynomial::monomial(2.0, &[1, 1]),
        ])
        .unwrap();
        assert!(matches!(rescale(&cubic, &[0.5, 0.5], 0.25), Err(Error::Degenerate(_))));
        let g = SurfaceSpec::gamma_circ();
        assert_eq!(rescale(&g, &[0.9, 0.0], 0.5).unwrap_err(), Error::Domain);
        assert!(rescale(&SurfaceSpec::gamma_one(), &[0.5, 0.2], 0.1).is_err());
    }

    #[test]
    fn model_distances() {
        assert_eq!(model_distance(&SurfaceSpec::gamma_circ(), 4).unwrap(), 0.0);
        let eps = 0.01;
        let cubic = SurfaceSpec::polynomial(vec![
            &(&Polynomial::monomial(1.0, &[2, 0]) - &Polynomial::monomial(1.0, &[0, 2]))
                + &Polynomial::monomial(eps, &[3, 0]),
            Polynomial::monomial(2.0, &[1, 1]),
        ])
        .unwrap();
        // At u = 1 the derivatives of εu³ up to order 3 sum to ε(1 + 3 + 6 + 6).
        assert!(close(model_distance(&cubic, 3).unwrap(), 0.16, 1e-12));
        assert!(model_distance(&SurfaceSpec::gamma_one(), 4).unwrap() >= 1.0);
    }

    #[test]
    fn c_star_of_model() {
        assert!(close(SurfaceSpec::gamma_circ().c_star(17), 2.0 * core::f64::consts::SQRT_2, 1e-12));
    }
}
