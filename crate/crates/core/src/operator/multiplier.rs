//! The multiplier `m(ξ) = ∫ e^{−iΓ(z)·ξ} φ(z) dz` for `n = 2` by adaptive
//! tensor Gauss-Legendre quadrature.
//!
//! The support box of `φ` is split into quad-tree panels until the phase
//! varies by at most `max_phase` radians across each panel. Every panel is
//! integrated with a main rule and, optionally, a lower-order check rule whose
//! discrepancy serves as the error estimate.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::phase;
use crate::quad::GaussLegendre;
use crate::rng::Stream;
use crate::stats::{fit_line, pairwise_sum, LineFit};
use crate::surfaces::SurfaceSpec;

use super::cutoff::CutoffSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadSettings {
    pub order: usize,
    pub check_order: Option<usize>,
    pub max_panel: f64,
    /// Upper bound on the phase variation across one panel, in radians.
    pub max_phase: f64,
    pub max_depth: u32,
    /// Relative accuracy target used for the `converged` flag.
    pub rel_tol: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            order: 40,
            check_order: Some(32),
            max_panel: 0.125,
            max_phase: 24.0 * core::f64::consts::PI,
            max_depth: 24,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplierValue {
    pub value: Complex64,
    /// Summed discrepancy between the main and the check rule.
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

/// `P(z) = Γ(z)·ξ` as a dense table `c[a][b]` of `u^a v^b` coefficients.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    deg: usize,
    c: Vec<f64>,
}

impl PhaseTable {
    pub fn new(spec: &SurfaceSpec, xi: &[f64]) -> Result<Self> {
        if spec.dim() != 2 || xi.len() != 4 {
            return Err(Error::Unsupported("the multiplier quadrature is two-dimensional"));
        }
        let deg = spec.degree().max(1) as usize;
        let mut c = vec![0.0; (deg + 1) * (deg + 1)];
        c[deg + 1] += xi[0];
        c[1] += xi[1];
        for (k, p) in spec.phi().iter().enumerate() {
            for (e, coef) in p.terms() {
                c[e[0] as usize * (deg + 1) + e[1] as usize] += xi[2 + k] * coef;
            }
        }
        Ok(PhaseTable { deg, c })
    }

    fn at(&self, a: usize, b: usize) -> f64 {
        self.c[a * (self.deg + 1) + b]
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let d = self.deg;
        let mut acc = 0.0;
        for a in (0..=d).rev() {
            let mut row = 0.0;
            for b in (0..=d - a).rev() {
                row = row * v + self.at(a, b);
            }
            acc = acc * u + row;
        }
        acc
    }

    /// `(∂_u P, ∂_v P, ‖∇²P‖_F)` at a point.
    fn derivs(&self, u: f64, v: f64) -> (f64, f64, f64) {
        let d = self.deg;
        let (mut pu, mut pv, mut puu, mut puv, mut pvv) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let pw = |x: f64, k: usize| if k == 0 { 1.0 } else { libm::pow(x, k as f64) };
        for a in 0..=d {
            for b in 0..=d - a {
                let c = self.at(a, b);
                if c == 0.0 {
                    continue;
                }
                let (fa, fb) = (a as f64, b as f64);
                if a >= 1 {
                    pu += c * fa * pw(u, a - 1) * pw(v, b);
                }
                if b >= 1 {
                    pv += c * fb * pw(u, a) * pw(v, b - 1);
                }
                if a >= 2 {
                    puu += c * fa * (fa - 1.0) * pw(u, a - 2) * pw(v, b);
                }
                if b >= 2 {
                    pvv += c * fb * (fb - 1.0) * pw(u, a) * pw(v, b - 2);
                }
                if a >= 1 && b >= 1 {
                    puv += c * fa * fb * pw(u, a - 1) * pw(v, b - 1);
                }
            }
        }
        (pu, pv, libm::sqrt(puu * puu + 2.0 * puv * puv + pvv * pvv))
    }

    /// Upper estimate of the phase variation over a panel.
    fn variation(&self, p: &Panel) -> f64 {
        let cu = 0.5 * (p.lo[0] + p.hi[0]);
        let cv = 0.5 * (p.lo[1] + p.hi[1]);
        let half_diag = 0.5 * libm::hypot(p.hi[0] - p.lo[0], p.hi[1] - p.lo[1]);
        let (gu, gv, h0) = self.derivs(cu, cv);
        let mut hmax = h0;
        for (u, v) in [(p.lo[0], p.lo[1]), (p.lo[0], p.hi[1]), (p.hi[0], p.lo[1]), (p.hi[0], p.hi[1])] {
            hmax = hmax.max(self.derivs(u, v).2);
        }
        let grad = libm::hypot(gu, gv) + half_diag * hmax;
        2.0 * half_diag * grad
    }

    /// Coefficients of `v ↦ P(u, v)`.
    fn row(&self, u: f64, out: &mut [f64]) {
        let d = self.deg;
        for (b, o) in out.iter_mut().enumerate().take(d + 1) {
            let mut acc = 0.0;
            for a in (0..=d - b).rev() {
                acc = acc * u + self.at(a, b);
            }
            *o = acc;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// `∫ e^{−iP} φ`.
    Value,
    /// `∫ (−iP) e^{−iP} φ`, which is `t ∂_t m(tξ)` when `P` is built from `tξ`.
    TimeWeighted,
}

#[derive(Clone, Debug)]
pub struct Quadrature {
    pub settings: QuadSettings,
    main: GaussLegendre,
    check: Option<GaussLegendre>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(QuadSettings::default())
    }
}

impl Quadrature {
    pub fn new(settings: QuadSettings) -> Self {
        let main = GaussLegendre::new(settings.order);
        let check = settings.check_order.map(GaussLegendre::new);
        Quadrature {
            settings,
            main,
            check,
        }
    }

    /// Leaf panels in a fixed depth-first order, and whether every leaf met
    /// the phase criterion before the depth limit.
    pub fn panels(&self, table: &PhaseTable, phi: &CutoffSpec) -> (Vec<Panel>, bool) {
        let sb = phi.support_box();
        let root = Panel {
            lo: [sb[0].0, sb[1].0],
            hi: [sb[0].1, sb[1].1],
        };
        let mut out = Vec::new();
        let mut ok = true;
        let mut stack = vec![(root, 0u32)];
        while let Some((p, depth)) = stack.pop() {
            if phi.vanishes_on(&p.lo, &p.hi) {
                continue;
            }
            let side = (p.hi[0] - p.lo[0]).max(p.hi[1] - p.lo[1]);
            let fine = side <= self.settings.max_panel && table.variation(&p) <= self.settings.max_phase;
            if fine || depth >= self.settings.max_depth {
                ok &= fine;
                out.push(p);
                continue;
            }
            let mu = 0.5 * (p.lo[0] + p.hi[0]);
            let mv = 0.5 * (p.lo[1] + p.hi[1]);
            let kids = [
                Panel { lo: [p.lo[0], p.lo[1]], hi: [mu, mv] },
                Panel { lo: [mu, p.lo[1]], hi: [p.hi[0], mv] },
                Panel { lo: [p.lo[0], mv], hi: [mu, p.hi[1]] },
                Panel { lo: [mu, mv], hi: [p.hi[0], p.hi[1]] },
            ];
            for k in kids.iter().rev() {
                stack.push((*k, depth + 1));
            }
        }
        (out, ok)
    }

    fn rule_on(
        rule: &GaussLegendre,
        table: &PhaseTable,
        phi: &CutoffSpec,
        p: &Panel,
        channel: Channel,
    ) -> Complex64 {
        let (mut us, mut wu) = (Vec::new(), Vec::new());
        let (mut vs, mut wv) = (Vec::new(), Vec::new());
        rule.mapped(p.lo[0], p.hi[0], &mut us, &mut wu);
        rule.mapped(p.lo[1], p.hi[1], &mut vs, &mut wv);
        let mut row = [0.0; 16];
        let deg = table.deg.min(15);
        let (mut re, mut im) = (0.0, 0.0);
        for (u, w1) in us.iter().zip(&wu) {
            table.row(*u, &mut row);
            let (mut rr, mut ri) = (0.0, 0.0);
            for (v, w2) in vs.iter().zip(&wv) {
                let f = phi.eval(&[*u, *v]);
                if f == 0.0 {
                    continue;
                }
                let mut ph = 0.0;
                for b in (0..=deg).rev() {
                    ph = ph * v + row[b];
                }
                let (s, c) = libm::sincos(ph);
                let a = w2 * f;
                match channel {
                    Channel::Value => {
                        rr += a * c;
                        ri -= a * s;
                    }
                    Channel::TimeWeighted => {
                        // (−iP)(cos P − i sin P) = −P sin P − iP cos P
                        rr -= a * ph * s;
                        ri -= a * ph * c;
                    }
                }
            }
            re += w1 * rr;
            im += w1 * ri;
        }
        Complex64::new(re, im)
    }

    /// Main-rule value on one panel and the absolute discrepancy to the check rule.
    pub fn integrate_panel(
        &self,
        table: &PhaseTable,
        phi: &CutoffSpec,
        p: &Panel,
        channel: Channel,
    ) -> (Complex64, f64) {
        let v = Self::rule_on(&self.main, table, phi, p, channel);
        let e = match &self.check {
            Some(r) => (v - Self::rule_on(r, table, phi, p, channel)).norm(),
            None => 0.0,
        };
        (v, e)
    }

    /// Order-fixed combination of per-panel results.
    pub fn combine(&self, parts: &[(Complex64, f64)], all_fine: bool) -> MultiplierValue {
        let re: Vec<f64> = parts.iter().map(|p| p.0.re).collect();
        let im: Vec<f64> = parts.iter().map(|p| p.0.im).collect();
        let err: Vec<f64> = parts.iter().map(|p| p.1).collect();
        let value = Complex64::new(pairwise_sum(&re), pairwise_sum(&im));
        let error = pairwise_sum(&err);
        let scale = value.norm().max(f64::MIN_POSITIVE);
        MultiplierValue {
            value,
            error,
            panels: parts.len(),
            converged: all_fine && error <= self.settings.rel_tol * scale,
        }
    }

    pub fn evaluate(
        &self,
        spec: &SurfaceSpec,
        phi: &CutoffSpec,
        xi: &[f64],
        channel: Channel,
    ) -> Result<MultiplierValue> {
        if phi.dim() != 2 {
            return Err(Error::Unsupported("the multiplier quadrature is two-dimensional"));
        }
        let table = PhaseTable::new(spec, xi)?;
        let (panels, fine) = self.panels(&table, phi);
        let parts: Vec<(Complex64, f64)> = panels
            .iter()
            .map(|p| self.integrate_panel(&table, phi, p, channel))
            .collect();
        Ok(self.combine(&parts, fine))
    }
}

pub fn multiplier(spec: &SurfaceSpec, phi: &CutoffSpec, xi: &[f64]) -> Result<MultiplierValue> {
    Quadrature::default().evaluate(spec, phi, xi, Channel::Value)
}

/// Plain Monte-Carlo estimate of the multiplier with its standard error, as a
/// cross-check of the quadrature.
pub fn multiplier_mc(
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    xi: &[f64],
    samples: usize,
    seed: u64,
) -> Result<(Complex64, f64)> {
    if spec.dim() != 2 || phi.dim() != 2 {
        return Err(Error::Unsupported("the multiplier cross-check is two-dimensional"));
    }
    let sb = phi.support_box();
    let area = (sb[0].1 - sb[0].0) * (sb[1].1 - sb[1].0);
    let mut rng = Stream::new(seed, &[0x4D43]);
    let mut g = [0.0; 4];
    let (mut re, mut im) = (Vec::with_capacity(samples), Vec::with_capacity(samples));
    for _ in 0..samples {
        let z = [rng.range(sb[0].0, sb[0].1), rng.range(sb[1].0, sb[1].1)];
        spec.gamma_at(&z, &mut g);
        let f = area * phi.eval(&z);
        let (s, c) = libm::sincos(linalg::dot(&g, xi));
        re.push(f * c);
        im.push(-f * s);
    }
    let (mr, er) = crate::stats::mean_stderr(&re);
    let (mi, ei) = crate::stats::mean_stderr(&im);
    Ok((Complex64::new(mr, mi), libm::hypot(er, ei)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayWarning {
    /// The direction has no nondegenerate stationary point inside `supp φ`.
    DegenerateDirection,
    /// Some quadrature did not reach the accuracy target.
    Accuracy,
}

#[derive(Clone, Debug)]
pub struct DecayFit {
    pub fit: LineFit,
    pub samples: Vec<(f64, MultiplierValue)>,
    pub warnings: Vec<DecayWarning>,
}

/// Least-squares slope of `log|m(λ·dir)|` against `log λ`.
pub fn decay_fit(
    quad: &Quadrature,
    spec: &SurfaceSpec,
    phi: &CutoffSpec,
    direction: &[f64],
    lambdas: &[f64],
) -> Result<DecayFit> {
    if lambdas.len() < 2 {
        return Err(Error::invalid("decay fit needs at least two scales"));
    }
    let nd = linalg::norm(direction);
    if nd == 0.0 {
        return Err(Error::invalid("direction must be nonzero"));
    }
    let dir: Vec<f64> = direction.iter().map(|x| x / nd).collect();
    let mut warnings = Vec::new();
    match phase::stationary_point(spec, &dir) {
        Ok(z) if phi.eval(&z) > 0.0 => {}
        _ => warnings.push(DecayWarning::DegenerateDirection),
    }
    let mut samples = Vec::new();
    for &l in lambdas {
        let xi: Vec<f64> = dir.iter().map(|d| d * l).collect();
        let v = quad.evaluate(spec, phi, &xi, Channel::Value)?;
        if !v.converged && !warnings.contains(&DecayWarning::Accuracy) {
            warnings.push(DecayWarning::Accuracy);
        }
        samples.push((l, v));
    }
    let x: Vec<f64> = samples.iter().map(|s| libm::log(s.0)).collect();
    let y: Vec<f64> = samples.iter().map(|s| libm::log(s.1.value.norm())).collect();
    Ok(DecayFit {
        fit: fit_line(&x, &y),
        samples,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_gives_the_integral() {
        let phi = CutoffSpec::default_bump(2);
        let m = multiplier(&SurfaceSpec::gamma_circ(), &phi, &[0.0; 4]).unwrap();
        assert!((m.value.re - phi.integral()).abs() < 1e-10);
        assert!(m.value.im.abs() < 1e-15);
    }

    #[test]
    fn reality_symmetry() {
        let phi = CutoffSpec::default_bump(2);
        let g = SurfaceSpec::gamma_circ();
        let xi = [3.0, -1.0, 7.0, 2.0];
        let neg = [-3.0, 1.0, -7.0, -2.0];
        let a = multiplier(&g, &phi, &xi).unwrap().value;
        let b = multiplier(&g, &phi, &neg).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn matches_monte_carlo() {
        let phi = CutoffSpec::default_bump(2);
        let g = SurfaceSpec::gamma_circ();
        let xi = [1.0, 2.0, 5.0, -3.0];
        let q = multiplier(&g, &phi, &xi).unwrap();
        assert!(q.converged);
        let (mc, se) = multiplier_mc(&g, &phi, &xi, 200_000, 11).unwrap();
        assert!((q.value - mc).norm() < 5.0 * se);
    }

    #[test]
    fn phase_table_matches_surface() {
        let g = SurfaceSpec::gamma_circ();
        let xi = [0.3, -1.2, 2.0, 0.7];
        let t = PhaseTable::new(&g, &xi).unwrap();
        let z = [0.4, -0.3];
        assert!((t.eval(z[0], z[1]) - linalg::dot(&g.gamma(&z), &xi)).abs() < 1e-15);
    }
}
