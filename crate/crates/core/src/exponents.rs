//! Exact rational exponent arithmetic on the `(1/p, 1/q)` square.
//!
//! An infinite exponent is stored as reciprocal `0`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::freqgeo::sets::Family;

pub type Q = Rational64;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExponentPoint {
    pub inv_p: Q,
    pub inv_q: Q,
}

impl ExponentPoint {
    pub fn new(inv_p: Q, inv_q: Q) -> Self {
        ExponentPoint { inv_p, inv_q }
    }

    pub fn ratio(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(q(a, b), q(c, d))
    }

    pub fn to_f64(self) -> (f64, f64) {
        (to_f64(self.inv_p), to_f64(self.inv_q))
    }
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `max{2/p − 5/q, −1 − 3/q + 3/p, −2 − 2/q + 4/p}`.
pub fn gamma_ls(pt: ExponentPoint) -> Q {
    let (x, y) = (pt.inv_p, pt.inv_q);
    let a = qi(2) * x - qi(5) * y;
    let b = -Q::one() - qi(3) * y + qi(3) * x;
    let c = -qi(2) - qi(2) * y + qi(4) * x;
    a.max(b).max(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    W0,
    W1,
    W2,
    Wn(u32),
}

/// Half-plane `a·(1/p) + b·(1/q) ≤ c`, strict when `strict`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub strict: bool,
}

impl Constraint {
    fn new(a: Q, b: Q, c: Q, strict: bool) -> Self {
        Constraint { a, b, c, strict }
    }

    fn lhs(&self, pt: ExponentPoint) -> Q {
        self.a * pt.inv_p + self.b * pt.inv_q
    }

    pub fn holds(&self, pt: ExponentPoint) -> bool {
        let l = self.lhs(pt);
        if self.strict {
            l < self.c
        } else {
            l <= self.c
        }
    }

    pub fn holds_closed(&self, pt: ExponentPoint) -> bool {
        self.lhs(pt) <= self.c
    }

    pub fn is_tight(&self, pt: ExponentPoint) -> bool {
        self.lhs(pt) == self.c
    }
}

pub fn constraints(region: Region) -> Result<Vec<Constraint>> {
    let (one, zero) = (Q::one(), Q::zero());
    let diag = Constraint::new(-one, one, zero, false);
    Ok(match region {
        Region::W0 => vec![
            diag,
            Constraint::new(one, -qi(2), zero, true),
            Constraint::new(qi(3), -qi(2), one, true),
            Constraint::new(qi(4), -one, qi(2), true),
        ],
        Region::W2 => vec![
            diag,
            Constraint::new(one, -qi(2), zero, true),
            Constraint::new(qi(3), -qi(2), one, true),
            Constraint::new(qi(4), -one, qi(2), false),
        ],
        Region::W1 => vec![
            diag,
            Constraint::new(one, -qi(2), zero, false),
            Constraint::new(qi(3), -one, one, false),
        ],
        Region::Wn(n) => {
            if n < 2 {
                return Err(Error::invalid("W_n needs n >= 2"));
            }
            let n = n as i64;
            vec![
                diag,
                Constraint::new(one, -qi(2), zero, false),
                Constraint::new(q(3 * n, 2), -q(3 * n - 2, 2), q(n, 2), false),
                Constraint::new(qi(2 * n), -qi(n - 1), qi(n), false),
            ]
        }
    })
}

/// Points explicitly removed from the region.
///
/// For `W_n` the closed hull itself contains its vertices; the three nonzero
/// vertices are listed here because only restricted weak type is known there.
pub fn exclusions(region: Region) -> Result<Vec<ExponentPoint>> {
    Ok(match region {
        Region::W2 => vec![ExponentPoint::ratio(3, 5, 2, 5), ExponentPoint::ratio(2, 3, 2, 3)],
        Region::Wn(n) => {
            let v = region_vertices(n)?;
            vec![v[1], v[2], v[3]]
        }
        _ => Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionTest {
    pub contains: bool,
    pub in_closure: bool,
    /// In the closure but removed by a strict edge or an exclusion point.
    pub excluded: bool,
    pub on_boundary: bool,
}

pub fn region_test(region: Region, pt: ExponentPoint) -> Result<RegionTest> {
    let cs = constraints(region)?;
    let in_closure = cs.iter().all(|c| c.holds_closed(pt));
    let mut contains = cs.iter().all(|c| c.holds(pt));
    if matches!(region, Region::W2) && exclusions(region)?.contains(&pt) {
        contains = false;
    }
    Ok(RegionTest {
        contains,
        in_closure,
        excluded: in_closure && !contains,
        on_boundary: in_closure && cs.iter().any(|c| c.is_tight(pt)),
    })
}

pub fn region_contains(region: Region, pt: ExponentPoint) -> Result<bool> {
    Ok(region_test(region, pt)?.contains)
}

/// Membership with the exclusion points removed, the set where strong type
/// bounds are asserted.
pub fn strong_type_contains(region: Region, pt: ExponentPoint) -> Result<bool> {
    Ok(region_contains(region, pt)? && !exclusions(region)?.contains(&pt))
}

/// `[O, P1, P2, P3]` of `W_n`.
pub fn region_vertices(n: u32) -> Result<[ExponentPoint; 4]> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Unsupported("vertices are defined for even n >= 2"));
    }
    let n = n as i64;
    Ok([
        ExponentPoint::new(Q::zero(), Q::zero()),
        ExponentPoint::ratio(2 * n, 3 * n + 2, n, 3 * n + 2),
        ExponentPoint::ratio(2 * n - 1, 3 * n - 1, n, 3 * n - 1),
        ExponentPoint::ratio(n, n + 1, n, n + 1),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexTag {
    RestrictedWeakOnly,
}

pub fn vertex_tag(n: u32, pt: ExponentPoint) -> Result<Option<VertexTag>> {
    let v = region_vertices(n)?;
    Ok(v[1..].contains(&pt).then_some(VertexTag::RestrictedWeakOnly))
}

/// Vertices of the closure of a region, in counterclockwise order.
pub fn closure_polygon(region: Region) -> Result<Vec<ExponentPoint>> {
    let cs = constraints(region)?;
    let mut pts: Vec<ExponentPoint> = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            let (a, b) = (cs[i], cs[j]);
            let det = a.a * b.b - a.b * b.a;
            if det.is_zero() {
                continue;
            }
            let x = (a.c * b.b - a.b * b.c) / det;
            let y = (a.a * b.c - a.c * b.a) / det;
            let p = ExponentPoint::new(x, y);
            if cs.iter().all(|c| c.holds_closed(p)) && !pts.contains(&p) {
                pts.push(p);
            }
        }
    }
    // Order by angle around the centroid, computed in floating point only for sorting.
    let k = pts.len() as f64;
    let cx = pts.iter().map(|p| to_f64(p.inv_p)).sum::<f64>() / k;
    let cy = pts.iter().map(|p| to_f64(p.inv_q)).sum::<f64>() / k;
    pts.sort_by(|p, r| {
        let ap = libm::atan2(to_f64(p.inv_q) - cy, to_f64(p.inv_p) - cx);
        let ar = libm::atan2(to_f64(r.inv_q) - cy, to_f64(r.inv_p) - cx);
        ap.total_cmp(&ar)
    });
    Ok(pts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Growth,
    Decay,
}

/// A dyadic-piece bound `‖M_λ‖_{p→q} ≲ λ^{±ε}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicBound {
    pub name: &'static str,
    pub inv_p: Q,
    pub inv_q: Q,
    pub eps: Q,
    pub sense: Sense,
    /// False when the exponent is zero, which rules the bound out of interpolation.
    pub eligible: bool,
}

impl DyadicBound {
    pub fn new(name: &'static str, inv_p: Q, inv_q: Q, eps: Q, sense: Sense) -> Self {
        DyadicBound {
            name,
            inv_p,
            inv_q,
            eps,
            sense,
            eligible: eps > Q::zero(),
        }
    }
}

pub fn dyadic_bounds(n: u32) -> Result<Vec<DyadicBound>> {
    if n < 2 {
        return Err(Error::invalid("dyadic bounds need n >= 2"));
    }
    let n = n as i64;
    let half = q(1, 2);
    Ok(vec![
        DyadicBound::new("M22", half, half, q(n - 1, 2), Sense::Decay),
        DyadicBound::new("Minf", Q::one(), Q::zero(), qi(n), Sense::Growth),
        DyadicBound::new("M11", Q::one(), Q::one(), Q::one(), Sense::Growth),
        DyadicBound::new(
            "Mstri",
            half,
            q(n, 2 * (n + 2)),
            q(n * (n - 2), 2 * (n + 2)),
            Sense::Decay,
        ),
    ])
}

/// Interpolation of a growing and a decaying dyadic bound:
/// `θ = ε₂/(ε₁+ε₂)` and `1/p = θ/p₁ + (1−θ)/p₂`, likewise for `q`.
pub fn bourgain_interpolate(growth: &DyadicBound, decay: &DyadicBound) -> Result<(ExponentPoint, Q)> {
    if growth.eps <= Q::zero() || decay.eps <= Q::zero() {
        return Err(Error::invalid("interpolation needs positive exponents"));
    }
    if growth.sense != Sense::Growth || decay.sense != Sense::Decay {
        return Err(Error::invalid("expected one growth bound and one decay bound"));
    }
    let theta = decay.eps / (growth.eps + decay.eps);
    let rest = Q::one() - theta;
    Ok((
        ExponentPoint::new(
            theta * growth.inv_p + rest * decay.inv_p,
            theta * growth.inv_q + rest * decay.inv_q,
        ),
        theta,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InductionMargin {
    /// `e = 2(1 + 3/q − 3/p + γ)`.
    pub e: Q,
    pub log2_k_min: u32,
    /// `2^{log2_k_min}` when it fits in 64 bits.
    pub k_min: Option<u64>,
}

/// Smallest dyadic `K` with `K^{−e} < 1/2`.
pub fn induction_margin(pt: ExponentPoint, gamma: Q) -> Result<InductionMargin> {
    let e = qi(2) * (Q::one() + qi(3) * pt.inv_q - qi(3) * pt.inv_p + gamma);
    if e <= Q::zero() {
        return Err(Error::NoContraction(format!("{e}")));
    }
    // K = 2^k works iff k·e > 1, i.e. k > 1/e.
    let k = (Q::one() / e).floor().to_integer() + 1;
    let k = u32::try_from(k).map_err(|_| Error::invalid("margin too small"))?;
    Ok(InductionMargin {
        e,
        log2_k_min: k,
        k_min: 1u64.checked_shl(k).filter(|_| k < 64),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Maximal,
    LocalSmoothing,
}

/// Predicted exponent attached to an extremizer family.
///
/// For the maximal variant this is the slope `s` of `log ratio` against
/// `log δ`; boundedness forces `s ≥ 0`. For the local smoothing variant it is
/// the lower-bound line for `γ` (defined for `n = 2`); the ratio then scales
/// like `δ^{−line}`.
pub fn necessity_slope(family: Family, n: u32, pt: ExponentPoint, variant: Variant) -> Result<Q> {
    let (x, y) = (pt.inv_p, pt.inv_q);
    let nn = qi(n as i64);
    match variant {
        Variant::Maximal => Ok(match family {
            Family::A => qi(2) * nn * y - nn * x,
            Family::B => {
                nn / qi(2) + (qi(3) * nn - qi(2)) / qi(2) * y - qi(3) * nn / qi(2) * x
            }
            Family::C => nn + (nn - Q::one()) * y - qi(2) * nn * x,
        }),
        Variant::LocalSmoothing => {
            if n != 2 {
                return Err(Error::Unsupported("local smoothing lines are given for n = 2"));
            }
            Ok(match family {
                Family::A => qi(2) * x - qi(5) * y,
                Family::B => qi(3) * x - qi(3) * y - Q::one(),
                Family::C => qi(4) * x - qi(2) * y - qi(2),
            })
        }
    }
}

/// Slope of `log ratio` against `log δ` predicted for a sweep.
pub fn predicted_ratio_slope(family: Family, n: u32, pt: ExponentPoint, variant: Variant) -> Result<Q> {
    let s = necessity_slope(family, n, pt, variant)?;
    Ok(match variant {
        Variant::Maximal => s,
        Variant::LocalSmoothing => -s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: i64, b: i64, c: i64, d: i64) -> ExponentPoint {
        ExponentPoint::ratio(a, b, c, d)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_ls(pt(0, 1, 0, 1)), Q::zero());
        assert_eq!(gamma_ls(pt(1, 2, 1, 6)), q(1, 6));
        assert_eq!(gamma_ls(pt(3, 5, 2, 5)), q(-2, 5));
    }

    #[test]
    fn w2_membership() {
        assert!(!region_contains(Region::W2, pt(1, 2, 1, 4)).unwrap());
        assert!(region_test(Region::W2, pt(1, 2, 1, 4)).unwrap().excluded);
        assert!(region_contains(Region::W2, pt(1, 2, 3, 10)).unwrap());
        assert!(!region_contains(Region::W2, pt(3, 5, 2, 5)).unwrap());
        assert!(!region_contains(Region::W2, pt(2, 3, 2, 3)).unwrap());
        assert!(region_test(Region::W2, pt(2, 3, 2, 3)).unwrap().in_closure);
    }

    #[test]
    fn vertices() {
        let v2 = region_vertices(2).unwrap();
        assert_eq!(v2[1], pt(1, 2, 1, 4));
        assert_eq!(v2[2], pt(3, 5, 2, 5));
        assert_eq!(v2[3], pt(2, 3, 2, 3));
        let v4 = region_vertices(4).unwrap();
        assert_eq!(v4[0], pt(0, 1, 0, 1));
        assert_eq!(v4[1], pt(8, 14, 4, 14));
        assert_eq!(v4[2], pt(7, 11, 4, 11));
        assert_eq!(v4[3], pt(4, 5, 4, 5));
        assert!(region_vertices(3).is_err());
        assert_eq!(vertex_tag(4, v4[2]).unwrap(), Some(VertexTag::RestrictedWeakOnly));
        assert_eq!(vertex_tag(4, v4[0]).unwrap(), None);
        assert!(region_contains(Region::Wn(4), v4[2]).unwrap());
        assert!(!strong_type_contains(Region::Wn(4), v4[2]).unwrap());
    }

    #[test]
    fn closure_polygon_of_w2_is_the_quadrangle() {
        let poly = closure_polygon(Region::W2).unwrap();
        let v = region_vertices(2).unwrap();
        assert_eq!(poly.len(), 4);
        for p in v {
            assert!(poly.contains(&p));
        }
    }

    #[test]
    fn interpolation_examples() {
        let b2 = dyadic_bounds(2).unwrap();
        let (m22, minf, m11, mstri) = (b2[0], b2[1], b2[2], b2[3]);
        assert_eq!(m22.eps, q(1, 2));
        assert_eq!(mstri.eps, Q::zero());
        assert!(!mstri.eligible);
        assert_eq!(bourgain_interpolate(&minf, &m22).unwrap(), (pt(3, 5, 2, 5), q(1, 5)));
        assert_eq!(bourgain_interpolate(&m11, &m22).unwrap(), (pt(2, 3, 2, 3), q(1, 3)));
        assert!(bourgain_interpolate(&minf, &mstri).is_err());

        let b4 = dyadic_bounds(4).unwrap();
        assert_eq!(b4[3].inv_q, q(1, 3));
        assert_eq!(b4[3].eps, q(2, 3));
        assert_eq!(bourgain_interpolate(&b4[1], &b4[3]).unwrap().0, pt(4, 7, 2, 7));
    }

    #[test]
    fn induction_examples() {
        let m = induction_margin(pt(1, 2, 1, 6), q(1, 6) + q(1, 100)).unwrap();
        assert_eq!(m.e, q(53, 150));
        assert_eq!(m.k_min, Some(8));
        let m0 = induction_margin(pt(0, 1, 0, 1), Q::zero()).unwrap();
        assert_eq!((m0.e, m0.k_min), (qi(2), Some(2)));
        let p = pt(1, 2, 1, 4);
        let g = qi(2) * p.inv_p - qi(5) * p.inv_q;
        assert!(matches!(induction_margin(p, g), Err(Error::NoContraction(_))));
    }

    #[test]
    fn necessity_examples() {
        let m = Variant::Maximal;
        assert_eq!(necessity_slope(Family::B, 2, pt(3, 5, 2, 5), m).unwrap(), Q::zero());
        assert_eq!(necessity_slope(Family::A, 2, pt(1, 2, 1, 2), m).unwrap(), Q::one());
        assert_eq!(necessity_slope(Family::C, 2, pt(11, 20, 1, 5), m).unwrap(), Q::zero());
        assert_eq!(necessity_slope(Family::A, 2, pt(1, 2, 1, 4), m).unwrap(), Q::zero());
        let ls = Variant::LocalSmoothing;
        assert_eq!(necessity_slope(Family::B, 2, pt(1, 2, 1, 6), ls).unwrap(), Q::zero());
        assert_eq!(
            necessity_slope(Family::A, 2, pt(1, 2, 1, 6), ls).unwrap(),
            gamma_ls(pt(1, 2, 1, 6))
        );
    }
}
