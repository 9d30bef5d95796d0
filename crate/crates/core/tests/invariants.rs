use maxavg_core::exponents::{
    bourgain_interpolate, gamma_ls, q, region_test, DyadicBound, ExponentPoint, Region, Sense, Q,
};
use maxavg_core::extremizers::{sweep, SweepConfig};
use maxavg_core::freqgeo::sets::{LowerRegion, TimeRange};
use maxavg_core::freqgeo::{Family, SetDescriptor};
use maxavg_core::operator::{sup_over_t, CutoffSpec, QuadSettings, Quadrature};
use maxavg_core::operator::multiplier::Channel;
use maxavg_core::exponents::Variant;
use maxavg_core::phase::{psi, stationary_point, transversality_volume};
use maxavg_core::poly::Polynomial;
use maxavg_core::rng::Stream;
use maxavg_core::surfaces::{jet, jet_fd, nondegeneracy_rank, rescale};
use maxavg_core::SurfaceSpec;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Cubic polynomials in two variables with coefficients in [-1, 1].
fn cubic() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-1.0f64..1.0, 10).prop_map(|c| {
        let mut terms = Vec::new();
        let mut k = 0;
        for d in 0..=3u32 {
            for a in 0..=d {
                terms.push((vec![a, d - a], c[k]));
                k += 1;
            }
        }
        Polynomial::from_terms(2, terms)
    })
}

/// `Γ∘` plus `ε(ω³)` split into real and imaginary parts, which keeps the
/// Cauchy-Riemann structure.
fn holomorphic_cubic(eps: f64) -> SurfaceSpec {
    let re = Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0), (vec![3, 0], eps), (vec![1, 2], -3.0 * eps)]);
    let im = Polynomial::from_terms(2, [(vec![1, 1], 2.0), (vec![2, 1], 3.0 * eps), (vec![0, 3], -eps)]);
    SurfaceSpec::polynomial(vec![re, im]).unwrap()
}

/// A frequency in the annulus at scale one for `Γ∘`.
fn annulus_xi() -> impl Strategy<Value = [f64; 4]> {
    (0.5f64..2.0, 0.0f64..std::f64::consts::TAU, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(r, th, a, b)| [r * a, r * b, r * th.cos(), r * th.sin()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_jets_match_differences(p1 in cubic(), p2 in cubic(), u in -0.9f64..0.9, v in -0.9f64..0.9) {
        let spec = SurfaceSpec::polynomial(vec![p1, p2]).unwrap();
        let z = [u, v];
        let a = jet(&spec, &z).unwrap();
        let b = jet_fd(&spec, &z, 1e-4).unwrap();
        for (x, y) in a.jacobian.iter().zip(b.jacobian.iter()) {
            prop_assert!(rel_close(*x, *y, 1e-6), "{x} vs {y}");
        }
        for (h, k) in a.hessians.iter().zip(&b.hessians) {
            for (x, y) in h.iter().zip(k.iter()) {
                prop_assert!(rel_close(*x, *y, 1e-6), "{x} vs {y}");
            }
            prop_assert!((h - h.transpose()).amax() <= 1e-15);
        }
    }

    #[test]
    fn phase_is_homogeneous(xi in annulus_xi(), s in prop::sample::select(vec![2.0, -2.0, 1.0 / 3.0, -1.0 / 3.0])) {
        let g = SurfaceSpec::gamma_circ();
        let sx: Vec<f64> = xi.iter().map(|x| s * x).collect();
        let a = psi(&g, &xi).unwrap();
        let b = psi(&g, &sx).unwrap();
        prop_assert!((b - s * a).abs() <= 1e-9 * (1.0 + a.abs()));
        let z1 = stationary_point(&g, &xi).unwrap();
        let z2 = stationary_point(&g, &sx).unwrap();
        prop_assert!((z1[0] - z2[0]).abs() + (z1[1] - z2[1]).abs() <= 1e-9 * (1.0 + z1[0].abs() + z1[1].abs()));
    }

    #[test]
    fn rank_survives_rescaling(eps in -0.2f64..0.2, w0 in -0.4f64..0.4, w1 in -0.4f64..0.4, h in 0.05f64..0.5, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let spec = holomorphic_cubic(eps);
        let w = [w0, w1];
        let (r, _) = rescale(&spec, &w, h).unwrap();
        let z = [a, b];
        let (k1, _) = nondegeneracy_rank(&r, &z).unwrap();
        let (k2, _) = nondegeneracy_rank(&spec, &[h * a + w0, h * b + w1]).unwrap();
        prop_assert_eq!(k1, k2);
    }

    #[test]
    fn complex_determinant_is_vandermonde(zs in prop::collection::vec(-1.0f64..1.0, 6)) {
        let g = SurfaceSpec::gamma_circ();
        let t = transversality_volume(&g, [&zs[0..2], &zs[2..4], &zs[4..6]]).unwrap();
        prop_assert!((t.cdet - t.separation_product).abs() <= 1e-10 * t.separation_product.max(1e-300) + 1e-300);
        prop_assert!((t.det6 - t.cdet * t.cdet).abs() <= 1e-9 * t.det6.max(1e-12));
    }

    #[test]
    fn interpolation_stays_on_the_segment(p1 in 0i64..=6, q1 in 0i64..=6, p2 in 0i64..=6, q2 in 0i64..=6, e1 in 1i64..8, e2 in 1i64..8) {
        let g = DyadicBound::new("g", q(p1, 6), q(q1, 6), q(e1, 4), Sense::Growth);
        let d = DyadicBound::new("d", q(p2, 6), q(q2, 6), q(e2, 4), Sense::Decay);
        let (pt, theta) = bourgain_interpolate(&g, &d).unwrap();
        prop_assert!(theta > Q::from_integer(0) && theta < Q::from_integer(1));
        // Collinear with both ends and between them.
        let cross = (pt.inv_p - g.inv_p) * (d.inv_q - g.inv_q) - (pt.inv_q - g.inv_q) * (d.inv_p - g.inv_p);
        prop_assert_eq!(cross, Q::from_integer(0));
        let lo = g.inv_p.min(d.inv_p);
        let hi = g.inv_p.max(d.inv_p);
        prop_assert!(pt.inv_p >= lo && pt.inv_p <= hi);
    }

    #[test]
    fn certificate_dominates_grid_max(amp in 0.1f64..3.0, freq in 0.5f64..20.0, ph in 0.0f64..6.0, qq in 1.0f64..6.0) {
        let m = 400;
        let ts: Vec<f64> = (0..=m).map(|i| 1.0 + i as f64 / m as f64).collect();
        let f: Vec<f64> = ts.iter().map(|t| amp * (freq * t + ph).sin()).collect();
        let df: Vec<f64> = ts.iter().map(|t| amp * freq * (freq * t + ph).cos()).collect();
        let c = sup_over_t(&ts, &f, Some(&df), qq, 0.5).unwrap();
        prop_assert!(c.certified);
        prop_assert!(c.bound.unwrap() >= c.grid_max.powf(qq));
    }

    #[test]
    fn samplers_stay_in_their_regions(seed in any::<u64>(), fam in prop::sample::select(vec![Family::A, Family::B, Family::C]), l in 3i32..=8) {
        let g = SurfaceSpec::gamma_circ();
        let d = SetDescriptor::knapp_family(fam, &g, 0.5f64.powi(l), 10.0).unwrap();
        let region = d.region().unwrap();
        let mut st = Stream::new(seed, &[1]);
        for _ in 0..50 {
            let s = region.sample(&mut st);
            prop_assert!(region.contains(&s.x));
            prop_assert!(s.weight > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn multiplier_reality(xi in prop::collection::vec(-30.0f64..30.0, 4)) {
        let quad = Quadrature::new(QuadSettings { order: 24, check_order: Some(16), ..QuadSettings::default() });
        let g = SurfaceSpec::gamma_circ();
        let phi = CutoffSpec::default_bump(2);
        let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
        let a = quad.evaluate(&g, &phi, &xi, Channel::Value).unwrap().value;
        let b = quad.evaluate(&g, &phi, &neg, Channel::Value).unwrap().value;
        prop_assert!((a - b.conj()).norm() <= 1e-12);
    }
}

#[test]
fn region_edges_and_gamma() {
    // W0 implies γ < −1/q, and the n = 2 hull agrees with W2 on the closure.
    for a in 0..=100 {
        for b in 0..=a {
            let pt = ExponentPoint::ratio(a, 100, b, 100);
            if region_test(Region::W0, pt).unwrap().contains {
                assert!(gamma_ls(pt) < -pt.inv_q, "{pt:?}");
            }
            let w2 = region_test(Region::W2, pt).unwrap().in_closure;
            let wn = region_test(Region::Wn(2), pt).unwrap().in_closure;
            assert_eq!(w2, wn, "{pt:?}");
        }
    }
}

#[test]
fn fixed_time_region_sampler() {
    let g = SurfaceSpec::gamma_circ();
    let d = SetDescriptor::knapp_family(Family::B, &g, 1.0 / 32.0, 10.0).unwrap();
    let r = d.fixed_time_region(1.5).unwrap();
    assert!(matches!(r, LowerRegion::Cone { time: TimeRange::Fixed(_), .. }));
    let mut st = Stream::new(3, &[]);
    for _ in 0..10_000 {
        assert!(r.contains(&r.sample(&mut st).x));
    }
}

#[test]
fn larger_budgets_do_not_lower_the_bound() {
    let g = SurfaceSpec::gamma_circ();
    let phi = CutoffSpec::default_bump(2);
    let deltas = vec![1.0 / 8.0, 1.0 / 16.0];
    for fam in [Family::A, Family::B, Family::C] {
        let pt = ExponentPoint::ratio(1, 2, 1, 3);
        let small = sweep(&g, &phi, &SweepConfig::new(fam, Variant::Maximal, pt, deltas.clone(), 500, 9)).unwrap();
        let big = sweep(&g, &phi, &SweepConfig::new(fam, Variant::Maximal, pt, deltas.clone(), 4000, 10)).unwrap();
        for (s, b) in small.iter().zip(&big) {
            let se = (s.stderr * s.stderr + b.stderr * b.stderr).sqrt();
            assert!(b.norm_lb >= s.norm_lb - 2.0 * se, "{fam:?} {} {} {}", s.norm_lb, b.norm_lb, se);
        }
    }
}
