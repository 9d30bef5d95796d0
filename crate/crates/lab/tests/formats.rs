use maxavg_core::freqgeo::{Family, SetDescriptor};
use maxavg_core::poly::Polynomial;
use maxavg_core::SurfaceSpec;
use maxavg_lab::config::Config;
use maxavg_lab::report::{parse_set_blocks, set_block, Summary, Table, SWEEP_CSV};
use maxavg_lab::surface_text::{format_polynomial, parse_polynomial, parse_surface};
use proptest::prelude::*;

fn poly(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..4, n), -5i32..=5, 1i32..=8), 1..6).prop_map(move |ts| {
        Polynomial::from_terms(n, ts.into_iter().map(|(e, a, b)| (e, a as f64 / b as f64)))
    })
}

fn key() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}(\\.[a-z][a-z0-9_]{0,4})?"
}

fn value() -> impl Strategy<Value = String> {
    // No quotes, no '#', no surrounding whitespace.
    "[A-Za-z0-9_./,^ +-]{0,12}".prop_map(|s| s.trim().to_string())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polynomials_round_trip(p in poly(2), q in poly(3)) {
        prop_assert_eq!(parse_polynomial(&format_polynomial(&p), 2).unwrap(), p.clone());
        prop_assert_eq!(parse_polynomial(&format_polynomial(&q), 3).unwrap(), q.clone());
    }

    #[test]
    fn canonical_config_round_trips(entries in prop::collection::btree_map(key(), value(), 0..8)) {
        let mut c = Config::default();
        for (k, v) in &entries {
            c.set(k, v.clone());
        }
        let back = Config::parse(&c.canonical()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn hash_ignores_layout(entries in prop::collection::btree_map("[a-z]{1,6}", "[a-z0-9]{1,6}", 1..6)) {
        let plain: String = entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let spaced: String = entries.iter().rev().map(|(k, v)| format!("  {k} = \"{v}\"   # note\n\n")).collect();
        prop_assert_eq!(Config::parse(&plain).unwrap().hash(), Config::parse(&spaced).unwrap().hash());
    }
}

#[test]
fn config_grammar() {
    let c = Config::parse("# header\nseed = 7\n[poly]\nphi1 = \"u^2 # not a comment\"\n").unwrap();
    assert_eq!(c.get("seed"), Some("7"));
    assert_eq!(c.get("poly.phi1"), Some("u^2 # not a comment"));
    assert!(Config::parse("seed = 7\nseed = 8\n").is_err());
    assert!(Config::parse("just words\n").is_err());
    assert!(Config::parse("[open\n").is_err());
    assert!(Config::parse("a = \"x\n").is_err());
    // A fixed hash guards the canonical form against accidental changes.
    let mut d = Config::default();
    d.set("seed", "7");
    assert_eq!(d.canonical(), "seed = \"7\"\n");
    assert_eq!(d.hash().len(), 64);
    assert_eq!(d.hash(), Config::parse("seed=7").unwrap().hash());
}

#[test]
fn polynomial_grammar() {
    let p = parse_polynomial("3/2 u^2 v - u*v^3 + 1e-3 - v", 2).unwrap();
    let want = Polynomial::from_terms(2, [(vec![2, 1], 1.5), (vec![1, 3], -1.0), (vec![0, 0], 1e-3), (vec![0, 1], -1.0)]);
    assert_eq!(p, want);
    assert_eq!(parse_polynomial("-u^2 + 3 / 4 v", 2).unwrap(), Polynomial::from_terms(2, [(vec![2, 0], -1.0), (vec![0, 1], 0.75)]));
    assert_eq!(parse_polynomial("u1 u3^2", 3).unwrap(), Polynomial::monomial(1.0, &[1, 0, 2]));
    for bad in ["", "u +", "w^2", "u^x", "2 3 u", "1/0 u", "u4"] {
        assert!(parse_polynomial(bad, 3).is_err(), "{bad}");
    }
}

#[test]
fn surface_documents() {
    let g = parse_surface("surface = poly\n[poly]\nphi1 = \"u^2 - v^2\"\nphi2 = \"2 u v\"\n").unwrap();
    let circ = SurfaceSpec::gamma_circ();
    assert_eq!(g.phi(), circ.phi());
    let r = parse_surface("surface = gamma_circ\nrescale.w = \"0.25, -0.25\"\nrescale.h = 1/4\n").unwrap();
    for z in [[0.3, -0.7], [1.0, 1.0]] {
        let (a, b) = (r.gamma(&z), circ.gamma(&z));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12));
    }
    assert!(parse_surface("surface = torus\n").is_err());
    assert!(parse_surface("surface = poly\npoly.phi1 = u^2\n").is_err());
    assert!(parse_surface("rescale.h = 0.5\n").is_err());
}

#[test]
fn set_blocks_round_trip() {
    let g = SurfaceSpec::gamma_circ();
    let mut text = String::new();
    let mut want = Vec::new();
    for (f, d) in [(Family::A, 0.125), (Family::B, 1.0 / 64.0), (Family::C, 1.0 / 256.0)] {
        let desc = SetDescriptor::knapp_family(f, &g, d, 10.0).unwrap();
        text.push_str(&set_block(&desc, 99));
        want.push((f, d, 2, 10.0, 99));
    }
    assert_eq!(parse_set_blocks(&text).unwrap(), want);
    assert!(parse_set_blocks("family = a\n").is_err());
}

#[test]
fn tables_and_summaries() {
    let mut t = Table::new(SWEEP_CSV, &["a", "b"]);
    t.push(vec!["1".into(), "x,y".into()]);
    assert_eq!(t.to_bytes().unwrap(), b"a,b\r\n1,\"x,y\"\r\n");
    let mut s = Summary::new("maxavg.test/1");
    s.put("zeta", 1u64).put_f64("alpha", f64::NAN);
    s.attach("t.csv", SWEEP_CSV);
    let text = String::from_utf8(s.to_bytes().unwrap()).unwrap();
    let keys: Vec<usize> = ["\"alpha\": null", "\"files\"", "\"schema\"", "\"zeta\""].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "{text}");
}
