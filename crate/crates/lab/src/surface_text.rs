//! Text form of surface specs.
//!
//! ```text
//! surface = poly
//! poly.phi1 = "u^2 - v^2"
//! poly.phi2 = "2 u v + 1/10 u^3"
//! rescale.w = "0.5, 0.5"
//! rescale.h = 0.25
//! ```
//!
//! `surface` is `gamma_circ`, `gamma_one` or `poly`. A polynomial is a sum of
//! terms `c u^a v^b`; the coefficient is an integer, decimal or fraction `p/q`
//! and may be omitted. For `n > 2` the variables are `u1 … un` and
//! `poly.n` sets the dimension. Factors may be separated by `*` or spaces.

use std::collections::BTreeMap;

use maxavg_core::poly::Polynomial;
use maxavg_core::surfaces::rescale;
use maxavg_core::SurfaceSpec;

use crate::error::{LabError, Result};

fn parse_number(s: &str) -> Result<f64> {
    let bad = || LabError::input(format!("bad coefficient '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

fn variable_index(name: &str, n: usize) -> Option<usize> {
    if n == 2 {
        match name {
            "u" => return Some(0),
            "v" => return Some(1),
            _ => {}
        }
    }
    let k: usize = name.strip_prefix('u')?.parse().ok()?;
    (1..=n).contains(&k).then(|| k - 1)
}

/// One signed term such as `3/2 u^2 v` or `u*v^3`.
fn parse_term(src: &str, n: usize) -> Result<(Vec<u32>, f64)> {
    let mut exps = vec![0u32; n];
    let mut coeff = 1.0;
    let mut seen_coeff = false;
    let spaced = src.replace('*', " ");
    let mut tokens = spaced.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        let first = tok.chars().next().unwrap();
        if first.is_ascii_digit() || first == '.' {
            if seen_coeff {
                return Err(LabError::input(format!("two coefficients in '{src}'")));
            }
            // Allow "3 / 2" with spaces around the slash.
            let mut num = tok.to_string();
            if tokens.peek() == Some(&"/") {
                tokens.next();
                let den = tokens.next().ok_or_else(|| LabError::input(format!("dangling '/' in '{src}'")))?;
                num = format!("{num}/{den}");
            }
            coeff = parse_number(&num)?;
            seen_coeff = true;
            continue;
        }
        let (name, power) = match tok.split_once('^') {
            Some((v, p)) => {
                let p: u32 = p.parse().map_err(|_| LabError::input(format!("bad exponent in '{tok}'")))?;
                (v, p)
            }
            None => (tok, 1),
        };
        let i = variable_index(name, n).ok_or_else(|| LabError::input(format!("unknown variable '{name}'")))?;
        exps[i] += power;
    }
    Ok((exps, coeff))
}

fn signed_term(src: &str, sign: f64, n: usize) -> Result<(Vec<u32>, f64)> {
    let (e, c) = parse_term(src.trim(), n)?;
    Ok((e, sign * c))
}

pub fn parse_polynomial(src: &str, n: usize) -> Result<Polynomial> {
    let s: String = src.trim().trim_matches('"').to_string();
    if s.trim().is_empty() {
        return Err(LabError::input("empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut cur = String::new();
    let mut prev = ' ';
    for ch in s.chars() {
        // A sign after '^' or inside "1e-3" belongs to the current token.
        if (ch == '+' || ch == '-') && !matches!(prev, '^' | 'e' | 'E') {
            if !cur.trim().is_empty() {
                terms.push(signed_term(&cur, sign, n)?);
                cur.clear();
                sign = 1.0;
            }
            if ch == '-' {
                sign = -sign;
            }
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = ch;
        }
    }
    if cur.trim().is_empty() {
        return Err(LabError::input(format!("missing term in '{src}'")));
    }
    terms.push(signed_term(&cur, sign, n)?);
    Ok(Polynomial::from_terms(n, terms))
}

/// Canonical text of a polynomial, readable by [`parse_polynomial`] when
/// the coefficients are exactly representable.
pub fn format_polynomial(p: &Polynomial) -> String {
    let n = p.nvars();
    let name = |i: usize| if n == 2 { ["u", "v"][i].to_string() } else { format!("u{}", i + 1) };
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().iter().enumerate() {
        let sign = if *c < 0.0 { "-" } else { "+" };
        if k == 0 {
            if *c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mut parts = Vec::new();
        let a = c.abs();
        if a != 1.0 || e.iter().all(|&x| x == 0) {
            parts.push(format!("{a}"));
        }
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(name(i)),
                _ => parts.push(format!("{}^{x}", name(i))),
            }
        }
        out.push_str(&parts.join(" "));
    }
    out
}

/// Builds a spec from `key = value` entries (section prefixes already
/// stripped, see [`crate::config`]).
pub fn surface_from_entries(entries: &BTreeMap<String, String>) -> Result<SurfaceSpec> {
    let kind = entries.get("surface").map(String::as_str).unwrap_or("gamma_circ");
    let base = match kind {
        "gamma_circ" => SurfaceSpec::gamma_circ(),
        "gamma_one" => SurfaceSpec::gamma_one(),
        "poly" => {
            let n: usize = match entries.get("poly.n") {
                Some(s) => s.parse().map_err(|_| LabError::input("poly.n must be an integer"))?,
                None => 2,
            };
            if n < 2 {
                return Err(LabError::input("poly.n must be at least 2"));
            }
            let phi = (1..=n)
                .map(|i| {
                    let key = format!("poly.phi{i}");
                    let src = entries.get(&key).ok_or_else(|| LabError::input(format!("missing {key}")))?;
                    parse_polynomial(src, n)
                })
                .collect::<Result<Vec<_>>>()?;
            SurfaceSpec::polynomial(phi)?
        }
        other => return Err(LabError::input(format!("unknown surface '{other}'"))),
    };
    match (entries.get("rescale.w"), entries.get("rescale.h")) {
        (None, None) => Ok(base),
        (Some(w), Some(h)) => {
            let w = parse_list(w)?;
            let h = parse_number(h.trim().trim_matches('"'))?;
            Ok(rescale(&base, &w, h)?.0)
        }
        _ => Err(LabError::input("rescale needs both rescale.w and rescale.h")),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.trim()
        .trim_matches('"')
        .split(',')
        .map(|x| parse_number(x.trim()))
        .collect()
}

/// Parses a surface document.
pub fn parse_surface(text: &str) -> Result<SurfaceSpec> {
    let cfg = crate::config::Config::parse(text)?;
    surface_from_entries(cfg.entries())
}
