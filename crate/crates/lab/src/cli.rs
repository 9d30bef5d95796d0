//! The `maxavg` command line.
//!
//! Every run is described by a [`RunConfig`]: the command name plus the
//! parameters it consumed, defaults included. Parameters come from `--config`
//! first and flags second. The resolved parameters are hashed into each JSON
//! summary and written next to it as `run.cfg`, which `--config` accepts back.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use maxavg_core::exponents::{
    closure_polygon, exclusions, gamma_ls, region_test, to_f64, ExponentPoint, Region, Variant, Q,
};
use maxavg_core::extremizers::{SweepConfig, Verdict, DEFAULT_TOL};
use maxavg_core::freqgeo::{decoupling_schedule, SetDescriptor};
use maxavg_core::operator::{CutoffSpec, DecayWarning, Quadrature};
use maxavg_core::surfaces::{cauchy_riemann_residual, curvature_margin, model_distance, nondegeneracy_rank};
use maxavg_core::SurfaceSpec;

use crate::config::Config;
use crate::error::{LabError, Result};
use crate::report::{self, num, Bundle, Table};
use crate::suite::{self, SuiteOptions};
use crate::surface_text::{parse_list, surface_from_entries};
use crate::drivers;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MAXAVG_OUT";
pub const DEFAULT_OUT: &str = "maxavg-out";
pub const DEFAULT_SEED: u64 = 7;
/// Name of the resolved-parameter file written with every bundle.
pub const RUN_CFG: &str = "run.cfg";

pub const SURFACE_SCHEMA: &str = "maxavg.surface_check/1";
pub const PHASE_SCHEMA: &str = "maxavg.phase_probe/1";
pub const PLATES_SCHEMA: &str = "maxavg.plates_audit/1";
pub const DECAY_SCHEMA: &str = "maxavg.multiplier_decay/1";
pub const SWEEP_SCHEMA: &str = "maxavg.sweep/1";
pub const MAP_SCHEMA: &str = "maxavg.exponent_map/1";
pub const SCHEDULE_SCHEMA: &str = "maxavg.schedule/1";
pub const RUN_CFG_SCHEMA: &str = "maxavg.run.cfg/1";

#[derive(Parser, Debug)]
#[command(name = "maxavg", version, about = "Numerical lab for maximal averages over codimension-2 surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// gamma_circ, gamma_one or a surface file.
    #[arg(long, global = true)]
    pub surface: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Monte Carlo samples, e.g. 1e5.
    #[arg(long, global = true)]
    pub budget: Option<String>,
    /// Output directory [default: $MAXAVG_OUT, else maxavg-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Dyadic exponents `3..7` or a list such as `1/8,1/16`.
    #[arg(long, global = true)]
    pub deltas: Option<String>,
    /// Exponent point `1/p,1/q`, e.g. `3/5,2/5`.
    #[arg(long, global = true)]
    pub point: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Parameter file in `key = value` form.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reduced budgets for the verification suite.
    #[arg(long, global = true)]
    pub quick: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Surface diagnostics.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Phase function diagnostics.
    #[command(subcommand)]
    Phase(PhaseCmd),
    /// Plate overlap audits.
    #[command(subcommand)]
    Plates(PlatesCmd),
    /// Multiplier decay along rays.
    #[command(subcommand)]
    Multiplier(MultiplierCmd),
    /// Extremizer sweeps.
    #[command(subcommand)]
    Extremizer(ExtremizerCmd),
    /// Exponent regions.
    #[command(subcommand)]
    Exponent(ExponentCmd),
    /// Decoupling exponent ledger.
    #[command(subcommand)]
    Decoupling(DecouplingCmd),
    /// The verification suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
pub enum SurfaceCmd {
    /// Rank, curvature margin, Cauchy-Riemann residual and model distance.
    Check,
}

#[derive(Subcommand, Debug)]
pub enum PhaseCmd {
    /// Homogeneity, gradient, rank and transversality checks on sampled frequencies.
    Probe,
}

#[derive(Subcommand, Debug)]
pub enum PlatesCmd {
    Audit {
        #[arg(long)]
        lambdas: Option<String>,
        #[arg(long)]
        hs: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum MultiplierCmd {
    Decay {
        /// Ray direction with 2n components.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// A list, or `a..b` for 2^a..2^b.
        #[arg(long)]
        lambdas: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExtremizerCmd {
    Sweep {
        /// a, b or c.
        #[arg(long)]
        family: Option<String>,
        /// maximal or local_smoothing.
        #[arg(long)]
        variant: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExponentCmd {
    Map {
        /// W0, W1, W2 or Wn for even n >= 2 written as e.g. W4.
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        grid: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum DecouplingCmd {
    Schedule {
        #[arg(long)]
        log2_lambda: Option<String>,
        #[arg(long)]
        delta0: Option<String>,
        /// Lebesgue exponents, e.g. `4,6`.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        eps1: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Runs every acceptance check and writes verify.json.
    All,
}

/// A resolved run: the command and the parameters it reads.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    /// Everything from `--config` and flags, not yet resolved.
    pub given: Config,
    /// Keys that came from flags. A flag the command does not read is an error.
    pub flags: BTreeSet<String>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let mut given = match &cli.common.config {
            Some(p) => Config::parse(&read_text(p)?)?,
            None => Config::default(),
        };
        given.remove("command");
        let mut flags = BTreeSet::new();
        let mut set = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                given.set(k, v.clone());
                flags.insert(k.to_string());
            }
        };
        let c = &cli.common;
        set("surface", &c.surface);
        set("seed", &c.seed);
        set("budget", &c.budget);
        set("deltas", &c.deltas);
        set("point", &c.point);
        set("tol", &c.tol);
        if c.quick {
            set("quick", &Some("true".into()));
        }
        let command = match &cli.command {
            Command::Surface(SurfaceCmd::Check) => "surface check",
            Command::Phase(PhaseCmd::Probe) => "phase probe",
            Command::Plates(PlatesCmd::Audit { lambdas, hs }) => {
                set("lambdas", lambdas);
                set("hs", hs);
                "plates audit"
            }
            Command::Multiplier(MultiplierCmd::Decay { direction, lambdas }) => {
                set("direction", direction);
                set("lambdas", lambdas);
                "multiplier decay"
            }
            Command::Extremizer(ExtremizerCmd::Sweep { family, variant }) => {
                set("family", family);
                set("variant", variant);
                "extremizer sweep"
            }
            Command::Exponent(ExponentCmd::Map { region, grid }) => {
                set("region", region);
                set("grid", grid);
                "exponent map"
            }
            Command::Decoupling(DecouplingCmd::Schedule { log2_lambda, delta0, p, eps1 }) => {
                set("log2_lambda", log2_lambda);
                set("delta0", delta0);
                set("p", p);
                set("eps1", eps1);
                "decoupling schedule"
            }
            Command::Verify(VerifyCmd::All) => "verify all",
        };
        let out = match (&c.out, given.remove("out")) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => PathBuf::from(p),
            (None, None) => std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_OUT.into()),
        };
        Ok(RunConfig { command, given, flags, out })
    }
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| LabError::input(format!("cannot read {}: {e}", p.display())))
}

/// Reads parameters with defaults, recording what was used.
struct Params<'a> {
    rc: &'a RunConfig,
    used: Config,
}

impl<'a> Params<'a> {
    fn new(rc: &'a RunConfig) -> Self {
        let mut used = Config::default();
        used.set("command", rc.command);
        Params { rc, used }
    }

    fn raw(&mut self, key: &str, default: &str) -> String {
        let v = self.rc.given.get(key).unwrap_or(default).trim().to_string();
        self.used.set(key, v.clone());
        v
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, default: &str) -> Result<T> {
        let v = self.raw(key, default);
        v.parse().map_err(|_| LabError::input(format!("{key}: cannot parse '{v}'")))
    }

    fn seed(&mut self) -> Result<u64> {
        self.parsed("seed", &DEFAULT_SEED.to_string())
    }

    /// Accepts `100000` and `1e5`.
    fn count(&mut self, key: &str, default: &str) -> Result<usize> {
        let v = self.raw(key, default);
        let x: f64 = v.parse().map_err(|_| LabError::input(format!("{key}: cannot parse '{v}'")))?;
        if !(x >= 1.0 && x.fract() == 0.0 && x <= 1e12) {
            return Err(LabError::input(format!("{key} must be a positive integer")));
        }
        Ok(x as usize)
    }

    fn float(&mut self, key: &str, default: &str) -> Result<f64> {
        parse_f64(key, &self.raw(key, default))
    }

    fn rational(&mut self, key: &str, default: &str) -> Result<Q> {
        parse_rational(&self.raw(key, default))
    }

    fn flag(&mut self, key: &str) -> Result<bool> {
        self.parsed(key, "false")
    }

    /// The surface, loading a surface file when the value names one.
    fn surface(&mut self) -> Result<SurfaceSpec> {
        let name = self.rc.given.get("surface").unwrap_or("gamma_circ").trim().to_string();
        let mut entries = std::collections::BTreeMap::new();
        if matches!(name.as_str(), "gamma_circ" | "gamma_one" | "poly") {
            for (k, v) in self.rc.given.entries() {
                if k == "surface" || k.starts_with("poly.") || k.starts_with("rescale.") {
                    entries.insert(k.clone(), v.clone());
                }
            }
            entries.insert("surface".into(), name);
        } else {
            let text = read_text(Path::new(&name))?;
            for (k, v) in Config::parse(&text)?.entries() {
                entries.insert(k.clone(), v.clone());
            }
            entries.entry("surface".into()).or_insert_with(|| "gamma_circ".into());
        }
        let spec = surface_from_entries(&entries)?;
        // Record the surface by content, so the hash does not depend on file paths.
        for (k, v) in &entries {
            self.used.set(k, v.clone());
        }
        Ok(spec)
    }

    fn finish(&self) -> Result<()> {
        for f in &self.rc.flags {
            if self.used.get(f).is_none() {
                return Err(LabError::input(format!("--{} is not used by `{}`", f.replace('_', "-"), self.rc.command)));
            }
        }
        Ok(())
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().map_err(|_| LabError::input(format!("{key}: cannot parse '{v}'")))
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || LabError::input(format!("'{s}' is not a rational number"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// `1/p,1/q` with rational or integer parts.
pub fn parse_point(s: &str) -> Result<ExponentPoint> {
    let (a, b) = s.split_once(',').ok_or_else(|| LabError::input("a point is written 1/p,1/q"))?;
    let pt = ExponentPoint::new(parse_rational(a)?, parse_rational(b)?);
    let unit = |x: Q| x >= Q::from_integer(0) && x <= Q::from_integer(1);
    if !unit(pt.inv_p) || !unit(pt.inv_q) {
        return Err(LabError::input("1/p and 1/q must lie in [0, 1]"));
    }
    Ok(pt)
}

/// `a..b` means `2^-a, …, 2^-b`; otherwise a comma list of numbers.
pub fn parse_deltas(s: &str) -> Result<Vec<f64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (int(a)?, int(b)?);
        if a > b {
            return Err(LabError::input("delta range must increase"));
        }
        return Ok((a..=b).map(|k| 0.5f64.powi(k)).collect());
    }
    parse_list(s)
}

/// `a..b` means `2^a, …, 2^b`; otherwise a comma list of numbers.
pub fn parse_scales(s: &str) -> Result<Vec<f64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (int(a)?, int(b)?);
        if a > b {
            return Err(LabError::input("scale range must increase"));
        }
        return Ok((a..=b).map(|k| 2f64.powi(k)).collect());
    }
    parse_list(s)
}

fn int(s: &str) -> Result<i32> {
    s.trim().parse().map_err(|_| LabError::input(format!("'{s}' is not an integer")))
}

pub fn parse_region(s: &str) -> Result<Region> {
    match s {
        "W0" => Ok(Region::W0),
        "W1" => Ok(Region::W1),
        "W2" => Ok(Region::W2),
        _ => {
            let n = s
                .strip_prefix("Wn")
                .or_else(|| s.strip_prefix('W'))
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| LabError::input(format!("unknown region '{s}'")))?;
            Ok(Region::Wn(n))
        }
    }
}

pub fn parse_variant(s: &str) -> Result<Variant> {
    match s {
        "maximal" => Ok(Variant::Maximal),
        "local_smoothing" | "local-smoothing" => Ok(Variant::LocalSmoothing),
        other => Err(LabError::input(format!("unknown variant '{other}'"))),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
}

/// Short form for terminal lines; files keep full precision.
fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn rat(x: Q) -> String {
    x.to_string()
}

/// What a command produced: printed lines, files and the exit status.
pub struct Finished {
    pub lines: Vec<String>,
    pub bundle: Option<Bundle>,
    pub pass: bool,
}

fn finish_bundle(mut b: Bundle, p: &Params) -> Bundle {
    b.summary.put("command", p.rc.command);
    b.summary.put("config_hash", p.used.hash());
    b.text(RUN_CFG, RUN_CFG_SCHEMA, p.used.canonical());
    b
}

fn surface_check(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let spec = p.surface()?;
    p.finish()?;
    let n = spec.dim();
    let g = if n == 2 { 9 } else { 3 };
    let mut pts = vec![Vec::new()];
    for (lo, hi) in spec.domain() {
        let mut next = Vec::new();
        for base in &pts {
            for k in 0..g {
                let mut z: Vec<f64> = base.clone();
                z.push(lo + (hi - lo) * (k as f64 + 0.5) / g as f64);
                next.push(z);
            }
        }
        pts = next;
    }
    let mut rank_min = n;
    let mut sigma_min = f64::INFINITY;
    let mut margin = (f64::INFINITY, Vec::new(), Vec::new());
    let mut cr = 0.0f64;
    for z in &pts {
        let (r, s) = nondegeneracy_rank(&spec, z)?;
        rank_min = rank_min.min(r);
        sigma_min = sigma_min.min(s);
        let m = curvature_margin(&spec, z, 256)?;
        let (val, wit) = match (m.exact, m.exact_witness) {
            (Some(v), Some(w)) => (v, w),
            _ => (m.sampled, m.sampled_witness),
        };
        if val < margin.0 {
            margin = (val, wit, z.clone());
        }
        if n == 2 {
            cr = cr.max(cauchy_riemann_residual(&spec, z)?);
        }
    }
    let dist = if n == 2 { Some(model_distance(&spec, 3)?) } else { None };
    let pass = rank_min == n && margin.0 > 1e-12;
    let mut b = Bundle::new("surface_check", SURFACE_SCHEMA);
    let s = &mut b.summary;
    s.put("n", n as u64);
    s.put("degree", spec.degree() as u64);
    s.put("points", pts.len() as u64);
    s.put("rank_min", rank_min as u64);
    s.put_f64("rank_sigma_min", sigma_min);
    s.put_f64("curvature_margin", margin.0);
    s.put("margin_witness", fmt_vec(&margin.1));
    s.put("margin_at", fmt_vec(&margin.2));
    s.put_f64("c_star", spec.c_star(33));
    if n == 2 {
        s.put_f64("cr_residual", cr);
    }
    if let Some(d) = dist {
        s.put_f64("model_distance", d);
    }
    s.put("pass", pass);
    let mut lines = vec![
        format!("rank            {rank_min} of {n} (smallest singular value {})", sci(sigma_min)),
        format!("curvature       margin {} witness theta=({}) at z=({})", num(margin.0), fmt_vec(&margin.1), fmt_vec(&margin.2)),
    ];
    if n == 2 {
        lines.push(format!("cauchy-riemann  residual {}", sci(cr)));
    }
    if let Some(d) = dist {
        lines.push(format!("model distance  {} (order 3)", sci(d)));
    }
    lines.push(if pass { "surface satisfies the curvature hypothesis".into() } else { "curvature hypothesis fails".into() });
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass })
}

fn phase_probe(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let spec = p.surface()?;
    let seed = p.seed()?;
    let samples = p.count("budget", "1000")?;
    p.finish()?;
    let ph = suite::phase_probe(&spec, seed, samples)?;
    let tr = suite::transversality_probe(&spec, seed, 500, 200)?;
    let pass = ph.pass() && tr.pass();
    let mut b = Bundle::new("phase_probe", PHASE_SCHEMA);
    let s = &mut b.summary;
    s.put("samples", samples as u64);
    s.put_f64("stationarity_residual", ph.residual);
    if let Some(c) = ph.closed_form {
        s.put_f64("closed_form_error", c);
    }
    s.put_f64("homogeneity_error", ph.homogeneity);
    s.put_f64("gradient_error", ph.gradient);
    s.put_f64("hessian_sigma2_min", ph.sigma2);
    s.put_f64("euler_residual", ph.euler);
    s.put_f64("det_xi1_min", ph.det_xi1);
    if let Some(v) = tr.vandermonde {
        s.put_f64("vandermonde_error", v);
    }
    if let Some(v) = tr.square {
        s.put_f64("det6_square_error", v);
    }
    for (i, &(_, r)) in tr.separated.iter().enumerate() {
        s.put_f64(&format!("det6_ratio_h{}", i + 2), r);
    }
    s.put("pass", pass);
    let mut lines = vec![
        format!("stationarity    {}", sci(ph.residual)),
        format!("homogeneity     {}", sci(ph.homogeneity)),
        format!("gradient        {}", sci(ph.gradient)),
        format!("sigma2 min      {}", sci(ph.sigma2)),
        format!("euler           {}", sci(ph.euler)),
    ];
    if let Some(c) = ph.closed_form {
        lines.push(format!("closed form     {}", sci(c)));
    }
    if let (Some(v), Some(q)) = (tr.vandermonde, tr.square) {
        lines.push(format!("vandermonde     {} square {}", sci(v), sci(q)));
    }
    for &(h, r) in &tr.separated {
        lines.push(format!("det6/h^6 h={h:<7} {}", sci(r)));
    }
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass })
}

fn plates_audit(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let spec = p.surface()?;
    let seed = p.seed()?;
    let samples = p.count("budget", "1e5")?;
    let lambdas = parse_scales(&p.raw("lambdas", "256,1024"))?;
    let hs = parse_list(&p.raw("hs", "1/4,1/8"))?;
    p.finish()?;
    let bound = 33usize.pow(spec.dim() as u32);
    let mut audits = Vec::new();
    let mut lines = Vec::new();
    for &l in &lambdas {
        for &h in &hs {
            let a = drivers::plate_audit(&spec, l, h, samples, seed)?;
            lines.push(format!(
                "lambda {l:<6} h {h:<7} plates {:<5} max overlap {:<4} violations {} uncovered {}",
                a.plates, a.max_overlap, a.violations, a.uncovered
            ));
            audits.push(a);
        }
    }
    let pass = audits.iter().all(|a| a.violations == 0 && a.max_overlap <= bound);
    let mut b = Bundle::new("plates_audit", PLATES_SCHEMA);
    b.summary.put("samples", samples as u64);
    b.summary.put("overlap_bound", bound as u64);
    b.summary.put("violations", audits.iter().map(|a| a.violations as u64).sum::<u64>());
    b.summary.put("max_overlap", audits.iter().map(|a| a.max_overlap as u64).max().unwrap_or(0));
    b.summary.put("pass", pass);
    b.table("plates_audit.csv", report::audit_table(&audits));
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass })
}

fn multiplier_decay(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let spec = p.surface()?;
    let n = spec.dim();
    let mut default_dir = vec![0.0; 2 * n];
    default_dir[n] = 1.0;
    let direction = parse_list(&p.raw("direction", &fmt_vec(&default_dir)))?;
    let lambdas = parse_scales(&p.raw("lambdas", "6..12"))?;
    let tol = p.float("tol", "0.1")?;
    p.finish()?;
    if direction.len() != 2 * n {
        return Err(LabError::input(format!("direction needs {} components", 2 * n)));
    }
    let phi = CutoffSpec::default_bump(n);
    let fit = drivers::decay_fits(&Quadrature::default(), &spec, &phi, &[direction.clone()], &lambdas)?.remove(0);
    let expected = -(n as f64) / 2.0;
    let degenerate = fit.warnings.contains(&DecayWarning::DegenerateDirection);
    let accurate = !fit.warnings.contains(&DecayWarning::Accuracy);
    let pass = !degenerate && accurate && (fit.fit.slope - expected).abs() <= tol;
    let mut lines: Vec<String> = fit
        .samples
        .iter()
        .map(|(l, m)| format!("lambda {l:<8} |m| {:.6e}", m.value.norm()))
        .collect();
    lines.push(format!("slope {:.4} (expected {expected}, tol {tol})", fit.fit.slope));
    if degenerate {
        lines.push("direction has no nondegenerate stationary point in the cutoff support".into());
    }
    if !accurate {
        lines.push("some evaluations missed the accuracy target".into());
    }
    let mut b = Bundle::new("multiplier_decay", DECAY_SCHEMA);
    let s = &mut b.summary;
    s.put("direction", fmt_vec(&direction));
    s.put_f64("slope", fit.fit.slope);
    s.put_f64("slope_stderr", fit.fit.stderr_slope);
    s.put_f64("intercept", fit.fit.intercept);
    s.put_f64("expected_slope", expected);
    s.put("degenerate_direction", degenerate);
    s.put("converged", accurate);
    s.put("pass", pass);
    b.table("multiplier_decay.csv", report::decay_table(&fit.samples));
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass })
}

fn extremizer_sweep(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let spec = p.surface()?;
    let seed = p.seed()?;
    let family = report::parse_family(&p.raw("family", "b"))?;
    let variant = parse_variant(&p.raw("variant", "maximal"))?;
    let point = parse_point(&p.raw("point", "3/5,2/5"))?;
    let deltas = parse_deltas(&p.raw("deltas", "3..7"))?;
    let budget = p.count("budget", "1e5")?;
    let tol = p.float("tol", &DEFAULT_TOL.to_string())?;
    p.finish()?;
    let cfg = SweepConfig::new(family, variant, point, deltas.clone(), budget, seed);
    let run = suite::run_sweep(&spec, &cfg, tol)?;
    let mut lines: Vec<String> = run
        .records
        .iter()
        .map(|r| {
            format!(
                "delta {:<10} ratio {:.6e} stderr {:.3e}{}",
                r.delta,
                r.ratio(),
                r.stderr / r.fp_norm,
                if r.under_resolved { " under-resolved" } else { "" }
            )
        })
        .collect();
    let mut b = Bundle::new("sweep", SWEEP_SCHEMA);
    let s = &mut b.summary;
    s.put("family", family.name());
    s.put("variant", if variant == Variant::Maximal { "maximal" } else { "local_smoothing" });
    s.put("inv_p", rat(point.inv_p));
    s.put("inv_q", rat(point.inv_q));
    s.put("budget", budget as u64);
    s.put_f64("predicted_slope", run.predicted);
    s.put_f64("tol", tol);
    s.put("under_resolved", run.records.iter().filter(|r| r.under_resolved).count() as u64);
    match &run.fit {
        Some(f) => {
            s.put_f64("slope", f.slope);
            s.put_f64("slope_stderr", f.stderr_slope);
            s.put_f64("r_squared", f.r_squared);
            lines.push(format!("slope {:.4} ± {:.4} predicted {}", f.slope, f.stderr_slope, run.predicted));
        }
        None => lines.push("records are under-resolved; raise --budget".into()),
    }
    s.put("verdict", run.verdict.name());
    lines.push(format!("verdict {}", run.verdict.name()));
    let mut sets = String::new();
    for &d in &deltas {
        let desc = SetDescriptor::knapp_family(family, &spec, d, cfg.inflation)?;
        sets.push_str(&report::set_block(&desc, seed));
    }
    b.table("sweep.csv", report::sweep_table(&run.records));
    b.text("sets.txt", report::SET_TEXT, sets);
    let pass = run.verdict != Verdict::Violation;
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass })
}

fn exponent_map(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let region_name = p.raw("region", "W2");
    let region = parse_region(&region_name)?;
    let g: i64 = p.parsed("grid", "100")?;
    p.finish()?;
    if !(1..=2000).contains(&g) {
        return Err(LabError::input("grid must lie in 1..=2000"));
    }
    let mut map = Table::new(report::MAP_CSV, &["inv_p", "inv_q", "contains", "in_closure", "excluded", "on_boundary", "gamma"]);
    let (mut inside, mut excluded) = (0u64, 0u64);
    for a in 0..=g {
        for c in 0..=g {
            let pt = ExponentPoint::ratio(a, g, c, g);
            let t = region_test(region, pt)?;
            inside += t.contains as u64;
            excluded += t.excluded as u64;
            map.push(vec![
                num(to_f64(pt.inv_p)),
                num(to_f64(pt.inv_q)),
                (t.contains as u8).to_string(),
                (t.in_closure as u8).to_string(),
                (t.excluded as u8).to_string(),
                (t.on_boundary as u8).to_string(),
                num(to_f64(gamma_ls(pt))),
            ]);
        }
    }
    let poly = closure_polygon(region)?;
    let mut boundary = Table::new(report::BOUNDARY_CSV, &["vertex", "inv_p", "inv_q", "inv_p_exact", "inv_q_exact"]);
    // Closed polyline: the first vertex is repeated at the end.
    for (i, v) in poly.iter().chain(poly.first()).enumerate() {
        boundary.push(vec![i.to_string(), num(to_f64(v.inv_p)), num(to_f64(v.inv_q)), rat(v.inv_p), rat(v.inv_q)]);
    }
    let excl = exclusions(region)?;
    let mut lines = vec![format!("region {region_name}: {inside} of {} grid points inside, {excluded} excluded", (g + 1) * (g + 1))];
    lines.push(format!(
        "closure vertices {}",
        poly.iter().map(|v| format!("({},{})", v.inv_p, v.inv_q)).collect::<Vec<_>>().join(" ")
    ));
    let mut b = Bundle::new("exponent_map", MAP_SCHEMA);
    b.summary.put("region", region_name);
    b.summary.put("grid", g as u64);
    b.summary.put("inside", inside);
    b.summary.put("excluded", excluded);
    b.summary.put(
        "exclusion_points",
        excl.iter().map(|v| format!("({},{})", v.inv_p, v.inv_q)).collect::<Vec<_>>().join(" "),
    );
    b.table("exponent_map.csv", map);
    b.table("region_boundary.csv", boundary);
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass: true })
}

fn decoupling(rc: &RunConfig) -> Result<Finished> {
    let mut p = Params::new(rc);
    let log2_lambda: u32 = p.parsed("log2_lambda", "20")?;
    let delta0 = p.rational("delta0", "1/20")?;
    let ps = p
        .raw("p", "4,6")
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    let eps1 = p.rational("eps1", "1/100")?;
    p.finish()?;
    let mut steps = Table::new(report::SCHEDULE_CSV, &["p", "k", "log2_sigma_inv", "loss_k"]);
    let mut b = Bundle::new("schedule", SCHEDULE_SCHEMA);
    b.summary.put("log2_lambda", log2_lambda as u64);
    b.summary.put("delta0", rat(delta0));
    b.summary.put("eps1", rat(eps1));
    let mut lines = Vec::new();
    let mut pass = true;
    for &pv in &ps {
        let s = decoupling_schedule(log2_lambda, delta0, pv, eps1)?;
        for st in &s.steps {
            steps.push(vec![rat(pv), st.k.to_string(), rat(st.log2_sigma_inv), rat(st.loss_k)]);
        }
        let key = |k: &str| format!("p{}_{k}", pv.to_string().replace('/', "_"));
        let sm = &mut b.summary;
        sm.put(&key("log2_k"), s.log2_k as u64);
        sm.put(&key("n_steps"), s.n_steps as u64);
        sm.put(&key("holder_k"), rat(s.holder_k));
        sm.put(&key("tail"), rat(s.tail));
        sm.put(&key("tail_exact"), rat(s.tail_exact));
        sm.put(&key("total"), rat(s.total));
        sm.put(&key("bound"), rat(s.bound));
        sm.put(&key("ok"), s.ok);
        pass &= s.ok;
        lines.push(format!(
            "p={pv}: K=2^{} N={} total {} bound {} {}",
            s.log2_k,
            s.n_steps,
            s.total,
            s.bound,
            if s.ok { "ok" } else { "exceeds bound" }
        ));
    }
    b.summary.put("pass", pass);
    b.table("schedule.csv", steps);
    Ok(Finished { lines, bundle: Some(finish_bundle(b, &p)), pass })
}

fn verify(rc: &RunConfig, out: &mut dyn Write) -> Result<Finished> {
    let mut p = Params::new(rc);
    let surface = p.raw("surface", "gamma_circ");
    let seed = p.seed()?;
    let quick = p.flag("quick")?;
    p.finish()?;
    if surface != "gamma_circ" {
        return Err(LabError::input("verify all is defined for gamma_circ"));
    }
    let opts = SuiteOptions { seed, quick };
    let ids: Vec<u32> = suite::CRITERIA.iter().map(|c| c.0).collect();
    let timed = suite::run_all(opts, &ids, |t| {
        // Progress goes out as each check finishes; write errors surface at the end.
        let _ = writeln!(out, "{}", t.line());
        let _ = out.flush();
    })?;
    let outcomes: Vec<_> = timed.iter().map(|t| t.outcome.clone()).collect();
    let summary = suite::report(opts, &outcomes);
    let pass = outcomes.iter().all(|o| o.pass);
    let mut b = Bundle::new("verify", suite::VERIFY_SCHEMA);
    b.summary = summary;
    let slow = timed.iter().filter(|t| !t.within_limit()).count();
    let mut lines = vec![format!("{} of {} checks pass", outcomes.iter().filter(|o| o.pass).count(), outcomes.len())];
    if slow > 0 {
        lines.push(format!("{slow} checks exceeded their runtime budget"));
    }
    Ok(Finished { lines, bundle: Some(b), pass })
}

/// Runs one resolved command, printing to `out` and writing its files.
pub fn execute(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let f = match rc.command {
        "surface check" => surface_check(rc)?,
        "phase probe" => phase_probe(rc)?,
        "plates audit" => plates_audit(rc)?,
        "multiplier decay" => multiplier_decay(rc)?,
        "extremizer sweep" => extremizer_sweep(rc)?,
        "exponent map" => exponent_map(rc)?,
        "decoupling schedule" => decoupling(rc)?,
        "verify all" => verify(rc, out)?,
        other => return Err(LabError::input(format!("unknown command '{other}'"))),
    };
    for l in &f.lines {
        writeln!(out, "{l}")?;
    }
    if let Some(b) = &f.bundle {
        for path in b.write(&rc.out)? {
            writeln!(out, "wrote {}", path.display())?;
        }
    }
    Ok(f.pass)
}

/// Parses arguments and runs; the return value is the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = RunConfig::from_cli(&cli).and_then(|rc| execute(&rc, out));
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
