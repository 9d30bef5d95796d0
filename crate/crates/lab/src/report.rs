//! CSV tables and flat JSON summaries. Every file has a schema id; CSV ids
//! are listed in the `files` field of the summary written next to them.
//! Reports carry no timings, so equal inputs give equal bytes.

use std::fs;
use std::path::{Path, PathBuf};

use maxavg_core::extremizers::SweepRecord;
use maxavg_core::freqgeo::{Family, OverlapAudit, SetDescriptor};
use maxavg_core::operator::MultiplierValue;
use serde_json::{Map, Value};

use crate::config::Config;
use crate::error::{LabError, Result};

pub const DECAY_CSV: &str = "maxavg.decay.csv/1";
pub const AUDIT_CSV: &str = "maxavg.audit.csv/1";
pub const SWEEP_CSV: &str = "maxavg.sweep.csv/1";
pub const MAP_CSV: &str = "maxavg.exponent_map.csv/1";
pub const BOUNDARY_CSV: &str = "maxavg.region_boundary.csv/1";
pub const SCHEDULE_CSV: &str = "maxavg.schedule.csv/1";

/// A CSV table held in memory until written.
#[derive(Clone, Debug)]
pub struct Table {
    pub schema: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &'static str, header: &[&'static str]) -> Self {
        Table {
            schema,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| LabError::Io(e.into_error()))
    }
}

/// Flat JSON object. Keys are sorted on output.
#[derive(Clone, Debug)]
pub struct Summary {
    map: Map<String, Value>,
    files: Map<String, Value>,
}

impl Summary {
    pub fn new(schema: &str) -> Self {
        let mut map = Map::new();
        map.insert("schema".into(), Value::from(schema));
        Summary { map, files: Map::new() }
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.map.insert(key.into(), v.into());
        self
    }

    /// Floats that are not finite become `null`.
    pub fn put_f64(&mut self, key: &str, v: f64) -> &mut Self {
        let val = serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null);
        self.map.insert(key.into(), val);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    pub fn attach(&mut self, file: &str, schema: &str) {
        self.files.insert(file.into(), Value::from(schema));
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut m = self.map.clone();
        if !self.files.is_empty() {
            // The one nested value: file name to schema id.
            m.insert("files".into(), Value::Object(self.files.clone()));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m))?;
        s.push('\n');
        Ok(s.into_bytes())
    }
}

/// A summary plus its tables, written into one directory.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub name: String,
    pub summary: Summary,
    pub tables: Vec<(String, Table)>,
    pub texts: Vec<(String, String)>,
}

impl Bundle {
    pub fn new(name: &str, schema: &str) -> Self {
        Bundle {
            name: name.into(),
            summary: Summary::new(schema),
            tables: Vec::new(),
            texts: Vec::new(),
        }
    }

    pub fn table(&mut self, file: &str, t: Table) {
        self.summary.attach(file, t.schema);
        self.tables.push((file.into(), t));
    }

    pub fn text(&mut self, file: &str, schema: &str, body: String) {
        self.summary.attach(file, schema);
        self.texts.push((file.into(), body));
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (f, t) in &self.tables {
            let p = dir.join(f);
            fs::write(&p, t.to_bytes()?)?;
            out.push(p);
        }
        for (f, body) in &self.texts {
            let p = dir.join(f);
            fs::write(&p, body)?;
            out.push(p);
        }
        let p = dir.join(format!("{}.json", self.name));
        fs::write(&p, self.summary.to_bytes()?)?;
        out.push(p);
        Ok(out)
    }
}

/// Shortest round-trip decimal; negative zero prints as `0`.
pub fn num(v: f64) -> String {
    format!("{}", if v == 0.0 { 0.0 } else { v })
}

pub fn decay_table(samples: &[(f64, MultiplierValue)]) -> Table {
    let mut t = Table::new(DECAY_CSV, &["lambda", "re_m", "im_m", "abs_m"]);
    for (l, m) in samples {
        t.push(vec![num(*l), num(m.value.re), num(m.value.im), num(m.value.norm())]);
    }
    t
}

pub fn audit_table(audits: &[OverlapAudit]) -> Table {
    let mut t = Table::new(AUDIT_CSV, &["lambda", "h", "samples", "max_overlap", "disjoint_beyond"]);
    for a in audits {
        t.push(vec![
            num(a.lambda),
            num(a.h),
            a.samples.to_string(),
            a.max_overlap.to_string(),
            num(a.disjoint_beyond),
        ]);
    }
    t
}

pub fn sweep_table(records: &[SweepRecord]) -> Table {
    let mut t = Table::new(
        SWEEP_CSV,
        &["family", "n", "delta", "inv_p", "inv_q", "fp_norm", "norm_lb", "stderr", "samples"],
    );
    for r in records {
        t.push(vec![
            r.family.name().into(),
            r.n.to_string(),
            num(r.delta),
            num(r.inv_p),
            num(r.inv_q),
            num(r.fp_norm),
            num(r.norm_lb),
            num(r.stderr),
            r.samples.to_string(),
        ]);
    }
    t
}

pub const SET_TEXT: &str = "maxavg.set.txt/1";

/// `[set]` block with `family`, `delta`, `n`, `inflation` and `seed`.
pub fn set_block(desc: &SetDescriptor, seed: u64) -> String {
    format!(
        "[set]\nfamily = {}\ndelta = {}\nn = {}\ninflation = {}\nseed = {}\n",
        desc.family.name(),
        desc.delta,
        desc.n,
        desc.inflation,
        seed
    )
}

/// Fields of one set block: family, delta, n, inflation, seed.
pub fn parse_set_block(text: &str) -> Result<(Family, f64, usize, f64, u64)> {
    let c = Config::parse(text)?;
    let get = |k: &str| c.get(&format!("set.{k}")).ok_or_else(|| LabError::input(format!("set block lacks {k}")));
    let bad = |k: &str| LabError::input(format!("set block has a bad {k}"));
    let family = parse_family(get("family")?)?;
    Ok((
        family,
        get("delta")?.parse().map_err(|_| bad("delta"))?,
        get("n")?.parse().map_err(|_| bad("n"))?,
        get("inflation")?.parse().map_err(|_| bad("inflation"))?,
        get("seed")?.parse().map_err(|_| bad("seed"))?,
    ))
}

/// Splits a file of consecutive `[set]` blocks and parses each one.
pub fn parse_set_blocks(text: &str) -> Result<Vec<(Family, f64, usize, f64, u64)>> {
    let mut blocks: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.trim() == "[set]" {
            blocks.push(String::new());
        }
        match blocks.last_mut() {
            Some(b) => {
                b.push_str(line);
                b.push('\n');
            }
            None if line.trim().is_empty() || line.trim_start().starts_with('#') => {}
            None => return Err(LabError::input("set file must start with [set]")),
        }
    }
    blocks.iter().map(|b| parse_set_block(b)).collect()
}

pub fn parse_family(s: &str) -> Result<Family> {
    match s {
        "a" | "a_neighborhood" => Ok(Family::A),
        "b" | "b_knapp" => Ok(Family::B),
        "c" | "c_smallball" => Ok(Family::C),
        other => Err(LabError::input(format!("unknown family '{other}'"))),
    }
}
