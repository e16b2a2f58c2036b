//! TOML run configuration.
//!
//! ```toml
//! [grid]
//! n = 32
//!
//! [solver]
//! dt = 0.001
//! t_end = 1.0
//! ic_kind = "taylor_green"   # taylor_green | shear | buoyant_mode | random_band
//! ic_amplitude = 1.0
//! theta_amplitude = 0.0
//! rng_seed = 0
//! nu = 1.0
//! kappa = 1.0
//! snapshot_every = 0         # 0 disables snapshots
//!
//! [monitor]
//! sample_every = 10
//! t0 = 0.0
//!
//! [corpus]
//! grids = [32]
//! families = ["single_mode", "dyadic_shell", "gaussian_bump", "random_band", "taylor_green_slice"]
//! count = 4
//! seed = 20260
//!
//! [output]
//! dir = "out"
//! ```
//!
//! `[grid]` and `[solver]` are required; every key has a default.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::lab::{CorpusSpec, Family};
use crate::solver::{IcKind, SolverConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorSettings {
    /// Start of the window used for `F(t)` and the Gronwall report.
    pub t0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub monitor: MonitorSettings,
    pub corpus: CorpusSpec,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solver: SolverConfig::default(),
            monitor: MonitorSettings { t0: 0.0 },
            corpus: CorpusSpec::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Makes a relative output directory relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
    }
}

const SECTIONS: [(&str, bool, &[&str]); 5] = [
    ("grid", true, &["n"]),
    (
        "solver",
        true,
        &["dt", "t_end", "ic_kind", "ic_amplitude", "theta_amplitude", "rng_seed", "nu", "kappa", "snapshot_every"],
    ),
    ("monitor", false, &["sample_every", "t0"]),
    ("corpus", false, &["grids", "families", "count", "seed"]),
    ("output", false, &["dir"]),
];

struct Reader<'a> {
    root: &'a Table,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn value(&self, section: &str, key: &str) -> Option<&'a Value> {
        self.root.get(section).and_then(Value::as_table).and_then(|t| t.get(key))
    }

    fn mismatch(&mut self, section: &str, key: &str, expected: &str, found: &Value) {
        self.errors.push(format!("{section}.{key}: expected {expected}, found {}", found.type_str()));
    }

    fn float(&mut self, section: &str, key: &str, slot: &mut f64) {
        match self.value(section, key) {
            None => {}
            Some(Value::Float(v)) => *slot = *v,
            Some(Value::Integer(v)) => *slot = *v as f64,
            Some(other) => self.mismatch(section, key, "a number", other),
        }
    }

    fn int(&mut self, section: &str, key: &str) -> Option<u64> {
        match self.value(section, key) {
            None => None,
            Some(Value::Integer(v)) if *v >= 0 => Some(*v as u64),
            Some(Value::Integer(v)) => {
                self.errors.push(format!("{section}.{key}: must be nonnegative, got {v}"));
                None
            }
            Some(other) => {
                self.mismatch(section, key, "an integer", other);
                None
            }
        }
    }

    fn usize(&mut self, section: &str, key: &str, slot: &mut usize) {
        if let Some(v) = self.int(section, key) {
            *slot = v as usize;
        }
    }

    fn string(&mut self, section: &str, key: &str) -> Option<&'a str> {
        match self.value(section, key) {
            None => None,
            Some(Value::String(s)) => Some(s),
            Some(other) => {
                self.mismatch(section, key, "a string", other);
                None
            }
        }
    }

    fn array(&mut self, section: &str, key: &str) -> Option<&'a Vec<Value>> {
        match self.value(section, key) {
            None => None,
            Some(Value::Array(a)) => Some(a),
            Some(other) => {
                self.mismatch(section, key, "an array", other);
                None
            }
        }
    }
}

/// Parses and validates a configuration, reporting every problem found.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))?;
    let mut r = Reader { root: &root, errors: Vec::new() };

    for (name, value) in &root {
        match SECTIONS.iter().find(|(s, _, _)| s == name) {
            None => r.errors.push(format!("unknown section [{name}]")),
            Some((_, _, keys)) => match value.as_table() {
                None => r.errors.push(format!("{name}: expected a section, found {}", value.type_str())),
                Some(table) => {
                    for key in table.keys().filter(|k| !keys.contains(&k.as_str())) {
                        r.errors.push(format!("unknown key {name}.{key}"));
                    }
                }
            },
        }
    }
    for (name, required, _) in SECTIONS {
        if required && !root.contains_key(name) {
            r.errors.push(format!("missing required section [{name}]"));
        }
    }

    let mut config = RunConfig::default();
    let s = &mut config.solver;
    r.usize("grid", "n", &mut s.n);
    r.float("solver", "dt", &mut s.dt);
    r.float("solver", "t_end", &mut s.t_end);
    if let Some(kind) = r.string("solver", "ic_kind") {
        match kind.parse::<IcKind>() {
            Ok(k) => s.ic_kind = k,
            Err(e) => r.errors.push(format!("solver.ic_kind: {e}")),
        }
    }
    r.float("solver", "ic_amplitude", &mut s.ic_amplitude);
    r.float("solver", "theta_amplitude", &mut s.theta_amplitude);
    if let Some(seed) = r.int("solver", "rng_seed") {
        s.rng_seed = seed;
    }
    r.float("solver", "nu", &mut s.nu);
    r.float("solver", "kappa", &mut s.kappa);
    r.usize("solver", "snapshot_every", &mut s.snapshot_every);
    r.usize("monitor", "sample_every", &mut s.sample_every);
    r.float("monitor", "t0", &mut config.monitor.t0);

    let c = &mut config.corpus;
    if let Some(grids) = r.array("corpus", "grids") {
        c.grids.clear();
        for v in grids {
            match v.as_integer() {
                Some(n) if n > 0 => c.grids.push(n as usize),
                _ => r.errors.push(format!("corpus.grids: expected positive integers, found {v}")),
            }
        }
    }
    if let Some(families) = r.array("corpus", "families") {
        c.families.clear();
        for v in families {
            match v.as_str().map(str::parse::<Family>) {
                Some(Ok(f)) => c.families.push(f),
                Some(Err(e)) => r.errors.push(format!("corpus.families: {e}")),
                None => r.errors.push(format!("corpus.families: expected strings, found {v}")),
            }
        }
    }
    r.usize("corpus", "count", &mut c.count);
    if let Some(seed) = r.int("corpus", "seed") {
        c.seed = seed;
    }
    if let Some(dir) = r.string("output", "dir") {
        config.output_dir = PathBuf::from(dir);
    }

    // Keys that failed to parse kept their defaults, so range checks still
    // make sense and all problems come back together.
    let mut errors = r.errors;
    for check in [config.solver.validate(), config.corpus.validate()] {
        if let Err(Error::Config(list)) = check {
            errors.extend(list);
        }
    }
    if !(config.monitor.t0 >= 0.0) {
        errors.push(format!("monitor.t0: must be nonnegative, got {}", config.monitor.t0));
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(Error::Config(errors))
    }
}

fn quoted(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

/// Renders every key, so `parse_config(render_config(c)) == c`.
pub fn render_config(config: &RunConfig) -> String {
    let s = &config.solver;
    let c = &config.corpus;
    let grids: Vec<String> = c.grids.iter().map(ToString::to_string).collect();
    let families: Vec<String> = c.families.iter().map(|f| quoted(f.name())).collect();
    format!(
        "[grid]\nn = {}\n\n\
         [solver]\ndt = {:?}\nt_end = {:?}\nic_kind = {}\nic_amplitude = {:?}\ntheta_amplitude = {:?}\n\
         rng_seed = {}\nnu = {:?}\nkappa = {:?}\nsnapshot_every = {}\n\n\
         [monitor]\nsample_every = {}\nt0 = {:?}\n\n\
         [corpus]\ngrids = [{}]\nfamilies = [{}]\ncount = {}\nseed = {}\n\n\
         [output]\ndir = {}\n",
        s.n,
        s.dt,
        s.t_end,
        quoted(s.ic_kind.name()),
        s.ic_amplitude,
        s.theta_amplitude,
        s.rng_seed,
        s.nu,
        s.kappa,
        s.snapshot_every,
        s.sample_every,
        config.monitor.t0,
        grids.join(", "),
        families.join(", "),
        c.count,
        c.seed,
        quoted(&config.output_dir.to_string_lossy()),
    )
}
