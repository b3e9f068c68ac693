//! Run configuration: defaults, `key = value` files, JSON files and
//! command-line overrides, resolved into one canonical echo.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use flagdyn::curve::{Chart, DEDUP_TOL};
use flagdyn::deformation::{COBOUNDARY_TOL, LINEAR_RELATION_TOL, PURE_TOL, RANK_TOL};
use flagdyn::foliation::{FLAG_TOL, HIT_TOL};
use flagdyn::representation::{FINGERPRINT_GRID, RELATION_TOL, SPECTRAL_GATE, UNIMODULAR_LOG_TOL};
use serde_json::Value;

/// Longest word length any stage will sweep.
pub const MAX_LEN_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleMode {
    Zero,
    Coboundary,
    Solved,
    File,
}

impl std::str::FromStr for CocycleMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "zero" => CocycleMode::Zero,
            "coboundary" => CocycleMode::Coboundary,
            "solved" => CocycleMode::Solved,
            "file" => CocycleMode::File,
            _ => bail!("unknown mode {s:?}, expected zero, coboundary, solved or file"),
        })
    }
}

impl std::fmt::Display for CocycleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CocycleMode::Zero => "zero",
            CocycleMode::Coboundary => "coboundary",
            CocycleMode::Solved => "solved",
            CocycleMode::File => "file",
        })
    }
}

/// Twist of one generator's linear part by a homothety.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwistAmount {
    /// `log` of the homothety factor.
    Log(f64),
    /// The generator's own spectral radius: the edge of the hyperbolic range.
    Boundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub genus: usize,
    pub mode: CocycleMode,
    pub seed: u64,
    pub amplitude: f64,
    pub coboundary_p: [f64; 2],
    pub cocycle_file: Option<PathBuf>,
    pub twist_index: Option<usize>,
    pub twist: TwistAmount,
    pub max_len: usize,
    pub csv_max_len: usize,
    pub chart: Chart,
    pub window: [f64; 4],
    pub svg_size: u32,
    pub equivariance_samples: usize,
    pub f_samples: usize,
    pub flag_samples: usize,
    pub flag_seed: u64,
    pub orbit_max_len: usize,
    pub orbit_per_length: usize,
    /// Largest accepted `‖relator − I‖` when certifying.
    pub relation_tol: f64,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            genus: 2,
            mode: CocycleMode::Solved,
            seed: 42,
            amplitude: 0.1,
            coboundary_p: [3.0, -1.0],
            cocycle_file: None,
            twist_index: None,
            twist: TwistAmount::Log(0.0),
            max_len: 8,
            csv_max_len: 6,
            chart: Chart::X,
            window: [-2.0, -2.0, 2.0, 2.0],
            svg_size: 800,
            equivariance_samples: 2000,
            f_samples: 100,
            flag_samples: 10_000,
            flag_seed: 42,
            orbit_max_len: 8,
            orbit_per_length: 64,
            relation_tol: RELATION_TOL,
            out: PathBuf::from("out"),
            threads: None,
        }
    }
}

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("genus", "surface genus (only 2 is supported)"),
    ("mode", "cocycle: zero | coboundary | solved | file"),
    ("seed", "seed for the solved cocycle"),
    ("amplitude", "Euclidean norm of the solved cocycle"),
    ("coboundary_p", "point p for mode=coboundary, as x,y"),
    ("cocycle_file", "representation JSON for mode=file"),
    ("twist_index", "generator whose linear part is twisted (empty for none)"),
    ("twist_log", "log of the twist homothety, or 'boundary'"),
    ("max_len", "word length for sweeps (at most 10)"),
    ("csv_max_len", "word length cap for rows of curve.csv (clamped to max_len)"),
    ("chart", "affine chart for the SVG: x | y | z"),
    ("window", "SVG window x0,y0,x1,y1 in chart coordinates"),
    ("svg_size", "SVG width and height in pixels"),
    ("equivariance_samples", "curve samples pushed through each generator"),
    ("f_samples", "random (word, point) pairs for the conjugacy check"),
    ("flag_samples", "random flags to classify"),
    ("flag_seed", "seed for flag sampling and the orbit probe"),
    ("orbit_max_len", "longest word in the orbit probe"),
    ("orbit_per_length", "random words per length in the orbit probe"),
    ("relation_tol", "largest accepted relation residual when certifying"),
    ("out", "output directory"),
    ("threads", "worker threads (empty for all cores)"),
];

fn parse_pair(v: &str) -> Result<[f64; 2]> {
    let xs = parse_floats(v)?;
    xs.try_into().map_err(|_| anyhow!("expected two numbers x,y, got {v:?}"))
}

fn parse_floats(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number {x:?}")))
        .collect()
}

fn parse_window(v: &str) -> Result<[f64; 4]> {
    let xs = parse_floats(v)?;
    let w: [f64; 4] = xs.try_into().map_err(|_| anyhow!("expected x0,y0,x1,y1, got {v:?}"))?;
    if !(w[0] < w[2] && w[1] < w[3]) {
        bail!("window must satisfy x0 < x1 and y0 < y1, got {v:?}");
    }
    Ok(w)
}

fn fmt_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let ctx = || format!("config key {key:?} = {v:?}");
        match key {
            "genus" => self.genus = v.parse().with_context(ctx)?,
            "mode" => self.mode = v.parse().with_context(ctx)?,
            "seed" => self.seed = v.parse().with_context(ctx)?,
            "amplitude" => self.amplitude = v.parse().with_context(ctx)?,
            "coboundary_p" => self.coboundary_p = parse_pair(v).with_context(ctx)?,
            "cocycle_file" => self.cocycle_file = (!v.is_empty()).then(|| PathBuf::from(v)),
            "twist_index" => {
                self.twist_index = if v.is_empty() { None } else { Some(v.parse().with_context(ctx)?) }
            }
            "twist_log" => {
                self.twist = if v == "boundary" {
                    TwistAmount::Boundary
                } else {
                    TwistAmount::Log(v.parse().with_context(ctx)?)
                }
            }
            "max_len" => self.max_len = v.parse().with_context(ctx)?,
            "csv_max_len" => self.csv_max_len = v.parse().with_context(ctx)?,
            "chart" => self.chart = v.parse().map_err(|e: String| anyhow!(e)).with_context(ctx)?,
            "window" | "zoom" => self.window = parse_window(v).with_context(ctx)?,
            "svg_size" => self.svg_size = v.parse().with_context(ctx)?,
            "equivariance_samples" => self.equivariance_samples = v.parse().with_context(ctx)?,
            "f_samples" => self.f_samples = v.parse().with_context(ctx)?,
            "flag_samples" => self.flag_samples = v.parse().with_context(ctx)?,
            "flag_seed" => self.flag_seed = v.parse().with_context(ctx)?,
            "orbit_max_len" => self.orbit_max_len = v.parse().with_context(ctx)?,
            "orbit_per_length" => self.orbit_per_length = v.parse().with_context(ctx)?,
            "relation_tol" => self.relation_tol = v.parse().with_context(ctx)?,
            "out" => self.out = PathBuf::from(v),
            "threads" => self.threads = if v.is_empty() { None } else { Some(v.parse().with_context(ctx)?) },
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    /// Apply a config file: a JSON object, or `key = value` lines with `#`
    /// comments.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        if text.trim_start().starts_with('{') {
            let obj: BTreeMap<String, Value> = serde_json::from_str(text).context("config is not a JSON object")?;
            for (k, v) in obj {
                let s = match v {
                    Value::String(s) => s,
                    Value::Null => String::new(),
                    Value::Array(xs) => xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                    other => other.to_string(),
                };
                self.set(&k, &s)?;
            }
            return Ok(());
        }
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key = value, got {raw:?}", n + 1))?;
            self.set(k.trim(), v).with_context(|| format!("config line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.genus != 2 {
            bail!("genus {} is not supported, only 2", self.genus);
        }
        if self.max_len == 0 || self.max_len > MAX_LEN_CAP {
            bail!("max_len must be in 1..={MAX_LEN_CAP}, got {}", self.max_len);
        }
        if self.orbit_max_len > MAX_LEN_CAP {
            bail!("orbit_max_len must be at most {MAX_LEN_CAP}");
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            bail!("amplitude must be finite and non-negative");
        }
        if self.mode == CocycleMode::File && self.cocycle_file.is_none() {
            bail!("mode=file needs cocycle_file");
        }
        if let Some(i) = self.twist_index {
            if i >= 2 * self.genus {
                bail!("twist_index {i} out of range for genus {}", self.genus);
            }
        }
        if !(self.relation_tol.is_finite() && self.relation_tol > 0.0) {
            bail!("relation_tol must be finite and positive");
        }
        if self.svg_size == 0 {
            bail!("svg_size must be positive");
        }
        Ok(())
    }

    /// Canonical `key → value` form of every setting.
    pub fn echo(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("genus", self.genus.to_string());
        m.insert("mode", self.mode.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("amplitude", self.amplitude.to_string());
        m.insert("coboundary_p", fmt_floats(&self.coboundary_p));
        m.insert(
            "cocycle_file",
            self.cocycle_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        );
        m.insert("twist_index", self.twist_index.map(|i| i.to_string()).unwrap_or_default());
        m.insert(
            "twist_log",
            match self.twist {
                TwistAmount::Boundary => "boundary".to_string(),
                TwistAmount::Log(x) => x.to_string(),
            },
        );
        m.insert("max_len", self.max_len.to_string());
        m.insert("csv_max_len", self.csv_max_len.to_string());
        m.insert("chart", self.chart.to_string());
        m.insert("window", fmt_floats(&self.window));
        m.insert("svg_size", self.svg_size.to_string());
        m.insert("equivariance_samples", self.equivariance_samples.to_string());
        m.insert("f_samples", self.f_samples.to_string());
        m.insert("flag_samples", self.flag_samples.to_string());
        m.insert("flag_seed", self.flag_seed.to_string());
        m.insert("orbit_max_len", self.orbit_max_len.to_string());
        m.insert("orbit_per_length", self.orbit_per_length.to_string());
        m.insert("relation_tol", self.relation_tol.to_string());
        m
    }

    /// Fixed tolerances of the library, recorded next to the echo.
    pub fn library_tolerances() -> BTreeMap<&'static str, f64> {
        BTreeMap::from([
            ("spectral_gate", SPECTRAL_GATE),
            ("fingerprint_grid", FINGERPRINT_GRID),
            ("unimodular_log", UNIMODULAR_LOG_TOL),
            ("rank", RANK_TOL),
            ("linear_relation", LINEAR_RELATION_TOL),
            ("coboundary", COBOUNDARY_TOL),
            ("pure", PURE_TOL),
            ("curve_dedup", DEDUP_TOL),
            ("flag", FLAG_TOL),
            ("hit", HIT_TOL),
        ])
    }

    /// The echo as a JSON object. `out` and `threads` are left out: they
    /// do not change any output byte.
    pub fn echo_json(&self) -> Value {
        let mut m: serde_json::Map<String, Value> =
            self.echo().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
        m.insert("library_tolerances".into(), serde_json::json!(Self::library_tolerances()));
        Value::Object(m)
    }

    /// The echo in `key = value` form, re-readable by [`RunConfig::apply_text`].
    pub fn echo_text(&self) -> String {
        self.echo().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Text listing every key and its default, for `--help`.
pub fn defaults_help() -> String {
    let d = RunConfig::default().echo();
    let mut s = String::from("Config keys (key = value per line, or a JSON object) and defaults:\n");
    for (k, desc) in KEYS {
        let v = match *k {
            "out" => "out".to_string(),
            "threads" => String::new(),
            _ => d.get(k).cloned().unwrap_or_default(),
        };
        s.push_str(&format!("  {k:<22} {v:<16} {desc}\n"));
    }
    s
}
