//! Pipeline stages. Each stage reads the JSON artifacts of the stage before
//! it from the output directory and writes its own.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use flagdyn::curve::{
    equivariance_check, f_equivariance_residual, regularity_probe, render_svg, sample_curve, write_csv, JordanCurve,
    SvgOptions,
};
use flagdyn::deformation::{coboundary, is_pure, solve_cocycle};
use flagdyn::foliation::{classify_flags, constructed_witness, orbit_accumulation_probe, CurveIndex, FoliationError};
use flagdyn::representation::{build_fuchsian, check_hyperbolic, RepresentationDoc};
use flagdyn::Representation;
use serde_json::{json, Value};

use crate::config::{CocycleMode, RunConfig, TwistAmount};

pub const FUCHSIAN_JSON: &str = "fuchsian.json";
pub const REPRESENTATION_JSON: &str = "representation.json";
pub const DEFORMATION_JSON: &str = "deformation.json";
pub const HYPERBOLICITY_JSON: &str = "hyperbolicity.json";
pub const CURVE_CSV: &str = "curve.csv";
pub const CURVE_JSON: &str = "curve.json";
pub const CURVE_SVG: &str = "curve.svg";
pub const FOLIATION_JSON: &str = "foliation.json";
pub const ERROR_JSON: &str = "error.json";

/// Words of this length at most are used in the conjugacy check.
const F_WORD_LEN: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Gen,
    Deform,
    Certify,
    Curve,
    Render,
    Foliate,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Gen => "gen",
            Stage::Deform => "deform",
            Stage::Certify => "certify",
            Stage::Curve => "curve",
            Stage::Render => "render",
            Stage::Foliate => "foliate",
        }
    }
}

/// A certificate that did not pass. The stage still wrote its report.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateFailure {
    pub stage: Stage,
    pub reason: String,
    /// Offending words, shortest first.
    pub words: Vec<String>,
}

pub type StageResult = Result<Option<CertificateFailure>>;

fn path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn write_json(cfg: &RunConfig, name: &str, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_text(&path(cfg, name), &s)
}

fn write_text(p: &Path, s: &str) -> Result<()> {
    fs::write(p, s).with_context(|| format!("writing {}", p.display()))
}

fn read_text(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {} (run the previous stage first)", p.display()))
}

fn load_rep(p: &Path) -> Result<Representation> {
    Representation::from_json(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))
}

/// Representation document with the config echo and hash attached.
fn rep_document(cfg: &RunConfig, rep: &Representation, more: &[(&str, Value)]) -> String {
    let mut doc: RepresentationDoc = rep.to_document();
    doc.extra.insert("config".into(), cfg.echo_json());
    doc.extra.insert("representation_hash".into(), Value::String(rep.content_hash()));
    for (k, v) in more {
        doc.extra.insert((*k).into(), v.clone());
    }
    let mut s = doc.to_json();
    s.push('\n');
    s
}

fn header(cfg: &RunConfig, rep: &Representation) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("config".into(), cfg.echo_json());
    m.insert("representation_hash".into(), Value::String(rep.content_hash()));
    m
}

fn with_header(cfg: &RunConfig, rep: &Representation, body: Value) -> Value {
    let mut m = header(cfg, rep);
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

pub fn gen(cfg: &RunConfig) -> StageResult {
    let rep = build_fuchsian(cfg.genus)?;
    let traces: Vec<f64> = rep.generators().iter().map(|g| g.linear.trace()).collect();
    let more = [
        ("traces", json!(traces)),
        ("relation_residual", json!(rep.relation_residual())),
    ];
    write_text(&path(cfg, FUCHSIAN_JSON), &rep_document(cfg, &rep, &more))?;
    Ok(None)
}

fn apply_twist(cfg: &RunConfig, rep: Representation) -> Result<Representation> {
    let Some(i) = cfg.twist_index else {
        return Ok(rep);
    };
    Ok(match cfg.twist {
        TwistAmount::Log(x) => rep.twist_generator(i, x),
        TwistAmount::Boundary => rep.boundary_twist(i)?,
    })
}

pub fn deform(cfg: &RunConfig) -> StageResult {
    let (rep, cocycle) = match cfg.mode {
        CocycleMode::File => {
            let file = cfg.cocycle_file.as_ref().ok_or_else(|| anyhow!("mode=file needs cocycle_file"))?;
            let rep = apply_twist(cfg, load_rep(file)?)?;
            (rep, json!({"mode": "file", "source": file.display().to_string()}))
        }
        _ => {
            // Twist first: the homothety cancels in the linear relator, and
            // the cocycle is then solved against the twisted linear parts.
            let base = apply_twist(cfg, load_rep(&path(cfg, FUCHSIAN_JSON))?)?;
            let linear = base.linear_parts();
            let (t, info) = match cfg.mode {
                CocycleMode::Zero => (vec![[0.0; 2]; linear.len()], json!({"mode": "zero"})),
                CocycleMode::Coboundary => (
                    coboundary(&linear, cfg.coboundary_p),
                    json!({"mode": "coboundary", "p": cfg.coboundary_p}),
                ),
                _ => {
                    let sol = solve_cocycle(&linear, cfg.seed, cfg.amplitude)?;
                    let info = json!({
                        "mode": "solved",
                        "seed": sol.seed,
                        "amplitude": sol.amplitude,
                        "solution_dimension": sol.basis.len(),
                        "pure_dimension": sol.pure_dimension,
                    });
                    (sol.t, info)
                }
            };
            let mut info = info;
            info["base_hash"] = Value::String(base.content_hash());
            (base.attach_cocycle(&t)?, info)
        }
    };
    let purity = is_pure(&rep);
    let relation_residual = rep.relation_residual();
    let more = [("cocycle", cocycle.clone())];
    write_text(&path(cfg, REPRESENTATION_JSON), &rep_document(cfg, &rep, &more))?;
    let report = with_header(
        cfg,
        &rep,
        json!({
            "cocycle": cocycle,
            "translations": rep.cocycle(),
            "relation_residual": relation_residual,
            "purity": purity,
            "log_det_character": rep.log_det_character(),
        }),
    );
    write_json(cfg, DEFORMATION_JSON, &report)?;
    Ok(None)
}

pub fn certify(cfg: &RunConfig) -> StageResult {
    let rep = load_rep(&path(cfg, REPRESENTATION_JSON))?;
    let relation_residual = rep.relation_residual();
    let relation_ok = relation_residual <= cfg.relation_tol;
    let report = check_hyperbolic(&rep, cfg.max_len)?;
    let certified = relation_ok && report.is_certified();
    let out = with_header(
        cfg,
        &rep,
        json!({
            "certified": certified,
            "relation_residual": relation_residual,
            "relation_ok": relation_ok,
            "hyperbolicity": report,
        }),
    );
    write_json(cfg, HYPERBOLICITY_JSON, &out)?;
    if !relation_ok {
        return Ok(Some(CertificateFailure {
            stage: Stage::Certify,
            reason: format!("surface relation fails: residual {relation_residual:e} above {:e}", cfg.relation_tol),
            words: vec![rep.relator().to_string()],
        }));
    }
    if !report.is_certified() {
        let mut words: Vec<String> = report.violations.iter().map(|v| v.word.to_string()).collect();
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        return Ok(Some(CertificateFailure {
            stage: Stage::Certify,
            reason: format!(
                "{} element(s) of word length at most {} are not saddles",
                report.violations.len(),
                cfg.max_len
            ),
            words,
        }));
    }
    Ok(None)
}

fn load_curve(cfg: &RunConfig) -> Result<(Representation, JordanCurve)> {
    let rep = load_rep(&path(cfg, REPRESENTATION_JSON))?;
    let curve = sample_curve(&rep, cfg.max_len)?;
    Ok((rep, curve))
}

pub fn curve(cfg: &RunConfig) -> StageResult {
    let (rep, curve) = load_curve(cfg)?;
    curve_with(cfg, &rep, &curve)
}

fn curve_with(cfg: &RunConfig, rep: &Representation, curve: &JordanCurve) -> StageResult {
    let csv_len = cfg.csv_max_len.min(curve.max_word_len());
    let rows: Vec<_> = curve
        .samples()
        .iter()
        .filter(|s| s.word_len() <= csv_len)
        .copied()
        .collect();
    let csv_curve = JordanCurve::from_samples(rows, csv_len, rep.content_hash());
    let file = fs::File::create(path(cfg, CURVE_CSV)).context("creating curve.csv")?;
    write_csv(&csv_curve, file)?;

    let equivariance = equivariance_check(curve, rep, cfg.equivariance_samples);
    let f_residual = f_equivariance_residual(curve, rep, cfg.f_samples, F_WORD_LEN, cfg.seed)?;
    let regularity = match regularity_probe(curve) {
        Ok(r) => json!(r),
        Err(e) => json!({"skipped": e.to_string()}),
    };
    let out = with_header(
        cfg,
        rep,
        json!({
            "samples": curve.len(),
            "max_word_len": curve.max_word_len(),
            "csv_rows": csv_curve.len(),
            "csv_max_word_len": csv_len,
            "max_abs_delta": curve.max_abs_delta(),
            "max_theta_gap": curve.max_theta_gap(),
            "equivariance": equivariance,
            "f_equivariance": {
                "samples": cfg.f_samples,
                "max_word_len": F_WORD_LEN,
                "seed": cfg.seed,
                "max_residual": f_residual,
            },
            "regularity": regularity,
        }),
    );
    write_json(cfg, CURVE_JSON, &out)?;
    Ok(None)
}

pub fn svg_options(cfg: &RunConfig) -> SvgOptions {
    SvgOptions {
        chart: cfg.chart,
        window: cfg.window,
        width: cfg.svg_size,
        height: cfg.svg_size,
        ..SvgOptions::default()
    }
}

pub fn render(cfg: &RunConfig) -> StageResult {
    let (rep, curve) = load_curve(cfg)?;
    render_with(cfg, &rep, &curve)
}

fn render_with(cfg: &RunConfig, rep: &Representation, curve: &JordanCurve) -> StageResult {
    let svg = render_svg(curve, &svg_options(cfg))?;
    let meta = serde_json::to_string(&Value::Object(header(cfg, rep)))?;
    // "--" may not appear inside an XML comment.
    let meta = format!("<metadata><!-- {} --></metadata>\n", meta.replace("--", "- -"));
    let at = svg.find('\n').map(|i| i + 1).unwrap_or(0);
    let mut doc = String::with_capacity(svg.len() + meta.len());
    doc.push_str(&svg[..at]);
    doc.push_str(&meta);
    doc.push_str(&svg[at..]);
    write_text(&path(cfg, CURVE_SVG), &doc)?;
    Ok(None)
}

pub fn foliate(cfg: &RunConfig) -> StageResult {
    let (rep, curve) = load_curve(cfg)?;
    foliate_with(cfg, &rep, &curve)
}

fn foliate_with(cfg: &RunConfig, rep: &Representation, curve: &JordanCurve) -> StageResult {
    let purity = is_pure(rep);
    let body = match classify_flags(rep, curve, cfg.flag_samples, cfg.flag_seed) {
        Err(FoliationError::Refused { diagnosis }) => json!({
            "status": "refused",
            "diagnosis": diagnosis,
            "purity": purity,
        }),
        Err(e) => return Err(e.into()),
        Ok(c) => {
            let index = CurveIndex::new(curve)?;
            let constructed = match constructed_witness(rep, &index) {
                Ok(w) => json!(w),
                Err(e) => json!({"missing": e.to_string()}),
            };
            let probe = orbit_accumulation_probe(
                rep,
                curve,
                &c.witness_distinct.flag,
                cfg.orbit_max_len,
                cfg.orbit_per_length,
                cfg.flag_seed,
            )?;
            json!({
                "status": "classified",
                "purity": purity,
                "classification": c,
                "constructed_witness": constructed,
                "orbit_probe": probe,
            })
        }
    };
    write_json(cfg, FOLIATION_JSON, &with_header(cfg, rep, body))?;
    Ok(None)
}

/// Run every stage in order, stopping at the first failed certificate.
/// The curve is sampled once and shared by the later stages.
pub fn all(cfg: &RunConfig) -> StageResult {
    for stage in [gen, deform, certify] {
        if let Some(f) = stage(cfg)? {
            return Ok(Some(f));
        }
    }
    let (rep, curve) = load_curve(cfg)?;
    for stage in [curve_with, render_with, foliate_with] {
        if let Some(f) = stage(cfg, &rep, &curve)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Run `f` on a pool of `cfg.threads` workers after validating the config
/// and creating the output directory.
pub fn run(cfg: &RunConfig, f: fn(&RunConfig) -> StageResult) -> StageResult {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    pool.install(|| f(cfg))
}

/// Machine-readable failure record.
pub fn write_error(cfg: &RunConfig, stage: &str, kind: &str, message: &str, words: &[String]) -> Result<()> {
    let v = json!({
        "stage": stage,
        "kind": kind,
        "message": message,
        "words": words,
        "config": cfg.echo_json(),
    });
    if !cfg.out.is_dir() {
        fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    }
    write_json(cfg, ERROR_JSON, &v)
}

/// Remove a stale `error.json` from an earlier run.
pub fn clear_error(cfg: &RunConfig) -> Result<()> {
    let p = path(cfg, ERROR_JSON);
    if p.exists() {
        fs::remove_file(&p).with_context(|| format!("removing {}", p.display()))?;
    }
    Ok(())
}

pub fn stage_fn(stage: Option<Stage>) -> fn(&RunConfig) -> StageResult {
    match stage {
        None => all,
        Some(Stage::Gen) => gen,
        Some(Stage::Deform) => deform,
        Some(Stage::Certify) => certify,
        Some(Stage::Curve) => curve,
        Some(Stage::Render) => render,
        Some(Stage::Foliate) => foliate,
    }
}
