//! The invariant Jordan curve, sampled as the graph of `δ` over ray
//! directions `θ ∈ [0, π)` from repelling fixed points.
//!
//! A sample at direction `θ` stands for the point `[cos θ : sin θ : δ(θ)]`.
//! Values at `θ + π` follow from `δ(θ + π) = −δ(θ)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{eig2, AffDualMap, ProjPoint};
use crate::numfmt::sig17;
use crate::representation::{sweep_partitions, Representation, RepresentationError, SPECTRAL_GATE};
use crate::words::{alphabet, Letter, PackedWord, Word};

/// Samples closer than this in both `θ` and `δ` are merged.
pub const DEDUP_TOL: f64 = 1e-10;
/// Fewest samples the regularity probe accepts.
pub const MIN_PROBE_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("linear part is not a saddle: eigenvalues {lambda1}, {lambda2}")]
    NotHyperbolic { lambda1: f64, lambda2: f64 },
    #[error("linear part has no real separated spectrum")]
    NoRealSpectrum,
    #[error("curve has no samples")]
    Empty,
    #[error("need at least {needed} samples, have {found}")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("curve CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `[v : s]` with `s = (w·v)/(λ − 1)`: the eigenline of the block matrix for
/// the eigenvalue `λ` of the linear part with eigenvector `v`.
fn eigen_point(m: &AffDualMap, lambda: f64, v: [f64; 2]) -> [f64; 3] {
    let w = m.translation;
    [v[0], v[1], (w[0] * v[0] + w[1] * v[1]) / (lambda - 1.0)]
}

fn saddle(m: &AffDualMap) -> Result<crate::algebra::EigenPair2, CurveError> {
    let e = eig2(m.linear).map_err(|_| CurveError::NoRealSpectrum)?;
    if e.lambda1.abs() > 1.0 + SPECTRAL_GATE && e.lambda2.abs() < 1.0 - SPECTRAL_GATE {
        Ok(e)
    } else {
        Err(CurveError::NotHyperbolic {
            lambda1: e.lambda1,
            lambda2: e.lambda2,
        })
    }
}

pub fn repelling_fixed_point(m: &AffDualMap) -> Result<ProjPoint, CurveError> {
    let e = saddle(m)?;
    Ok(ProjPoint::new(eigen_point(m, e.lambda2, e.v2)).expect("eigenvector is nonzero"))
}

pub fn attracting_fixed_point(m: &AffDualMap) -> Result<ProjPoint, CurveError> {
    let e = saddle(m)?;
    Ok(ProjPoint::new(eigen_point(m, e.lambda1, e.v1)).expect("eigenvector is nonzero"))
}

/// `(θ, δ)` of a point off the vertical through `0`, with `(x, y)` rescaled
/// to the unit vector at angle `θ ∈ [0, π)`.
pub fn graph_coords(p: [f64; 3]) -> Option<(f64, f64)> {
    let [x, y, z] = p;
    let r = x.hypot(y);
    if r == 0.0 {
        return None;
    }
    let mut theta = y.atan2(x);
    let mut sign = 1.0;
    if theta < 0.0 {
        theta += PI;
        sign = -1.0;
    }
    if theta >= PI {
        theta -= PI;
        sign = -sign;
    }
    Some((theta, sign * z / r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub theta: f64,
    pub delta: f64,
    /// Word whose repelling fixed point this is.
    pub word: PackedWord,
}

impl CurveSample {
    pub fn point(&self) -> ProjPoint {
        ProjPoint::new([self.theta.cos(), self.theta.sin(), self.delta]).expect("unit (x, y)")
    }

    pub fn word_len(&self) -> usize {
        self.word.len()
    }
}

/// Sampled `Λ`, sorted by `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanCurve {
    samples: Vec<CurveSample>,
    max_word_len: usize,
    representation_hash: String,
}

impl JordanCurve {
    /// Sorts and deduplicates `samples`.
    pub fn from_samples(mut samples: Vec<CurveSample>, max_word_len: usize, representation_hash: String) -> Self {
        samples.par_sort_unstable_by(|a, b| a.theta.total_cmp(&b.theta).then(a.word.cmp(&b.word)));
        JordanCurve {
            samples: dedup(samples),
            max_word_len,
            representation_hash,
        }
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    pub fn representation_hash(&self) -> &str {
        &self.representation_hash
    }

    pub fn max_abs_delta(&self) -> f64 {
        self.samples.iter().map(|s| s.delta.abs()).fold(0.0, f64::max)
    }

    /// Largest gap between consecutive directions, wrap-around included.
    pub fn max_theta_gap(&self) -> f64 {
        let n = self.samples.len();
        if n == 0 {
            return PI;
        }
        let wrap = self.samples[0].theta + PI - self.samples[n - 1].theta;
        self.samples
            .windows(2)
            .map(|w| w[1].theta - w[0].theta)
            .fold(wrap, f64::max)
    }

    /// `δ` at any angle, piecewise linear between samples.
    pub fn delta_at(&self, theta: f64) -> Result<f64, CurveError> {
        let t = theta.rem_euclid(2.0 * PI);
        if t >= PI {
            Ok(-self.delta_in_range(t - PI)?)
        } else {
            self.delta_in_range(t)
        }
    }

    fn delta_in_range(&self, theta: f64) -> Result<f64, CurveError> {
        let s = &self.samples;
        let n = s.len();
        if n == 0 {
            return Err(CurveError::Empty);
        }
        let i = s.partition_point(|x| x.theta <= theta);
        let (left, right) = if i == 0 {
            ((s[n - 1].theta - PI, -s[n - 1].delta), (s[0].theta, s[0].delta))
        } else if i == n {
            ((s[n - 1].theta, s[n - 1].delta), (s[0].theta + PI, -s[0].delta))
        } else {
            ((s[i - 1].theta, s[i - 1].delta), (s[i].theta, s[i].delta))
        };
        if theta == left.0 {
            return Ok(left.1);
        }
        let f = (theta - left.0) / (right.0 - left.0);
        Ok(left.1 + f * (right.1 - left.1))
    }

    /// The sample within `tol` of this direction, if any.
    pub fn sample_near(&self, theta: f64, tol: f64) -> Option<&CurveSample> {
        let i = self.samples.partition_point(|x| x.theta < theta - tol);
        self.samples.get(i).filter(|s| (s.theta - theta).abs() <= tol)
    }

    /// The conjugacy `(x, y, z) ↦ (x, y, z + δ(x, y))` with `δ` extended
    /// homogeneously; `0` is fixed.
    pub fn conjugacy_f(&self, p: &ProjPoint) -> Result<ProjPoint, CurveError> {
        let [x, y, z] = p.coords();
        let r = x.hypot(y);
        if r == 0.0 {
            return Ok(ProjPoint::ORIGIN);
        }
        let d = self.delta_at(y.atan2(x))?;
        Ok(ProjPoint::new([x, y, z + r * d]).expect("(x, y) nonzero"))
    }
}

fn dedup(sorted: Vec<CurveSample>) -> Vec<CurveSample> {
    let mut out: Vec<CurveSample> = Vec::with_capacity(sorted.len());
    let mut anchor: Option<(f64, f64)> = None;
    for s in sorted {
        if let (Some((t, d)), Some(last)) = (anchor, out.last_mut()) {
            let close = (s.theta - t).abs() <= DEDUP_TOL && (s.delta - d).abs() <= DEDUP_TOL;
            if close || s.theta == last.theta {
                if s.word < last.word {
                    *last = s;
                }
                continue;
            }
        }
        anchor = Some((s.theta, s.delta));
        out.push(s);
    }
    out
}

/// Repelling fixed points of every element of word length ≤ `max_len`.
pub fn sample_curve(rep: &Representation, max_len: usize) -> Result<JordanCurve, CurveError> {
    let parts = sweep_partitions(rep, max_len, Vec::new, |acc: &mut Vec<CurveSample>, w, m| {
        if w.is_empty() {
            return;
        }
        if let Ok(p) = repelling_fixed_point(m) {
            if let Some((theta, delta)) = graph_coords(p.coords()) {
                acc.push(CurveSample { theta, delta, word: w });
            }
        }
    })?;
    let samples: Vec<CurveSample> = parts.into_iter().flatten().collect();
    Ok(JordanCurve::from_samples(samples, max_len, rep.content_hash()))
}

/// Residuals of `δ(A(x, y)) = δ(x, y) + ux + vy` at curve samples.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub max_word_len: usize,
    /// Pairs whose image is itself a stored sample.
    pub matched_pairs: u64,
    pub matched_max_residual: f64,
    /// Pairs compared against the interpolated graph.
    pub interpolated_pairs: u64,
    pub interpolated_max_residual: f64,
}

/// `δ` of `t` expressed at direction `theta`, if both name the same ray up
/// to the seam at `0 ≡ π`.
fn same_direction(t: &CurveSample, theta: f64) -> Option<f64> {
    let diff = t.theta - theta;
    if diff.abs() <= DEDUP_TOL {
        Some(t.delta)
    } else if (diff.abs() - PI).abs() <= DEDUP_TOL {
        Some(-t.delta)
    } else {
        None
    }
}

/// Push samples through every generator letter and compare with the curve.
///
/// The image of the repelling fixed point of `γ'` under `ρ(ℓ)` is the
/// repelling fixed point of `ℓγ'ℓ⁻¹`; when that word was swept the stored
/// sample is used, otherwise `δ` is interpolated. Matching is by word only:
/// near the axes of short words the graph is steep enough that distinct
/// points share a direction to within the dedup tolerance.
pub fn equivariance_check(curve: &JordanCurve, rep: &Representation, n_samples: usize) -> EquivarianceReport {
    let samples = curve.samples();
    let mut report = EquivarianceReport {
        max_word_len: curve.max_word_len(),
        ..Default::default()
    };
    if samples.is_empty() || n_samples == 0 {
        return report;
    }
    let mut index: Vec<(u64, u32)> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| (s.word.raw(), i as u32))
        .collect();
    index.par_sort_unstable();

    let stride = (samples.len() / n_samples).max(1);
    let chosen: Vec<&CurveSample> = samples.iter().step_by(stride).take(n_samples).collect();
    let letters: Vec<Letter> = alphabet(rep.rank()).collect();

    let per_sample: Vec<EquivarianceReport> = chosen
        .par_iter()
        .map(|s| {
            let mut r = EquivarianceReport::default();
            let src = s.word.unpack();
            let p = [s.theta.cos(), s.theta.sin(), s.delta];
            for &l in &letters {
                let g = rep.letter_image(l);
                let Some((theta, expected)) = graph_coords(g.apply(p)) else {
                    continue;
                };
                let tau = Word::letter(l).mul(&src).mul(&Word::letter(l.inverse()));
                let by_word = PackedWord::pack(&tau)
                    .ok()
                    .filter(|_| tau.len() <= curve.max_word_len())
                    .and_then(|code| index.binary_search_by_key(&code.raw(), |e| e.0).ok())
                    .map(|k| &samples[index[k].1 as usize])
                    .and_then(|t| same_direction(t, theta));
                match by_word {
                    Some(d) => {
                        r.matched_pairs += 1;
                        r.matched_max_residual = r.matched_max_residual.max((d - expected).abs());
                    }
                    None => {
                        let d = curve.delta_at(theta).expect("non-empty");
                        r.interpolated_pairs += 1;
                        r.interpolated_max_residual = r.interpolated_max_residual.max((d - expected).abs());
                    }
                }
            }
            r
        })
        .collect();
    for r in per_sample {
        report.matched_pairs += r.matched_pairs;
        report.matched_max_residual = report.matched_max_residual.max(r.matched_max_residual);
        report.interpolated_pairs += r.interpolated_pairs;
        report.interpolated_max_residual = report.interpolated_max_residual.max(r.interpolated_max_residual);
    }
    report
}

/// A uniformly random reduced word of length `len`.
pub fn random_word<R: Rng>(rng: &mut R, rank: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_code(rng.random_range(0..2 * rank) as u8);
        if letters.last().is_some_and(|p| p.inverse() == l) {
            continue;
        }
        letters.push(l);
    }
    Word::reduce(letters)
}

/// Max projective distance between `f(ρ₁(γ)p)` and `ρ(γ)f(p)` over random
/// points `p` and random words `γ` of length 1 to `max_word_len`.
pub fn f_equivariance_residual(
    curve: &JordanCurve,
    rep: &Representation,
    n_samples: usize,
    max_word_len: usize,
    seed: u64,
) -> Result<f64, CurveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let len = rng.random_range(1..=max_word_len);
        let w = random_word(&mut rng, rep.rank(), len);
        let phi = rng.random_range(0.0..2.0 * PI);
        let z = rng.random_range(-1.0..1.0);
        let p = ProjPoint::new([phi.cos(), phi.sin(), z]).expect("nonzero");
        let g = rep.eval(&w);
        let lhs = curve.conjugacy_f(&AffDualMap::linear(g.linear).apply_point(&p))?;
        let rhs = g.apply_point(&curve.conjugacy_f(&p)?);
        worst = worst.max(lhs.distance(&rhs));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCount {
    pub scale: f64,
    pub boxes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub samples: usize,
    pub box_dimension: f64,
    /// RMS deviation of `log N(ε)` from the fitted line.
    pub fit_residual: f64,
    pub box_counts: Vec<BoxCount>,
    /// `(depth, max |Δδ/Δθ|)` over samples whose word has length ≤ depth.
    pub max_slope_by_depth: Vec<(usize, f64)>,
}

/// Box-counting dimension of the graph `(θ/π, δ)` at scales `2⁻⁴ … 2⁻¹²`,
/// plus the steepest chord per depth.
pub fn regularity_probe(curve: &JordanCurve) -> Result<RegularityReport, CurveError> {
    let n = curve.len();
    if n < MIN_PROBE_SAMPLES {
        return Err(CurveError::InsufficientSamples {
            found: n,
            needed: MIN_PROBE_SAMPLES,
        });
    }
    let box_counts: Vec<BoxCount> = (4..=12)
        .map(|k| {
            let scale = (-(k as f64)).exp2();
            BoxCount {
                scale,
                boxes: count_boxes(curve, 1usize << k),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = box_counts
        .iter()
        .map(|b| (-b.scale.ln(), (b.boxes as f64).ln()))
        .collect();
    let (slope, intercept) = fit_line(&pts);
    let fit_residual = (pts
        .iter()
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    Ok(RegularityReport {
        samples: n,
        box_dimension: slope,
        fit_residual,
        box_counts,
        max_slope_by_depth: (1..=curve.max_word_len())
            .map(|d| (d, max_slope_at_depth(curve, d)))
            .collect(),
    })
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Boxes of side `1/columns` met by the polyline through the samples over
/// one period, wrap segment included.
fn count_boxes(curve: &JordanCurve, columns: usize) -> u64 {
    let eps = 1.0 / columns as f64;
    let s = curve.samples();
    let mut lo = vec![f64::INFINITY; columns];
    let mut hi = vec![f64::NEG_INFINITY; columns];
    let mut mark = |x: f64, y: f64| {
        let c = ((x / eps).floor() as isize).clamp(0, columns as isize - 1) as usize;
        lo[c] = lo[c].min(y);
        hi[c] = hi[c].max(y);
    };
    let first = (s[0].theta / PI + 1.0, -s[0].delta);
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(s.len() + 2);
    let last = s[s.len() - 1];
    pts.push((last.theta / PI - 1.0, -last.delta));
    pts.extend(s.iter().map(|p| (p.theta / PI, p.delta)));
    pts.push(first);
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        // Clip to [0, 1] and add the crossings of every column boundary.
        let a = x0.max(0.0);
        let b = x1.min(1.0);
        if a > b {
            continue;
        }
        let at = |x: f64| if x1 == x0 { y0 } else { y0 + (x - x0) / (x1 - x0) * (y1 - y0) };
        mark(a, at(a));
        mark(b, at(b));
        let mut k = (a / eps).floor() as usize + 1;
        while (k as f64) * eps < b {
            let x = k as f64 * eps;
            let y = at(x);
            mark(x - 0.5 * eps, y);
            mark(x + 0.5 * eps, y);
            k += 1;
        }
    }
    lo.iter()
        .zip(&hi)
        .filter(|(l, _)| l.is_finite())
        .map(|(l, h)| ((h / eps).floor() - (l / eps).floor()) as u64 + 1)
        .sum()
}

/// Steepest chord between consecutive samples of word length ≤ `depth`.
pub fn max_slope_at_depth(curve: &JordanCurve, depth: usize) -> f64 {
    let kept: Vec<&CurveSample> = curve.samples().iter().filter(|s| s.word_len() <= depth).collect();
    if kept.len() < 2 {
        return 0.0;
    }
    let (f, l) = (kept[0], kept[kept.len() - 1]);
    let wrap = (-f.delta - l.delta).abs() / (f.theta + PI - l.theta);
    kept.windows(2)
        .map(|w| (w[1].delta - w[0].delta).abs() / (w[1].theta - w[0].theta))
        .fold(wrap, f64::max)
}

/// Affine chart used for drawing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// `(z/x, y/x)`.
    #[default]
    X,
    /// `(x/y, z/y)`.
    Y,
    /// `(x/z, y/z)`.
    Z,
}

impl Chart {
    pub fn project(self, p: [f64; 3]) -> Option<(f64, f64)> {
        let [x, y, z] = p;
        let (den, a, b) = match self {
            Chart::X => (x, z, y),
            Chart::Y => (y, x, z),
            Chart::Z => (z, x, y),
        };
        if den.abs() < 1e-12 {
            return None;
        }
        Some((a / den, b / den))
    }

    fn denominator(self, p: [f64; 3]) -> f64 {
        match self {
            Chart::X => p[0],
            Chart::Y => p[1],
            Chart::Z => p[2],
        }
    }
}

impl std::str::FromStr for Chart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Chart::X),
            "y" => Ok(Chart::Y),
            "z" => Ok(Chart::Z),
            _ => Err(format!("unknown chart {s:?}, expected x, y or z")),
        }
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Chart::X => "x",
            Chart::Y => "y",
            Chart::Z => "z",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    pub chart: Chart,
    /// `[x0, y0, x1, y1]` in chart coordinates.
    pub window: [f64; 4],
    pub width: u32,
    pub height: u32,
    /// Points closer than this many pixels to the previous one are dropped.
    pub min_pixel_step: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            chart: Chart::X,
            window: [-2.0, -2.0, 2.0, 2.0],
            width: 800,
            height: 800,
            min_pixel_step: 0.5,
        }
    }
}

/// Pixel-space polylines of the curve inside the window.
pub fn chart_polylines(curve: &JordanCurve, opts: &SvgOptions) -> Vec<Vec<(f64, f64)>> {
    let [x0, y0, x1, y1] = opts.window;
    let (w, h) = (opts.width as f64, opts.height as f64);
    let to_px = |(u, v): (f64, f64)| ((u - x0) / (x1 - x0) * w, (y1 - v) / (y1 - y0) * h);
    let inside = |(px, py): (f64, f64)| (-w..=2.0 * w).contains(&px) && (-h..=2.0 * h).contains(&py);
    let jump = w.hypot(h) * 0.5;

    let lifts: Vec<[f64; 3]> = curve
        .samples()
        .iter()
        .map(|p| [p.theta.cos(), p.theta.sin(), p.delta])
        .collect();
    // One period of the loop, started where it crosses the chart's line at
    // infinity so that a connected arc is not split at the seam.
    let n = lifts.len();
    let den = |i: usize| {
        let d = if i < n { opts.chart.denominator(lifts[i]) } else { -opts.chart.denominator(lifts[0]) };
        d.signum()
    };
    let k = (1..=n).find(|&i| den(i) != den(i - 1)).unwrap_or(n) % n.max(1);
    let neg = |p: [f64; 3]| p.map(|x| -x);
    let pts: Vec<[f64; 3]> = lifts[k..]
        .iter()
        .copied()
        .chain(lifts[..=k.min(n.saturating_sub(1))].iter().copied().map(neg))
        .collect();

    let mut lines = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<([f64; 3], (f64, f64))> = None;
    let mut flush = |current: &mut Vec<(f64, f64)>, pending: Option<(f64, f64)>| {
        if let Some(p) = pending {
            if current.last() != Some(&p) {
                current.push(p);
            }
        }
        if current.len() >= 2 {
            lines.push(std::mem::take(current));
        } else {
            current.clear();
        }
    };
    let mut pending: Option<(f64, f64)> = None;
    for p in pts {
        let px = opts.chart.project(p).map(to_px).filter(|q| inside(*q));
        let broken = match (prev, px) {
            (Some((pp, pq)), Some(q)) => {
                opts.chart.denominator(pp).signum() != opts.chart.denominator(p).signum()
                    || (q.0 - pq.0).hypot(q.1 - pq.1) > jump
            }
            _ => true,
        };
        if broken {
            flush(&mut current, pending.take());
        }
        if let Some(q) = px {
            match current.last() {
                Some(l) if (q.0 - l.0).hypot(q.1 - l.1) < opts.min_pixel_step => pending = Some(q),
                _ => {
                    current.push(q);
                    pending = None;
                }
            }
            prev = Some((p, q));
        } else {
            prev = None;
        }
    }
    flush(&mut current, pending.take());
    lines
}

/// SVG document of the curve in an affine chart, clipped to the window.
pub fn render_svg(curve: &JordanCurve, opts: &SvgOptions) -> Result<String, CurveError> {
    if curve.is_empty() {
        return Err(CurveError::Empty);
    }
    let (w, h) = (opts.width, opts.height);
    let [x0, y0, x1, y1] = opts.window;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        "<!-- chart {} window {} {} {} {} samples {} depth {} -->",
        opts.chart,
        sig17(x0),
        sig17(y0),
        sig17(x1),
        sig17(y1),
        curve.len(),
        curve.max_word_len()
    );
    let _ = writeln!(out, r#"<defs><clipPath id="win"><rect x="0" y="0" width="{w}" height="{h}"/></clipPath></defs>"#);
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white" stroke="black"/>"#);
    let _ = writeln!(out, r#"<g clip-path="url(#win)" fill="none" stroke="black" stroke-width="1">"#);
    for line in chart_polylines(curve, opts) {
        out.push_str(r#"<polyline points=""#);
        for (i, (px, py)) in line.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{px:.3},{py:.3}");
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

pub const CSV_HEADER: &str = "theta,x,y,z,delta,word_len,word";

pub fn write_csv<W: Write>(curve: &JordanCurve, out: W) -> Result<(), CurveError> {
    let mut out = std::io::BufWriter::with_capacity(1 << 20, out);
    writeln!(out, "{CSV_HEADER}")?;
    let mut line = String::with_capacity(160);
    for s in curve.samples() {
        let [x, y, z] = s.point().coords();
        line.clear();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{}",
            sig17(s.theta),
            sig17(x),
            sig17(y),
            sig17(z),
            sig17(s.delta),
            s.word_len(),
            s.word.unpack()
        );
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a curve written by [`write_csv`]. Only `theta`, `delta` and `word`
/// are used; the point columns are derived data.
pub fn read_csv<R: BufRead>(input: R, max_word_len: usize, representation_hash: String) -> Result<JordanCurve, CurveError> {
    let mut samples = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let err = |reason: String| CurveError::Csv { line: i + 1, reason };
        if i == 0 {
            if line.trim() != CSV_HEADER {
                return Err(err(format!("expected header {CSV_HEADER:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(err(format!("expected 7 columns, got {}", cols.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
        let word: Word = cols[6].parse().map_err(|e| err(format!("{e}")))?;
        samples.push(CurveSample {
            theta: num(cols[0])?,
            delta: num(cols[4])?,
            word: PackedWord::pack(&word).map_err(|e| err(format!("{e}")))?,
        });
    }
    Ok(JordanCurve::from_samples(samples, max_word_len, representation_hash))
}
