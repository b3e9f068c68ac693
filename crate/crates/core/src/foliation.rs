//! Flags `(x, d)` off the saddle point and the endpoints on `Λ` of the
//! component of `d ∖ Λ` through `x`.
//!
//! A line `d = [a:b:c]` with `c ≠ 0` is the graph of
//! `ℓ(θ) = −(a cos θ + b sin θ)/c` over ray directions, just like `Λ` is
//! the graph of `δ`. Its meeting points with `Λ` are the zeros of the
//! antiperiodic function `h = δ − ℓ`, and the component through `x` is the
//! run of constant sign of `h` around `θ(x)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{line_through, incident, AlgebraError, ProjLine, ProjPoint};
use crate::curve::{attracting_fixed_point, graph_coords, random_word, repelling_fixed_point, CurveError, JordanCurve};
use crate::deformation::{is_pure, Purity};
use crate::representation::Representation;
use crate::words::Word;

/// Dead zone around `Λ` and `0`.
pub const FLAG_TOL: f64 = 1e-6;
/// A sample of `h` this small is a point of `Λ ∩ d`.
pub const HIT_TOL: f64 = 1e-12;
const BLOCK: usize = 64;
const SUPER: usize = 4096;

#[derive(Debug, Error)]
pub enum FoliationError {
    #[error("invalid flag: {0}")]
    InvalidFlag(&'static str),
    #[error("degenerate flag: {0}")]
    Degenerate(&'static str),
    #[error("refused: {diagnosis}")]
    Refused { diagnosis: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `x ∈ RP² ∖ {0}` on a line `d` that misses `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlagPoint {
    pub x: ProjPoint,
    pub d: ProjLine,
}

impl FlagPoint {
    pub fn new(x: ProjPoint, d: ProjLine) -> Result<Self, FoliationError> {
        if !incident(&x, &d) {
            return Err(FoliationError::InvalidFlag("x is not on d"));
        }
        if x == ProjPoint::ORIGIN {
            return Err(FoliationError::InvalidFlag("x is the saddle point 0"));
        }
        if d.contains_origin() {
            return Err(FoliationError::InvalidFlag("d passes through 0"));
        }
        Ok(FlagPoint { x, d })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndpointPair {
    pub alpha: ProjPoint,
    pub beta: ProjPoint,
    pub equal: bool,
}

/// `δ` samples with block-wise bounds for fast scans along a line.
pub struct CurveIndex<'a> {
    curve: &'a JordanCurve,
    blocks: Vec<(f64, f64)>,
    supers: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    theta: f64,
    delta: f64,
    h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scan {
    Zero(f64),
    Ambiguous,
}

/// `ℓ` for the line `[a:b:c]`.
#[derive(Clone, Copy, Debug)]
struct Graph {
    a: f64,
    b: f64,
    c: f64,
    amp: f64,
}

impl Graph {
    fn new(d: &ProjLine) -> Self {
        let [a, b, c] = d.coeffs();
        Graph {
            a,
            b,
            c,
            amp: a.hypot(b) / c.abs(),
        }
    }

    fn at(&self, theta: f64) -> f64 {
        -(self.a * theta.cos() + self.b * theta.sin()) / self.c
    }

    /// Bounds of `ℓ` on `[t0, t1]` from the chord and `|ℓ''| ≤ amp`.
    fn bounds(&self, t0: f64, t1: f64) -> (f64, f64) {
        let (l0, l1) = (self.at(t0), self.at(t1));
        let bow = self.amp * (t1 - t0).powi(2) / 8.0;
        (l0.min(l1) - bow, l0.max(l1) + bow)
    }

    fn point(&self, theta: f64) -> ProjPoint {
        ProjPoint::new([theta.cos(), theta.sin(), self.at(theta)]).expect("unit (x, y)")
    }
}

fn block_bounds(curve: &JordanCurve, size: usize) -> Vec<(f64, f64)> {
    let s = curve.samples();
    let n = s.len();
    (0..n.div_ceil(size))
        .map(|b| {
            let start = b * size;
            let end = (start + size).min(n);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in start..=end {
                let d = if k == n { -s[0].delta } else { s[k].delta };
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (lo, hi)
        })
        .collect()
}

impl<'a> CurveIndex<'a> {
    pub fn new(curve: &'a JordanCurve) -> Result<Self, FoliationError> {
        if curve.is_empty() {
            return Err(CurveError::Empty.into());
        }
        Ok(CurveIndex {
            curve,
            blocks: block_bounds(curve, BLOCK),
            supers: block_bounds(curve, SUPER),
        })
    }

    pub fn curve(&self) -> &JordanCurve {
        self.curve
    }

    fn n(&self) -> i64 {
        self.curve.len() as i64
    }

    /// Sample `j` of the unrolled periodic sequence.
    fn sample(&self, j: i64) -> (f64, f64) {
        let n = self.n();
        let lap = j.div_euclid(n);
        let s = self.curve.samples()[j.rem_euclid(n) as usize];
        let sign = if lap % 2 == 0 { 1.0 } else { -1.0 };
        (s.theta + lap as f64 * PI, sign * s.delta)
    }

    fn node(&self, g: &Graph, j: i64) -> Node {
        let (theta, delta) = self.sample(j);
        Node {
            theta,
            delta,
            h: delta - g.at(theta),
        }
    }

    /// Span `[j, j + len]` of the block of `size` that starts (forward) or
    /// ends (backward) at unrolled index `j`, if aligned.
    fn aligned_block(&self, j: i64, size: usize, forward: bool) -> Option<(i64, i64, usize)> {
        let n = self.n();
        let k = j.rem_euclid(n) as usize;
        let n = n as usize;
        if forward {
            if !k.is_multiple_of(size) {
                return None;
            }
            let len = size.min(n - k);
            Some((j, j + len as i64, k / size))
        } else {
            let end = if k == 0 { n } else { k };
            if end % size != 0 && end != n {
                return None;
            }
            let b = (end - 1) / size;
            let start = b * size;
            Some((j - (end - start) as i64, j, b))
        }
    }

    /// Whether `h` keeps sign `sign` with margin [`FLAG_TOL`] over a block.
    fn clear(&self, g: &Graph, span: (i64, i64, usize), size: usize, sign: f64) -> bool {
        let (j0, j1, b) = span;
        let (t0, _) = self.sample(j0);
        let (t1, _) = self.sample(j1);
        let (lo, hi) = if size == SUPER { self.supers[b] } else { self.blocks[b] };
        let lap = j0.div_euclid(self.n());
        let (dlo, dhi) = if lap % 2 == 0 { (lo, hi) } else { (-hi, -lo) };
        let (llo, lhi) = g.bounds(t0, t1);
        if sign > 0.0 {
            dlo - lhi >= FLAG_TOL
        } else {
            llo - dhi >= FLAG_TOL
        }
    }

    /// Walk from `x` along the curve until `h` vanishes or changes sign.
    fn scan(&self, g: &Graph, start: Node, i: i64, forward: bool) -> Scan {
        let step: i64 = if forward { 1 } else { -1 };
        let sign = start.h.signum();
        let mut prev = start;
        let mut j = if forward { i + 1 } else { i };
        let limit = self.n() + 2;
        let mut near = false;
        let mut walked = 0;
        while walked <= limit {
            let cur = self.node(g, j);
            if cur.h.abs() <= HIT_TOL {
                return Scan::Zero(cur.theta);
            }
            if cur.h.signum() != sign {
                return Scan::Zero(refine(g, prev, cur));
            }
            if cur.h.abs() < FLAG_TOL {
                near = true;
            } else if near {
                // The graphs came within the dead zone without crossing.
                return Scan::Ambiguous;
            }
            prev = cur;
            walked += 1;
            if !near {
                // Jump over whole blocks, largest first, while h stays clear.
                while let Some((span, _)) = [SUPER, BLOCK].into_iter().find_map(|size| {
                    self.aligned_block(j, size, forward)
                        .filter(|span| self.clear(g, *span, size, sign))
                        .map(|span| (span, size))
                }) {
                    let next = if forward { span.1 } else { span.0 };
                    walked += (next - j).abs();
                    j = next;
                    prev = self.node(g, j);
                }
            }
            j += step;
        }
        Scan::Ambiguous
    }

    /// Endpoints of the component of `d ∖ Λ` containing `x`.
    pub fn endpoints(&self, flag: &FlagPoint) -> Result<EndpointPair, FoliationError> {
        let g = Graph::new(&flag.d);
        let p = flag.x.coords();
        if p[0].hypot(p[1]) < FLAG_TOL {
            return Err(FoliationError::Degenerate("x is within the dead zone of 0"));
        }
        let (theta, _) = graph_coords(p).expect("x is not 0");
        let delta = self.curve.delta_at(theta)?;
        let start = Node {
            theta,
            delta,
            h: delta - g.at(theta),
        };
        if start.h.abs() < FLAG_TOL {
            return Err(FoliationError::Degenerate("x is within the dead zone of the curve"));
        }
        let i = self.curve.samples().partition_point(|s| s.theta <= theta) as i64 - 1;
        let fwd = self.scan(&g, start, i, true);
        let bwd = self.scan(&g, start, i, false);
        match (bwd, fwd) {
            (Scan::Zero(tb), Scan::Zero(tf)) => {
                let (alpha, beta) = (g.point(tb), g.point(tf));
                Ok(EndpointPair {
                    alpha,
                    beta,
                    equal: alpha.distance(&beta) < FLAG_TOL,
                })
            }
            _ => Err(FoliationError::Degenerate("the line is tangent to the curve within the dead zone")),
        }
    }

    /// Largest gap `|δ − ℓ|` over samples: zero iff the line is the curve.
    pub fn max_separation(&self, d: &ProjLine) -> f64 {
        let g = Graph::new(d);
        self.curve
            .samples()
            .iter()
            .map(|s| (s.delta - g.at(s.theta)).abs())
            .fold(0.0, f64::max)
    }
}

/// Zero of `δ_lin − ℓ` between two nodes of opposite sign, by bisection.
fn refine(g: &Graph, a: Node, b: Node) -> f64 {
    let f = |t: f64| {
        let w = if b.theta == a.theta { 0.0 } else { (t - a.theta) / (b.theta - a.theta) };
        a.delta + w * (b.delta - a.delta) - g.at(t)
    };
    let (mut lo, mut hi) = (a.theta.min(b.theta), a.theta.max(b.theta));
    let flo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn endpoints(curve: &JordanCurve, flag: &FlagPoint) -> Result<EndpointPair, FoliationError> {
    CurveIndex::new(curve)?.endpoints(flag)
}

/// The line through the attracting and repelling fixed points of `ρ(w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantLine {
    pub line: ProjLine,
    pub attracting: ProjPoint,
    pub repelling: ProjPoint,
    /// Whether the line leaves the sampled curve, i.e. meets `U(ρ)`.
    pub meets_complement: bool,
}

pub fn invariant_line(rep: &Representation, curve: &JordanCurve, w: &Word) -> Result<InvariantLine, FoliationError> {
    let m = rep.eval(w);
    let attracting = attracting_fixed_point(&m)?;
    let repelling = repelling_fixed_point(&m)?;
    let line = line_through(&attracting, &repelling)?;
    if line.contains_origin() {
        return Err(FoliationError::InvalidFlag("invariant line passes through 0"));
    }
    let meets_complement = CurveIndex::new(curve)?.max_separation(&line) > FLAG_TOL;
    Ok(InvariantLine {
        line,
        attracting,
        repelling,
        meets_complement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub flag: FlagPoint,
    pub endpoints: EndpointPair,
    /// Index in the random flag stream, or `None` when built from an
    /// invariant line.
    pub sample_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlagClassification {
    pub n_samples: usize,
    pub seed: u64,
    pub distinct: usize,
    pub equal: usize,
    /// Lines through the dead zone of `0`, rejected before classification.
    pub skipped_lines: usize,
    /// Flags in the dead zone of `Λ` or tangent within it.
    pub skipped_degenerate: usize,
    pub fraction_distinct: f64,
    pub witness_distinct: Witness,
    pub witness_equal: Option<Witness>,
}

enum Outcome {
    Line,
    Degenerate,
    Classified(Witness),
}

/// Random flags near `Λ`, classified by whether `α = β`.
///
/// Flag `i` uses four draws from `ChaCha8Rng::seed_from_u64(seed)`: two
/// directions `θ ∈ [0, π)` and two offsets `ε ∈ [−σ, σ)` giving the points
/// `[cos θ : sin θ : δ(θ) + ε]`, with `σ = max |δ|`; `d` joins them and `x`
/// is the first one.
pub fn classify_flags(
    rep: &Representation,
    curve: &JordanCurve,
    n_samples: usize,
    seed: u64,
) -> Result<FlagClassification, FoliationError> {
    let purity = is_pure(rep);
    if !purity.is_pure() {
        let diagnosis = match purity {
            Purity::NotPure { p, .. } => format!(
                "the image fixes the line z = {}x + {}y, so the curve is a projective line and every flag has alpha = beta",
                p[0], p[1]
            ),
            _ => "purity is numerically indeterminate; the curve may be a projective line".to_string(),
        };
        return Err(FoliationError::Refused { diagnosis });
    }
    let index = CurveIndex::new(curve)?;
    let sigma = match curve.max_abs_delta() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<[f64; 4]> = (0..n_samples)
        .map(|_| {
            [
                rng.random_range(0.0..PI),
                rng.random_range(-sigma..sigma),
                rng.random_range(0.0..PI),
                rng.random_range(-sigma..sigma),
            ]
        })
        .collect();

    let outcomes: Vec<Outcome> = draws
        .par_iter()
        .enumerate()
        .map(|(i, &[t1, e1, t2, e2])| {
            let pt = |t: f64, e: f64| -> Result<ProjPoint, FoliationError> {
                Ok(ProjPoint::new([t.cos(), t.sin(), curve.delta_at(t)? + e])?)
            };
            let (Ok(x), Ok(q)) = (pt(t1, e1), pt(t2, e2)) else {
                return Outcome::Line;
            };
            let Ok(d) = line_through(&x, &q) else {
                return Outcome::Line;
            };
            if d.coeffs()[2].abs() < FLAG_TOL {
                return Outcome::Line;
            }
            let Ok(flag) = FlagPoint::new(x, d) else {
                return Outcome::Line;
            };
            match index.endpoints(&flag) {
                Ok(endpoints) => Outcome::Classified(Witness {
                    flag,
                    endpoints,
                    sample_index: Some(i),
                }),
                Err(_) => Outcome::Degenerate,
            }
        })
        .collect();

    let (mut distinct, mut equal, mut skipped_lines, mut skipped_degenerate) = (0, 0, 0, 0);
    let mut witness_distinct = None;
    let mut witness_equal = None;
    for o in outcomes {
        match o {
            Outcome::Line => skipped_lines += 1,
            Outcome::Degenerate => skipped_degenerate += 1,
            Outcome::Classified(w) if w.endpoints.equal => {
                equal += 1;
                witness_equal.get_or_insert(w);
            }
            Outcome::Classified(w) => {
                distinct += 1;
                witness_distinct.get_or_insert(w);
            }
        }
    }
    let witness_distinct = match witness_distinct {
        Some(w) => w,
        None => constructed_witness(rep, &index)?,
    };
    let classified = distinct + equal;
    Ok(FlagClassification {
        n_samples,
        seed,
        distinct,
        equal,
        skipped_lines,
        skipped_degenerate,
        fraction_distinct: if classified == 0 { 0.0 } else { distinct as f64 / classified as f64 },
        witness_distinct,
        witness_equal,
    })
}

/// A flag on the invariant line of a generator, at the point of the arc
/// between its two fixed points farthest from the curve. The line meets
/// `Λ` at both fixed points, so no component of `d ∖ Λ` is a punctured line.
pub fn constructed_witness(rep: &Representation, index: &CurveIndex<'_>) -> Result<Witness, FoliationError> {
    let curve = index.curve();
    for k in 0..rep.rank() {
        let w = Word::letter(crate::words::Letter::gen(k));
        let inv = invariant_line(rep, curve, &w)?;
        if !inv.meets_complement {
            continue;
        }
        let g = Graph::new(&inv.line);
        let (ta, _) = graph_coords(inv.attracting.coords()).expect("fixed point is not 0");
        let (tr, _) = graph_coords(inv.repelling.coords()).expect("fixed point is not 0");
        let (lo, hi) = (ta.min(tr), ta.max(tr));
        let best = curve
            .samples()
            .iter()
            .filter(|s| s.theta > lo && s.theta < hi)
            .map(|s| (s.theta, (s.delta - g.at(s.theta)).abs()))
            .fold(None, |acc: Option<(f64, f64)>, c| match acc {
                Some(a) if a.1 >= c.1 => Some(a),
                _ => Some(c),
            });
        let Some((theta, sep)) = best else { continue };
        if sep < FLAG_TOL {
            continue;
        }
        let flag = FlagPoint::new(g.point(theta), inv.line)?;
        if let Ok(endpoints) = index.endpoints(&flag) {
            if !endpoints.equal {
                return Ok(Witness {
                    flag,
                    endpoints,
                    sample_index: None,
                });
            }
        }
    }
    Err(FoliationError::Refused {
        diagnosis: "no generator axis leaves the sampled curve".to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRow {
    pub word_len: usize,
    pub samples: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitProbe {
    pub rows: Vec<OrbitRow>,
    /// Median at the longest length is below the median at length 2.
    pub median_decreasing: bool,
}

/// Projective distance from `p` to the sampled `Λ ∪ {0}`, measured to the
/// curve point in the same direction.
pub fn distance_to_limit_set(curve: &JordanCurve, p: &ProjPoint) -> Result<f64, FoliationError> {
    let to_origin = p.distance(&ProjPoint::ORIGIN);
    let Some((theta, _)) = graph_coords(p.coords()) else {
        return Ok(0.0);
    };
    let on_curve = ProjPoint::new([theta.cos(), theta.sin(), curve.delta_at(theta)?])?;
    Ok(to_origin.min(p.distance(&on_curve)))
}

/// Distances of `ρ(γ)x` to `Λ ∪ {0}` for random words `γ` of each length.
pub fn orbit_accumulation_probe(
    rep: &Representation,
    curve: &JordanCurve,
    flag: &FlagPoint,
    max_len: usize,
    per_length: usize,
    seed: u64,
) -> Result<OrbitProbe, FoliationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(max_len + 1);
    for len in 0..=max_len {
        let count = if len == 0 { 1 } else { per_length };
        let mut d: Vec<f64> = (0..count)
            .map(|_| {
                let w = random_word(&mut rng, rep.rank(), len);
                distance_to_limit_set(curve, &rep.eval_uncached(w.letters()).apply_point(&flag.x))
            })
            .collect::<Result<_, _>>()?;
        d.sort_by(f64::total_cmp);
        let median = if d.len() % 2 == 1 {
            d[d.len() / 2]
        } else {
            0.5 * (d[d.len() / 2 - 1] + d[d.len() / 2])
        };
        rows.push(OrbitRow {
            word_len: len,
            samples: d.len(),
            min: d[0],
            median,
            max: d[d.len() - 1],
        });
    }
    let median_decreasing = max_len > 2 && rows[max_len].median < rows[2].median;
    Ok(OrbitProbe {
        rows,
        median_decreasing,
    })
}
