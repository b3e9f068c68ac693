//! Hyperbolic representations of a closed surface group into the dual
//! affine group.
//!
//! The linear part comes from the regular `4g`-gon with opposite sides
//! identified: generator `k` translates along the diameter at disc angle
//! `kπ/2g` by twice the inradius, with every other generator inverted so
//! that the boundary word `x₀ x₁ … x₂g₋₁ x₀⁻¹ … x₂g₋₁⁻¹` is the relator.
//! Translation cocycles are attached on top of that linear part.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{eig2, AffDualMap, AlgebraError, Mat2};
use crate::numfmt::Sig17;
use crate::words::{self, alphabet, commutator, Letter, PackedWord, Word, WordError};

/// Spectral gate on `|λ| − 1` for certifying a saddle at `0`.
pub const SPECTRAL_GATE: f64 = 1e-8;
/// Tolerance for the surface relation evaluated in matrices.
pub const RELATION_TOL: f64 = 1e-8;
/// Grid used to round matrix entries for group-element fingerprints.
pub const FINGERPRINT_GRID: f64 = 1e-9;
/// Generator log-determinants below this are treated as exactly zero.
pub const UNIMODULAR_LOG_TOL: f64 = 1e-12;
/// Longest word a sweep will enumerate.
pub const MAX_SWEEP_LEN: usize = 12;

#[derive(Debug, Error)]
pub enum RepresentationError {
    #[error("unsupported genus {0}")]
    UnsupportedGenus(usize),
    #[error("expected {expected} generators, got {got}")]
    GeneratorCount { expected: usize, got: usize },
    #[error("generator {index} has non-positive determinant {det}")]
    NonPositiveDeterminant { index: usize, det: f64 },
    #[error("cocycle has {got} translation pairs, expected {expected}")]
    CocycleLength { expected: usize, got: usize },
    #[error("sweep length {0} exceeds the cap {MAX_SWEEP_LEN}")]
    SweepTooLong(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("malformed representation document: {0}")]
    Json(#[from] serde_json::Error),
}

/// Images of the `2g` surface-group generators in the dual affine group.
#[derive(Debug)]
pub struct Representation {
    genus: usize,
    generators: Vec<AffDualMap>,
    letter_images: Vec<AffDualMap>,
    cache: RwLock<HashMap<Word, AffDualMap>>,
}

impl Clone for Representation {
    fn clone(&self) -> Self {
        Representation::from_parts(self.genus, self.generators.clone())
            .expect("already validated")
    }
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        self.genus == other.genus && self.generators == other.generators
    }
}

impl Representation {
    pub fn new(genus: usize, generators: Vec<AffDualMap>) -> Result<Self, RepresentationError> {
        if !(1..=13).contains(&genus) {
            return Err(RepresentationError::UnsupportedGenus(genus));
        }
        if generators.len() != 2 * genus {
            return Err(RepresentationError::GeneratorCount {
                expected: 2 * genus,
                got: generators.len(),
            });
        }
        for (index, g) in generators.iter().enumerate() {
            let det = g.linear.det();
            if !(det > 0.0) {
                return Err(RepresentationError::NonPositiveDeterminant { index, det });
            }
        }
        Self::from_parts(genus, generators)
    }

    fn from_parts(genus: usize, generators: Vec<AffDualMap>) -> Result<Self, RepresentationError> {
        let letter_images = alphabet(2 * genus)
            .map(|l| {
                let g = &generators[l.index()];
                if l.is_inverted() {
                    g.inverse()
                } else {
                    Ok(*g)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Representation {
            genus,
            generators,
            letter_images,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of generators, `2g`.
    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn generators(&self) -> &[AffDualMap] {
        &self.generators
    }

    pub fn letter_image(&self, l: Letter) -> &AffDualMap {
        &self.letter_images[l.code() as usize]
    }

    pub fn linear_parts(&self) -> Vec<Mat2> {
        self.generators.iter().map(|g| g.linear).collect()
    }

    pub fn cocycle(&self) -> Vec<[f64; 2]> {
        self.generators.iter().map(|g| g.translation).collect()
    }

    pub fn has_zero_cocycle(&self) -> bool {
        self.generators.iter().all(|g| g.translation == [0.0, 0.0])
    }

    /// Replace the translation rows. No relation check happens here.
    pub fn attach_cocycle(&self, t: &[[f64; 2]]) -> Result<Representation, RepresentationError> {
        if t.len() != self.rank() {
            return Err(RepresentationError::CocycleLength {
                expected: self.rank(),
                got: t.len(),
            });
        }
        let gens = self
            .generators
            .iter()
            .zip(t)
            .map(|(g, w)| AffDualMap::new(g.linear, *w))
            .collect();
        Representation::new(self.genus, gens)
    }

    /// The same representation with the linear part of generator `index`
    /// multiplied by the homothety `e^{log_factor}`.
    pub fn twist_generator(&self, index: usize, log_factor: f64) -> Representation {
        let mut gens = self.generators.clone();
        gens[index].linear = gens[index].linear.scale(log_factor.exp());
        Representation::new(self.genus, gens).expect("homothety keeps det > 0")
    }

    /// Twist generator `index` by `e^{t/2}` with `t` its translation length,
    /// i.e. by its own spectral radius: the boundary of the hyperbolic range.
    pub fn boundary_twist(&self, index: usize) -> Result<Representation, RepresentationError> {
        let lin = self.generators[index].linear;
        let unimodular = lin.scale(1.0 / lin.det().sqrt());
        let e = eig2(unimodular)?;
        Ok(self.twist_generator(index, e.lambda1.abs().ln()))
    }

    /// Product of generator images along `w`, memoized per word.
    pub fn eval(&self, w: &Word) -> AffDualMap {
        if w.is_empty() {
            return AffDualMap::IDENTITY;
        }
        if let Some(m) = self.cache.read().expect("cache lock").get(w) {
            return *m;
        }
        let m = self.eval_uncached(w.letters());
        self.cache
            .write()
            .expect("cache lock")
            .entry(w.clone())
            .or_insert(m);
        m
    }

    pub fn eval_uncached(&self, letters: &[Letter]) -> AffDualMap {
        letters
            .iter()
            .fold(AffDualMap::IDENTITY, |acc, l| acc.compose(self.letter_image(*l)))
    }

    pub fn cached_words(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn relator(&self) -> Word {
        words::surface_relator(self.genus)
    }

    /// Distance of the relator's image from the identity.
    pub fn relation_residual(&self) -> f64 {
        self.eval_uncached(self.relator().letters()).identity_residual()
    }

    /// `Π [aᵢ, bᵢ]` over the symplectic basis (genus 2 only).
    pub fn symplectic_product(&self) -> Option<AffDualMap> {
        if self.genus != 2 {
            return None;
        }
        let w = words::symplectic_basis_genus2()
            .iter()
            .map(|(a, b)| commutator(a, b))
            .fold(Word::empty(), |acc, c| acc.mul(&c));
        // Evaluate the unreduced product to exercise the matrices themselves.
        let basis = words::symplectic_basis_genus2();
        let m = basis.iter().fold(AffDualMap::IDENTITY, |acc, (a, b)| {
            let (ma, mb) = (self.eval(a), self.eval(b));
            let c = ma
                .compose(&mb)
                .compose(&ma.inverse().expect("invertible"))
                .compose(&mb.inverse().expect("invertible"));
            acc.compose(&c)
        });
        debug_assert_eq!(w, self.relator());
        Some(m)
    }

    /// `½ log det` of each generator's linear part: the additive character
    /// `L_u` on generators. Values within [`UNIMODULAR_LOG_TOL`] of zero are
    /// snapped to zero.
    pub fn log_det_character(&self) -> Vec<f64> {
        self.generators
            .iter()
            .map(|g| {
                let l = 0.5 * g.linear.det().ln();
                if l.abs() < UNIMODULAR_LOG_TOL {
                    0.0
                } else {
                    l
                }
            })
            .collect()
    }

    pub fn to_document(&self) -> RepresentationDoc {
        RepresentationDoc {
            genus: self.genus,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorDoc {
                    linear: g.linear.to_row_major(),
                    translation: g.translation,
                })
                .collect(),
            extra: BTreeMap::new(),
        }
    }

    pub fn from_document(doc: &RepresentationDoc) -> Result<Self, RepresentationError> {
        let gens = doc
            .generators
            .iter()
            .map(|g| AffDualMap::new(Mat2::from_row_major(g.linear), g.translation))
            .collect();
        Representation::new(doc.genus, gens)
    }

    pub fn to_json(&self) -> String {
        self.to_document().to_json()
    }

    pub fn from_json(s: &str) -> Result<Self, RepresentationError> {
        let doc: RepresentationDoc = serde_json::from_str(s)?;
        Self::from_document(&doc)
    }

    /// SHA-256 of the canonical JSON document.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// `cot(π/4g)`, the hyperbolic cosine of the inradius of the regular
/// `4g`-gon with interior angles `2π/4g`.
pub fn octagon_cosh_half_length(genus: usize) -> f64 {
    1.0 / (PI / (4 * genus) as f64).tan()
}

/// Cocompact Fuchsian generators with zero cocycle.
///
/// For genus 2 every generator is conjugate to `diag(e^{ℓ/2}, e^{-ℓ/2})` with
/// `cosh(ℓ/2) = 1 + √2`, so each has trace `2 + 2√2`.
pub fn build_fuchsian(genus: usize) -> Result<Representation, RepresentationError> {
    if !(2..=4).contains(&genus) {
        return Err(RepresentationError::UnsupportedGenus(genus));
    }
    let sides = 4 * genus;
    let half_length = octagon_cosh_half_length(genus).acosh();
    let translation = Mat2::diag(half_length.exp(), (-half_length).exp());
    let gens = (0..2 * genus)
        .map(|k| {
            // A matrix rotation by φ rotates the disc by 2φ.
            let angle = k as f64 * PI / sides as f64;
            let m = Mat2::rotation(angle) * translation * Mat2::rotation(-angle);
            let m = if k % 2 == 0 { Ok(m) } else { m.inverse() };
            m.map(AffDualMap::linear)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Representation::new(genus, gens)
}

/// Serialized form: `{genus, generators: [[a, b, c, d], [u, v]] × 2g}`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct RepresentationDoc {
    pub genus: usize,
    pub generators: Vec<GeneratorDoc>,
    /// Extra top-level keys, carried through untouched.
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorDoc {
    pub linear: [f64; 4],
    pub translation: [f64; 2],
}

impl<'de> Deserialize<'de> for GeneratorDoc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (linear, translation) = <([f64; 4], [f64; 2])>::deserialize(d)?;
        Ok(GeneratorDoc {
            linear,
            translation,
        })
    }
}

impl Serialize for GeneratorDoc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.linear.map(Sig17), self.translation.map(Sig17)).serialize(s)
    }
}

impl Serialize for RepresentationDoc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2 + self.extra.len()))?;
        m.serialize_entry("genus", &self.genus)?;
        m.serialize_entry("generators", &self.generators)?;
        for (k, v) in &self.extra {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl RepresentationDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite entries serialize")
    }
}

/// Fingerprint of a group element: corner-normalized entries rounded to
/// [`FINGERPRINT_GRID`], mixed into 64 bits.
pub fn fingerprint(m: &AffDualMap) -> u64 {
    let entries = [
        m.linear.a,
        m.linear.b,
        m.linear.c,
        m.linear.d,
        m.translation[0],
        m.translation[1],
    ];
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for x in entries {
        let q = (x / FINGERPRINT_GRID).round() as i64;
        h = splitmix(h ^ q as u64);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One unit of sweep work: either a single node or a whole subtree.
#[derive(Clone, Copy, Debug)]
enum Partition {
    Node(PackedWord),
    Subtree(PackedWord),
}

fn partitions(rank: usize, max_len: usize) -> Vec<Partition> {
    let mut parts = vec![Partition::Node(PackedWord::EMPTY)];
    if max_len >= 1 {
        for l0 in alphabet(rank) {
            parts.push(Partition::Node(PackedWord::EMPTY.push(l0)));
        }
    }
    if max_len >= 2 {
        for l0 in alphabet(rank) {
            for l1 in alphabet(rank).filter(|l| *l != l0.inverse()) {
                parts.push(Partition::Subtree(PackedWord::EMPTY.push(l0).push(l1)));
            }
        }
    }
    parts
}

/// Depth-first walk over every reduced word of length ≤ `max_len`, with the
/// matrix product accumulated along the way.
///
/// Work is split by two-letter prefix and run on the current rayon pool. The
/// returned accumulators are in a fixed partition order, so any order-aware
/// merge of them is independent of the thread count.
pub fn sweep_partitions<A, I, V>(
    rep: &Representation,
    max_len: usize,
    init: I,
    visit: V,
) -> Result<Vec<A>, RepresentationError>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, PackedWord, &AffDualMap) + Sync,
{
    if max_len > MAX_SWEEP_LEN {
        return Err(RepresentationError::SweepTooLong(max_len));
    }
    if rep.rank() > 8 {
        return Err(WordError::Unpackable {
            len: max_len,
            rank: rep.rank(),
        }
        .into());
    }
    let parts = partitions(rep.rank(), max_len);
    Ok(parts
        .par_iter()
        .map(|part| {
            let mut acc = init();
            match *part {
                Partition::Node(w) => {
                    let m = prefix_product(rep, w);
                    visit(&mut acc, w, &m);
                }
                Partition::Subtree(w) => {
                    let m = prefix_product(rep, w);
                    let last = w.get(w.len() - 1);
                    descend(rep, max_len, w, last, m, &mut acc, &visit);
                }
            }
            acc
        })
        .collect())
}

fn prefix_product(rep: &Representation, w: PackedWord) -> AffDualMap {
    (0..w.len()).fold(AffDualMap::IDENTITY, |acc, i| acc.compose(rep.letter_image(w.get(i))))
}

fn descend<A, V>(
    rep: &Representation,
    max_len: usize,
    w: PackedWord,
    last: Letter,
    m: AffDualMap,
    acc: &mut A,
    visit: &V,
) where
    V: Fn(&mut A, PackedWord, &AffDualMap),
{
    visit(acc, w, &m);
    if w.len() == max_len {
        return;
    }
    for l in alphabet(rep.rank()) {
        if l == last.inverse() {
            continue;
        }
        let next = m.compose(rep.letter_image(l));
        descend(rep, max_len, w.push(l), l, next, acc, visit);
    }
}

/// Number of distinct group elements among the reduced words of length
/// ≤ `max_len`, by fingerprint.
pub fn distinct_element_count(rep: &Representation, max_len: usize) -> Result<u64, RepresentationError> {
    let parts = sweep_partitions(rep, max_len, Vec::new, |acc: &mut Vec<u64>, _, m| {
        acc.push(fingerprint(m))
    })?;
    let mut all: Vec<u64> = parts.into_iter().flatten().collect();
    all.par_sort_unstable();
    all.dedup();
    Ok(all.len() as u64)
}

/// Spectral data of one swept element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralClass {
    Identity,
    /// `|λ₁| > 1 > |λ₂|` with margin [`SPECTRAL_GATE`].
    Hyperbolic { lambda1: f64, lambda2: f64 },
    /// Real separated spectrum that fails the saddle gate.
    Violation { lambda1: f64, lambda2: f64 },
    /// Numerically elliptic or parabolic linear part.
    Skipped,
}

pub fn classify_element(m: &AffDualMap) -> SpectralClass {
    if m.identity_residual() < 1e-9 {
        return SpectralClass::Identity;
    }
    match eig2(m.linear) {
        Err(_) => SpectralClass::Skipped,
        Ok(e) => {
            let (lambda1, lambda2) = (e.lambda1, e.lambda2);
            if lambda1.abs() > 1.0 + SPECTRAL_GATE && lambda2.abs() < 1.0 - SPECTRAL_GATE {
                SpectralClass::Hyperbolic { lambda1, lambda2 }
            } else {
                SpectralClass::Violation { lambda1, lambda2 }
            }
        }
    }
}

/// `|L_u(γ)| / t(γ)` where `t(γ) = log|λ₁/λ₂|` is twice the log spectral
/// radius of the unimodular part and `L_u` is evaluated as a character.
fn norm_ratio(word: PackedWord, character: &[f64], lambda1: f64, lambda2: f64) -> Option<f64> {
    let t = lambda1.abs().ln() - lambda2.abs().ln();
    if t <= 1e-12 {
        return None;
    }
    let l: f64 = (0..word.len())
        .map(|i| {
            let letter = word.get(i);
            f64::from(letter.sign()) * character[letter.index()]
        })
        .sum();
    Some(l.abs() / t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    #[serde(serialize_with = "serialize_display")]
    pub word: Word,
    pub lambda1: f64,
    pub lambda2: f64,
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(t: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

fn serialize_opt_display<T: std::fmt::Display, S: serde::Serializer>(
    t: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match t {
        Some(t) => s.collect_str(t),
        None => s.serialize_none(),
    }
}

/// Lower bound on the dual stable norm of the determinant character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableNormBound {
    pub max_word_len: usize,
    pub value: f64,
    #[serde(serialize_with = "serialize_opt_display")]
    pub witness: Option<Word>,
    /// `value ≥ 1/2`: the twisted representation cannot be hyperbolic.
    pub criterion_violated: bool,
}

/// Partial certificate: every element of word length ≤ `max_word_len` was
/// checked, nothing is claimed beyond that length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub max_word_len: usize,
    pub words_checked: u64,
    pub distinct_elements: u64,
    pub violations: Vec<Violation>,
    pub skipped: u64,
    pub stable_norm: StableNormBound,
}

impl HyperbolicityReport {
    pub fn is_certified(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct CheckAcc {
    fingerprints: Vec<u64>,
    violations: Vec<(u64, PackedWord, f64, f64)>,
    skipped: Vec<u64>,
    best: Option<(f64, PackedWord)>,
}

fn better(a: Option<(f64, PackedWord)>, b: Option<(f64, PackedWord)>) -> Option<(f64, PackedWord)> {
    match (a, b) {
        (Some(x), Some(y)) => {
            // Larger ratio wins, shorter word breaks ties.
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sweep every element of word length ≤ `max_len`, record saddle-gate
/// violations and accumulate the stable-norm bound.
pub fn check_hyperbolic(rep: &Representation, max_len: usize) -> Result<HyperbolicityReport, RepresentationError> {
    let character = rep.log_det_character();
    let parts = sweep_partitions(rep, max_len, CheckAcc::default, |acc, w, m| {
        let fp = fingerprint(m);
        acc.fingerprints.push(fp);
        match classify_element(m) {
            SpectralClass::Identity => {}
            SpectralClass::Skipped => acc.skipped.push(fp),
            SpectralClass::Hyperbolic { lambda1, lambda2 } => {
                let r = norm_ratio(w, &character, lambda1, lambda2).map(|r| (r, w));
                acc.best = better(acc.best, r);
            }
            SpectralClass::Violation { lambda1, lambda2 } => {
                acc.violations.push((fp, w, lambda1, lambda2));
                let r = norm_ratio(w, &character, lambda1, lambda2).map(|r| (r, w));
                acc.best = better(acc.best, r);
            }
        }
    })?;

    let mut fingerprints = Vec::new();
    let mut violations = Vec::new();
    let mut skipped = Vec::new();
    let mut best = None;
    for p in parts {
        fingerprints.extend(p.fingerprints);
        violations.extend(p.violations);
        skipped.extend(p.skipped);
        best = better(best, p.best);
    }
    let words_checked = fingerprints.len() as u64;
    fingerprints.par_sort_unstable();
    fingerprints.dedup();
    skipped.sort_unstable();
    skipped.dedup();

    // One violation per group element, represented by its canonical word.
    violations.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    violations.dedup_by_key(|v| v.0);
    violations.sort_by_key(|v| v.1);

    let value = best.map_or(0.0, |b| b.0);
    Ok(HyperbolicityReport {
        max_word_len: max_len,
        words_checked,
        distinct_elements: fingerprints.len() as u64,
        violations: violations
            .into_iter()
            .map(|(_, w, lambda1, lambda2)| Violation {
                word: w.unpack(),
                lambda1,
                lambda2,
            })
            .collect(),
        skipped: skipped.len() as u64,
        stable_norm: StableNormBound {
            max_word_len: max_len,
            value,
            witness: best.map(|b| b.1.unpack()),
            criterion_violated: value >= 0.5,
        },
    })
}

/// `max |L_u(γ)| / t(γ)` over swept elements whose linear part has a real
/// separated spectrum. A lower bound for the dual stable norm.
pub fn stable_norm_bound(rep: &Representation, max_len: usize) -> Result<StableNormBound, RepresentationError> {
    let character = rep.log_det_character();
    let parts = sweep_partitions(
        rep,
        max_len,
        || None,
        |acc: &mut Option<(f64, PackedWord)>, w, m| {
            if w.is_empty() {
                return;
            }
            if let Ok(e) = eig2(m.linear) {
                let r = norm_ratio(w, &character, e.lambda1, e.lambda2).map(|r| (r, w));
                *acc = better(*acc, r);
            }
        },
    )?;
    let best = parts.into_iter().fold(None, better);
    let value = best.map_or(0.0, |b| b.0);
    Ok(StableNormBound {
        max_word_len: max_len,
        value,
        witness: best.map(|b| b.1.unpack()),
        criterion_violated: value >= 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::enumerate;

    #[test]
    fn fuchsian_genus2_traces_and_relation() {
        let rep = build_fuchsian(2).unwrap();
        let expected = 2.0 + 2.0 * 2f64.sqrt();
        for g in rep.generators() {
            assert!((g.linear.trace() - expected).abs() < 1e-10);
            assert!((g.linear.det() - 1.0).abs() < 1e-12);
        }
        assert!(rep.relation_residual() < RELATION_TOL);
        assert!(rep.symplectic_product().unwrap().identity_residual() < RELATION_TOL);
    }

    #[test]
    fn literal_quarter_turn_conjugates_collapse() {
        // Conjugating by a matrix rotation of π/2 inverts the translation,
        // which is why the construction rotates by kπ/4g instead.
        let t = Mat2::diag(3.0, 1.0 / 3.0);
        let r = Mat2::rotation(PI / 2.0);
        let c = r * t * Mat2::rotation(-PI / 2.0);
        assert!(c.max_abs_diff(t.inverse().unwrap()) < 1e-12);
    }

    #[test]
    fn higher_genus_relation() {
        for g in [3, 4] {
            let rep = build_fuchsian(g).unwrap();
            assert!(rep.relation_residual() < RELATION_TOL, "genus {g}");
        }
        assert!(build_fuchsian(1).is_err());
    }

    #[test]
    fn eval_basics() {
        let rep = build_fuchsian(2).unwrap();
        assert_eq!(rep.eval(&Word::empty()), AffDualMap::IDENTITY);
        let a: Word = "a".parse().unwrap();
        assert_eq!(rep.eval(&a), rep.generators()[0]);
        let w: Word = "abCdB".parse().unwrap();
        let raw: Vec<Letter> = w.letters().iter().chain(w.inverse().letters()).copied().collect();
        assert!(rep.eval_uncached(&raw).identity_residual() < 1e-10);
        rep.eval(&w);
        assert!(rep.cached_words() >= 2);
    }

    #[test]
    fn attach_zero_cocycle_is_identity_operation() {
        let rep = build_fuchsian(2).unwrap();
        let same = rep.attach_cocycle(&[[0.0, 0.0]; 4]).unwrap();
        assert_eq!(same, rep);
        assert!(rep.attach_cocycle(&[[0.0, 0.0]; 3]).is_err());
    }

    #[test]
    fn arbitrary_cocycle_breaks_relation_downstream() {
        let rep = build_fuchsian(2).unwrap();
        let bad = rep
            .attach_cocycle(&[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
            .unwrap();
        assert!(bad.relation_residual() > 1e-3);
    }

    #[test]
    fn identity_element_is_never_a_violation() {
        assert_eq!(classify_element(&AffDualMap::IDENTITY), SpectralClass::Identity);
    }

    #[test]
    fn canonical_certificate_small_depth() {
        let rep = build_fuchsian(2).unwrap();
        let report = check_hyperbolic(&rep, 6).unwrap();
        assert!(report.is_certified(), "{:?}", report.violations);
        assert_eq!(report.stable_norm.value, 0.0);
        assert!(!report.stable_norm.criterion_violated);
        assert_eq!(report.words_checked, words::reduced_word_count(4, 6).unwrap());
    }

    #[test]
    fn boundary_twist_is_flagged() {
        let rep = build_fuchsian(2).unwrap().boundary_twist(0).unwrap();
        let report = check_hyperbolic(&rep, 4).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| v.word == "a".parse().unwrap()));
        assert!(report.stable_norm.value >= 0.5, "{}", report.stable_norm.value);
        assert!(report.stable_norm.criterion_violated);
    }

    #[test]
    fn small_twist_bound_is_strictly_inside() {
        let rep = build_fuchsian(2).unwrap().twist_generator(0, 0.01);
        let bound = stable_norm_bound(&rep, 6).unwrap();
        assert!(bound.value > 0.0 && bound.value < 0.5, "{}", bound.value);
        assert!(!bound.criterion_violated);
    }

    #[test]
    fn sweep_visits_every_word_once() {
        let rep = build_fuchsian(2).unwrap();
        let parts = sweep_partitions(&rep, 4, Vec::new, |acc: &mut Vec<PackedWord>, w, m| {
            assert!(m.max_abs_diff(&rep.eval_uncached(w.unpack().letters())) < 1e-9);
            acc.push(w);
        })
        .unwrap();
        let mut seen: Vec<PackedWord> = parts.into_iter().flatten().collect();
        seen.sort();
        let expected: Vec<PackedWord> = enumerate(4, 4)
            .unwrap()
            .map(|w| PackedWord::pack(&w).unwrap())
            .collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let rep = build_fuchsian(2)
            .unwrap()
            .attach_cocycle(&[[0.1, -0.2], [1.0 / 3.0, 0.0], [0.0, 1e-9], [2.5, -7.0]])
            .unwrap();
        let text = rep.to_json();
        let back = Representation::from_json(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.to_json(), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["genus"], 2);
        assert_eq!(v["generators"].as_array().unwrap().len(), 4);
        assert_eq!(v["generators"][0][0].as_array().unwrap().len(), 4);
        assert_eq!(v["generators"][0][1].as_array().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = r#"{"genus": 2, "generators": [[[1,0,0,1],[0,0]]]}"#;
        assert!(matches!(
            Representation::from_json(bad),
            Err(RepresentationError::GeneratorCount { .. })
        ));
        let neg = r#"{"genus": 1, "generators": [[[-1,0,0,1],[0,0]], [[1,0,0,1],[0,0]]]}"#;
        assert!(matches!(
            Representation::from_json(neg),
            Err(RepresentationError::NonPositiveDeterminant { index: 0, .. })
        ));
    }
}
