//! Closed-form small-matrix algebra and projective geometry of RP².
//!
//! Everything here is hand-rolled: 2×2 eigen-decomposition by the quadratic
//! formula and 3×3 matrices only in the block form of the dual affine group,
//! whose spectrum is `{λ₁, λ₂, 1}` and is read off the 2×2 linear part.

pub mod dense;

use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum admissible `|det|` for inversion.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Incidence tolerance between normalized points and lines.
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Relative discriminant gate of [`eig2`].
pub const EIG_SEPARATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("singular matrix (det = {0:e})")]
    Singular(f64),
    #[error("elliptic or parabolic spectrum (discriminant {0:e})")]
    NonRealSpectrum(f64),
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("points coincide, no unique line through them")]
    CoincidentPoints,
    #[error("matrix is not in dual-affine block form (residual {0:e})")]
    NotBlockForm(f64),
}

/// A real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn diag(x: f64, y: f64) -> Self {
        Mat2::new(x, 0.0, 0.0, y)
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn from_row_major(e: [f64; 4]) -> Self {
        Mat2::new(e[0], e[1], e[2], e[3])
    }

    pub fn to_row_major(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn scale(self, s: f64) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn sub(self, o: Mat2) -> Self {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn inverse(self) -> Result<Self, AlgebraError> {
        let det = self.det();
        if det.abs() < SINGULAR_TOL {
            return Err(AlgebraError::Singular(det));
        }
        Ok(Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    /// Column action `A v`.
    pub fn apply(self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Row action `w A`.
    pub fn apply_row(self, w: [f64; 2]) -> [f64; 2] {
        [w[0] * self.a + w[1] * self.c, w[0] * self.b + w[1] * self.d]
    }

    pub fn max_abs_diff(self, o: Mat2) -> f64 {
        let d = self.sub(o);
        d.a.abs().max(d.b.abs()).max(d.c.abs()).max(d.d.abs())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// A real 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(x: f64, y: f64, z: f64) -> Self {
        Mat3([[x, 0.0, 0.0], [0.0, y, 0.0], [0.0, 0.0, z]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i])))
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn cofactor(&self) -> Self {
        let m = &self.0;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        Mat3([
            [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
            [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
            [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
        ])
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat3(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let det = self.det();
        if det.abs() < SINGULAR_TOL {
            return Err(AlgebraError::Singular(det));
        }
        Ok(self.cofactor().transpose().scale(1.0 / det))
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        std::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Max-norm distance after scaling both matrices to unit max-norm, with
    /// the sign chosen to minimize the distance.
    pub fn projective_distance(&self, other: &Mat3) -> f64 {
        let a = self.scale(1.0 / self.max_abs());
        let b = other.scale(1.0 / other.max_abs());
        let diff = |s: f64| {
            let mut m: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    m = m.max((a.0[i][j] - s * b.0[i][j]).abs());
                }
            }
            m
        };
        diff(1.0).min(diff(-1.0))
    }
}

impl Mul for Mat3 {
    type Output = Mat3;

    fn mul(self, o: Mat3) -> Mat3 {
        let (a, b) = (&self.0, &o.0);
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
        }))
    }
}

/// The Cartan involution `M ↦ (Mᵀ)⁻¹`, exchanging the affine group with its
/// dual.
pub fn dual(m: &Mat3) -> Result<Mat3, AlgebraError> {
    Ok(m.inverse()?.transpose())
}

/// An element of the dual affine group, acting on column vectors as
///
/// ```text
/// | A   0 |
/// | w   1 |
/// ```
///
/// with `A` the linear part and `w = (u, v)` the translation row. The point
/// `0 = [0:0:1]` is fixed by every element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffDualMap {
    pub linear: Mat2,
    pub translation: [f64; 2],
}

impl AffDualMap {
    pub const IDENTITY: AffDualMap = AffDualMap {
        linear: Mat2::IDENTITY,
        translation: [0.0, 0.0],
    };

    pub fn new(linear: Mat2, translation: [f64; 2]) -> Self {
        AffDualMap {
            linear,
            translation,
        }
    }

    pub fn linear(linear: Mat2) -> Self {
        AffDualMap::new(linear, [0.0, 0.0])
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &AffDualMap) -> AffDualMap {
        let r = other.linear.apply_row(self.translation);
        let out = AffDualMap {
            linear: self.linear * other.linear,
            translation: [r[0] + other.translation[0], r[1] + other.translation[1]],
        };
        debug_assert!({
            let full = self.to_mat3() * other.to_mat3();
            full.0[0][2] == 0.0 && full.0[1][2] == 0.0
        });
        out
    }

    pub fn inverse(&self) -> Result<AffDualMap, AlgebraError> {
        let inv = self.linear.inverse()?;
        let w = inv.apply_row(self.translation);
        Ok(AffDualMap::new(inv, [-w[0], -w[1]]))
    }

    pub fn to_mat3(&self) -> Mat3 {
        let l = &self.linear;
        let [u, v] = self.translation;
        Mat3([[l.a, l.b, 0.0], [l.c, l.d, 0.0], [u, v, 1.0]])
    }

    /// Read a 3×3 matrix in block form, rescaling so the corner entry is 1.
    pub fn from_mat3(m: &Mat3) -> Result<AffDualMap, AlgebraError> {
        let corner = m.0[2][2];
        if corner.abs() < SINGULAR_TOL {
            return Err(AlgebraError::Singular(corner));
        }
        let n = m.scale(1.0 / corner);
        let off = n.0[0][2].abs().max(n.0[1][2].abs());
        if off > 1e-12 * n.max_abs() {
            return Err(AlgebraError::NotBlockForm(off));
        }
        Ok(AffDualMap::new(
            Mat2::new(n.0[0][0], n.0[0][1], n.0[1][0], n.0[1][1]),
            [n.0[2][0], n.0[2][1]],
        ))
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let xy = self.linear.apply([v[0], v[1]]);
        let z = self.translation[0] * v[0] + self.translation[1] * v[1] + v[2];
        [xy[0], xy[1], z]
    }

    pub fn apply_point(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::new(self.apply(p.0)).expect("invertible map sends nonzero vectors to nonzero vectors")
    }

    pub fn max_abs_diff(&self, o: &AffDualMap) -> f64 {
        self.linear
            .max_abs_diff(o.linear)
            .max((self.translation[0] - o.translation[0]).abs())
            .max((self.translation[1] - o.translation[1]).abs())
    }

    /// Distance from the identity in the corner-normalized block form.
    pub fn identity_residual(&self) -> f64 {
        self.max_abs_diff(&AffDualMap::IDENTITY)
    }
}

/// Real eigen-decomposition of a 2×2 matrix with `|λ₁| ≥ |λ₂|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair2 {
    pub lambda1: f64,
    pub lambda2: f64,
    pub v1: [f64; 2],
    pub v2: [f64; 2],
}

fn unit_eigenvector(m: Mat2, lambda: f64) -> [f64; 2] {
    // Two candidate null vectors of (A − λI), take the better conditioned.
    let p = [m.b, lambda - m.a];
    let q = [lambda - m.d, m.c];
    let np = p[0].hypot(p[1]);
    let nq = q[0].hypot(q[1]);
    let (v, n) = if np >= nq { (p, np) } else { (q, nq) };
    if n == 0.0 {
        // A = λI up to rounding: any vector works, pick the axis.
        return [1.0, 0.0];
    }
    let mut v = [v[0] / n, v[1] / n];
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}

/// Eigen-decomposition by the quadratic formula.
///
/// Fails on complex or nearly repeated spectra, i.e. elliptic or parabolic
/// linear parts.
pub fn eig2(m: Mat2) -> Result<EigenPair2, AlgebraError> {
    let tr = m.trace();
    let det = m.det();
    let disc = tr * tr - 4.0 * det;
    let scale = tr * tr + 4.0 * det.abs();
    if disc <= EIG_SEPARATION_TOL * scale.max(1.0) {
        return Err(AlgebraError::NonRealSpectrum(disc));
    }
    let root = disc.sqrt();
    let lambda1 = 0.5 * (tr + tr.signum() * root);
    if lambda1 == 0.0 {
        return Err(AlgebraError::Singular(det));
    }
    let lambda2 = det / lambda1;
    Ok(EigenPair2 {
        lambda1,
        lambda2,
        v1: unit_eigenvector(m, lambda1),
        v2: unit_eigenvector(m, lambda2),
    })
}

fn normalize3(v: [f64; 3]) -> Result<[f64; 3], AlgebraError> {
    let m = v[0].abs().max(v[1].abs()).max(v[2].abs());
    if m == 0.0 || !m.is_finite() {
        return Err(AlgebraError::ZeroVector);
    }
    let mut out = v.map(|x| x / m);
    let first = out.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
    if first < 0.0 {
        out = out.map(|x| -x);
    }
    // Canonicalize signed zeros so equal classes hash equally.
    Ok(out.map(|x| if x == 0.0 { 0.0 } else { x }))
}

fn cross(p: [f64; 3], q: [f64; 3]) -> [f64; 3] {
    [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ]
}

fn dot(p: [f64; 3], q: [f64; 3]) -> f64 {
    p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
}

fn unit(p: [f64; 3]) -> [f64; 3] {
    let n = dot(p, p).sqrt();
    p.map(|x| x / n)
}

/// A point of RP², normalized so the largest coordinate has absolute value 1
/// and the first nonzero coordinate is positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint(pub(crate) [f64; 3]);

impl ProjPoint {
    /// The saddle fixed point `0 = [0:0:1]` shared by the whole dual affine group.
    pub const ORIGIN: ProjPoint = ProjPoint([0.0, 0.0, 1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self, AlgebraError> {
        normalize3(v).map(ProjPoint)
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    /// Angle in `[0, π/2]` between the two lines of R³.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let (a, b) = (unit(self.0), unit(other.0));
        let c = cross(a, b);
        dot(c, c).sqrt().atan2(dot(a, b).abs())
    }

    /// Ray direction `θ ∈ [0, π)` of `[x:y]`, or `None` at the origin.
    pub fn direction(&self) -> Option<f64> {
        let [x, y, _] = self.0;
        if x == 0.0 && y == 0.0 {
            return None;
        }
        let mut t = y.atan2(x);
        if t < 0.0 {
            t += std::f64::consts::PI;
        }
        if t >= std::f64::consts::PI {
            t -= std::f64::consts::PI;
        }
        Some(t)
    }
}

/// A projective line `{p : ⟨d, p⟩ = 0}`, same normalization as points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjLine(pub(crate) [f64; 3]);

impl ProjLine {
    /// The line `z = 0`, invariant under every linear map.
    pub const AT_Z_ZERO: ProjLine = ProjLine([0.0, 0.0, 1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self, AlgebraError> {
        normalize3(v).map(ProjLine)
    }

    pub fn coeffs(&self) -> [f64; 3] {
        self.0
    }

    /// Image of the line under `m`: coefficients transform by `(M⁻¹)ᵀ`.
    pub fn transformed(&self, m: &AffDualMap) -> Result<ProjLine, AlgebraError> {
        let inv = m.inverse()?.to_mat3();
        ProjLine::new(inv.transpose().apply(self.0))
    }

    pub fn distance(&self, other: &ProjLine) -> f64 {
        ProjPoint(self.0).distance(&ProjPoint(other.0))
    }

    pub fn contains_origin(&self) -> bool {
        incident(&ProjPoint::ORIGIN, self)
    }
}

/// The line through two distinct points.
pub fn line_through(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine, AlgebraError> {
    let c = cross(unit(p.0), unit(q.0));
    if dot(c, c).sqrt() < 1e-12 {
        return Err(AlgebraError::CoincidentPoints);
    }
    ProjLine::new(c)
}

/// Incidence of normalized coordinates up to [`INCIDENCE_TOL`].
pub fn incident(p: &ProjPoint, d: &ProjLine) -> bool {
    dot(p.0, d.0).abs() < INCIDENCE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn identity_product_and_det() {
        let m = Mat2::new(1.5, -2.0, 0.25, 3.0);
        assert_eq!(Mat2::IDENTITY * m, m);
        assert!((Mat2::diag(3.0, 1.0 / 3.0).det() - 1.0).abs() < EPS);
        assert!(matches!(
            Mat2::new(1.0, 2.0, 2.0, 4.0).inverse(),
            Err(AlgebraError::Singular(_))
        ));
    }

    #[test]
    fn block_product_matches_full_product() {
        let p = AffDualMap::new(Mat2::diag(2.0, 0.5), [0.0, 0.0]);
        let q = AffDualMap::new(Mat2::IDENTITY, [1.0, 1.0]);
        let pq = p.compose(&q);
        let full = p.to_mat3() * q.to_mat3();
        assert_eq!(AffDualMap::from_mat3(&full).unwrap(), pq);
        assert_eq!(pq.linear, Mat2::diag(2.0, 0.5));
        assert_eq!(pq.translation, [1.0, 1.0]);
        // The other order mixes the translation through the linear part.
        let qp = q.compose(&p);
        assert_eq!(qp.translation, [2.0, 0.5]);
    }

    #[test]
    fn inverse_of_affine_dual() {
        let m = AffDualMap::new(Mat2::new(2.0, 1.0, 1.0, 1.0), [0.3, -0.7]);
        let id = m.compose(&m.inverse().unwrap());
        assert!(id.identity_residual() < EPS);
    }

    #[test]
    fn eig2_examples() {
        let e = eig2(Mat2::diag(4.0, 0.25)).unwrap();
        assert_eq!((e.lambda1, e.lambda2), (4.0, 0.25));
        assert_eq!(e.v1, [1.0, 0.0]);
        assert_eq!(e.v2, [0.0, 1.0]);

        let e = eig2(Mat2::new(2.0, 1.0, 0.0, 0.5)).unwrap();
        assert!((e.lambda1 - 2.0).abs() < EPS && (e.lambda2 - 0.5).abs() < EPS);
        assert!((e.v1[0] - 1.0).abs() < EPS && e.v1[1].abs() < EPS);
        // (A − I/2) v = 0 by hand: 1.5 x + y = 0, so v ∝ (1, −3/2).
        let n = (1.0f64 + 2.25).sqrt();
        assert!((e.v2[0] - 1.0 / n).abs() < EPS && (e.v2[1] + 1.5 / n).abs() < EPS);

        let rot = Mat2::rotation(std::f64::consts::FRAC_PI_4);
        assert!(matches!(eig2(rot), Err(AlgebraError::NonRealSpectrum(_))));
        assert!(eig2(Mat2::new(1.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn dual_examples() {
        let d = dual(&Mat3::diag(2.0, 0.5, 1.0)).unwrap();
        assert_eq!(d, Mat3::diag(0.5, 2.0, 1.0));
        assert_eq!(dual(&Mat3::IDENTITY).unwrap(), Mat3::IDENTITY);

        // An affine map (translation in the last column) dualizes into block form.
        let affine = Mat3([[2.0, 1.0, 3.0], [1.0, 1.0, -1.0], [0.0, 0.0, 1.0]]);
        let d = dual(&affine).unwrap();
        // Transpose-inverse computed by hand: the linear part is
        // (A⁻¹)ᵀ and the bottom row is −tᵀ A⁻ᵀ with t = (3, −1).
        let expected = Mat3([[1.0, -1.0, 0.0], [-1.0, 2.0, 0.0], [-4.0, 5.0, 1.0]]);
        for i in 0..3 {
            for j in 0..3 {
                assert!((d.0[i][j] - expected.0[i][j]).abs() < EPS, "{d:?}");
            }
        }
        assert!(AffDualMap::from_mat3(&d).is_ok());
        assert!(dual(&Mat3::diag(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn lines_and_incidence() {
        let p = ProjPoint::new([1.0, 0.0, 0.0]).unwrap();
        let q = ProjPoint::new([0.0, 1.0, 0.0]).unwrap();
        assert_eq!(line_through(&p, &q).unwrap().coeffs(), [0.0, 0.0, 1.0]);
        let x = ProjPoint::new([1.0, 1.0, 1.0]).unwrap();
        let d = ProjLine::new([1.0, -1.0, 0.0]).unwrap();
        assert!(incident(&x, &d));
        assert_eq!(line_through(&p, &p), Err(AlgebraError::CoincidentPoints));
    }

    #[test]
    fn projective_normalization() {
        let p = ProjPoint::new([-2.0, 4.0, 1.0]).unwrap();
        assert_eq!(p.coords(), [0.5, -1.0, -0.25]);
        assert!(ProjPoint::new([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn transformed_line_is_image() {
        let m = AffDualMap::new(Mat2::new(2.0, 1.0, 1.0, 1.0), [0.3, -0.7]);
        let p = ProjPoint::new([1.0, 2.0, 3.0]).unwrap();
        let q = ProjPoint::new([-1.0, 0.5, 2.0]).unwrap();
        let d = line_through(&p, &q).unwrap();
        let image = d.transformed(&m).unwrap();
        assert!(incident(&m.apply_point(&p), &image));
        assert!(incident(&m.apply_point(&q), &image));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn entry() -> impl Strategy<Value = f64> {
        -5.0f64..5.0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eig2_residual_and_reconstruction(a in entry(), b in entry(), c in entry(), d in entry()) {
            let m = Mat2::new(a, b, c, d);
            let e = match eig2(m) {
                Ok(e) => e,
                Err(_) => return Ok(()),
            };
            prop_assume!((e.lambda1 - e.lambda2).abs() > 1e-3);
            prop_assert!(e.lambda1.abs() >= e.lambda2.abs());
            for (l, v) in [(e.lambda1, e.v1), (e.lambda2, e.v2)] {
                let av = m.apply(v);
                let r = (av[0] - l * v[0]).hypot(av[1] - l * v[1]);
                prop_assert!(r < 1e-10, "residual {r}");
            }
            let vm = Mat2::new(e.v1[0], e.v2[0], e.v1[1], e.v2[1]);
            let back = vm * Mat2::diag(e.lambda1, e.lambda2) * vm.inverse().unwrap();
            prop_assert!(back.max_abs_diff(m) < 1e-8);
        }

        #[test]
        fn dual_is_involution(e in prop::array::uniform9(entry())) {
            let m = Mat3([[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]]);
            prop_assume!(m.det().abs() > 1e-3);
            let back = dual(&dual(&m).unwrap()).unwrap();
            prop_assert!(back.projective_distance(&m) < 1e-9);
        }

        #[test]
        fn normalization_scale_invariant(v in prop::array::uniform3(entry()), s in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-6));
            let p = ProjPoint::new(v).unwrap();
            let q = ProjPoint::new(v.map(|x| x * s)).unwrap();
            for i in 0..3 {
                prop_assert!((p.0[i] - q.0[i]).abs() < 1e-12);
            }
            prop_assert_eq!(ProjPoint::new(p.0).unwrap(), p);
        }

        #[test]
        fn block_closure(e in prop::array::uniform12(entry())) {
            let p = AffDualMap::new(Mat2::new(e[0], e[1], e[2], e[3]), [e[4], e[5]]);
            let q = AffDualMap::new(Mat2::new(e[6], e[7], e[8], e[9]), [e[10], e[11]]);
            let full = p.to_mat3() * q.to_mat3();
            prop_assert_eq!(full.0[0][2], 0.0);
            prop_assert_eq!(full.0[1][2], 0.0);
            let block = p.compose(&q).to_mat3();
            for i in 0..3 { for j in 0..3 {
                prop_assert!((full.0[i][j] - block.0[i][j]).abs() < 1e-12);
            }}
        }
    }
}
