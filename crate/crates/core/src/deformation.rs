//! Translation cocycles over a fixed linear part: the linear relation
//! they must satisfy, its solution space, coboundaries and purity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::dense::{least_squares, norm, null_space, Dense};
use crate::algebra::{AffDualMap, Mat2};
use crate::representation::{Representation, RepresentationError};

/// Relative rank tolerance for the relation matrix.
pub const RANK_TOL: f64 = 1e-9;
/// The linear parts must satisfy the surface relation to this accuracy.
pub const LINEAR_RELATION_TOL: f64 = 1e-6;
/// Relative fixed-point residual below which a cocycle is a coboundary.
pub const COBOUNDARY_TOL: f64 = 1e-8;
/// Relative fixed-point residual above which a cocycle is pure.
pub const PURE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DeformationError {
    #[error("linear parts violate the surface relation (residual {0:e})")]
    LinearRelation(f64),
    #[error("relation map has a {found}-dimensional null space, expected at least {expected}")]
    RankDeficient { found: usize, expected: usize },
    #[error("amplitude must be finite and non-negative, got {0}")]
    Amplitude(f64),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
}

fn linear_rep(genus: usize, linear: &[Mat2]) -> Result<Representation, DeformationError> {
    let rep = Representation::new(genus, linear.iter().map(|a| AffDualMap::linear(*a)).collect())?;
    let residual = rep.relation_residual();
    if !(residual <= LINEAR_RELATION_TOL) {
        return Err(DeformationError::LinearRelation(residual));
    }
    Ok(rep)
}

fn genus_of(linear: &[Mat2]) -> usize {
    linear.len() / 2
}

/// Translation row of the relator evaluated with cocycle `t`. The bottom
/// row of a product is linear in the bottom rows of its factors, so this
/// is a linear map of `t`.
pub fn relation_map(linear: &[Mat2], t: &[[f64; 2]]) -> Result<[f64; 2], DeformationError> {
    let rep = linear_rep(genus_of(linear), linear)?.attach_cocycle(t)?;
    Ok(rep.eval_uncached(rep.relator().letters()).translation)
}

/// The `2 × 4g` matrix of [`relation_map`] with `t` flattened as
/// `(u₀, v₀, u₁, v₁, …)`.
pub fn relation_matrix(linear: &[Mat2]) -> Result<Dense, DeformationError> {
    let base = linear_rep(genus_of(linear), linear)?;
    let n = 2 * linear.len();
    let mut m = Dense::zeros(2, n);
    let relator = base.relator();
    for j in 0..n {
        let mut t = vec![[0.0; 2]; linear.len()];
        t[j / 2][j % 2] = 1.0;
        let col = base.attach_cocycle(&t)?.eval_uncached(relator.letters()).translation;
        m.set(0, j, col[0]);
        m.set(1, j, col[1]);
    }
    Ok(m)
}

pub fn flatten(t: &[[f64; 2]]) -> Vec<f64> {
    t.iter().flatten().copied().collect()
}

pub fn unflatten(x: &[f64]) -> Vec<[f64; 2]> {
    x.chunks_exact(2).map(|c| [c[0], c[1]]).collect()
}

/// `tᵢ = p(Aᵢ − I)`: the cocycle obtained by conjugating the linear
/// representation by the translation `[[I, 0], [p, 1]]`.
pub fn coboundary(linear: &[Mat2], p: [f64; 2]) -> Vec<[f64; 2]> {
    linear
        .iter()
        .map(|a| {
            let r = a.apply_row(p);
            [r[0] - p[0], r[1] - p[1]]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CocycleSolution {
    pub t: Vec<[f64; 2]>,
    /// Orthonormal basis of the cocycle space, flattened.
    pub basis: Vec<Vec<f64>>,
    /// Rank of the cocycle space modulo coboundaries.
    pub pure_dimension: usize,
    pub relation_residual: f64,
    pub seed: u64,
    pub amplitude: f64,
}

/// A cocycle drawn from the solution space of the relation.
///
/// The coefficients on the orthonormal null-space basis are i.i.d. standard
/// normals from `ChaCha8Rng::seed_from_u64(seed)`, drawn in basis order; the
/// combination is then rescaled to Euclidean norm `amplitude`.
pub fn solve_cocycle(linear: &[Mat2], seed: u64, amplitude: f64) -> Result<CocycleSolution, DeformationError> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(DeformationError::Amplitude(amplitude));
    }
    let genus = genus_of(linear);
    let m = relation_matrix(linear)?;
    let basis = null_space(&m, RANK_TOL);
    let expected = 4 * genus - 2;
    if basis.len() < expected {
        return Err(DeformationError::RankDeficient {
            found: basis.len(),
            expected,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; m.cols()];
    for b in &basis {
        let c: f64 = StandardNormal.sample(&mut rng);
        x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += c * bi);
    }
    let n = norm(&x);
    let scale = if amplitude == 0.0 || n == 0.0 { 0.0 } else { amplitude / n };
    let t = unflatten(&x.iter().map(|xi| xi * scale).collect::<Vec<_>>());

    let rep = linear_rep(genus, linear)?.attach_cocycle(&t)?;
    Ok(CocycleSolution {
        relation_residual: rep.relation_residual(),
        pure_dimension: pure_dimension(linear, &basis),
        t,
        basis,
        seed,
        amplitude,
    })
}

/// Dimension of `span(basis)` modulo the coboundary plane.
pub fn pure_dimension(linear: &[Mat2], basis: &[Vec<f64>]) -> usize {
    let mut rows: Vec<Vec<f64>> = basis.to_vec();
    let cob = [coboundary(linear, [1.0, 0.0]), coboundary(linear, [0.0, 1.0])];
    let cob_rank = rank(&cob.iter().map(|c| flatten(c)).collect::<Vec<_>>());
    rows.extend(cob.iter().map(|c| flatten(c)));
    // Coboundaries already lie in the span, so this equals the basis rank.
    rank(&rows) - cob_rank
}

fn rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    crate::algebra::dense::PivotedQr::new(&Dense::from_rows(rows).transpose()).rank(RANK_TOL)
}

/// Outcome of the common-fixed-line test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Purity {
    /// The cocycle is the coboundary of `p`; the line `p₀x + p₁y = z` is
    /// fixed by the whole image.
    NotPure { p: [f64; 2], relative_residual: f64 },
    Indeterminate { p: [f64; 2], relative_residual: f64 },
    Pure { relative_residual: f64 },
}

impl Purity {
    pub fn is_pure(&self) -> bool {
        matches!(self, Purity::Pure { .. })
    }

    pub fn relative_residual(&self) -> f64 {
        match *self {
            Purity::NotPure { relative_residual, .. }
            | Purity::Indeterminate { relative_residual, .. }
            | Purity::Pure { relative_residual } => relative_residual,
        }
    }
}

/// Least-squares fit of `p(Aᵢ − I) = tᵢ` over all generators.
///
/// The residual is divided by `‖t‖` so that the verdict does not change
/// when the cocycle is rescaled.
pub fn is_pure(rep: &Representation) -> Purity {
    let t = rep.cocycle();
    let tn = norm(&flatten(&t));
    if tn == 0.0 {
        return Purity::NotPure {
            p: [0.0, 0.0],
            relative_residual: 0.0,
        };
    }
    let mut rows = Vec::with_capacity(2 * t.len());
    let mut rhs = Vec::with_capacity(2 * t.len());
    for (g, ti) in rep.generators().iter().zip(&t) {
        let b = g.linear.sub(Mat2::IDENTITY);
        // Component j of p·B is p₀ B₀ⱼ + p₁ B₁ⱼ.
        rows.push(vec![b.a, b.c]);
        rows.push(vec![b.b, b.d]);
        rhs.extend_from_slice(ti);
    }
    let Ok((p, residual)) = least_squares(&Dense::from_rows(&rows), &rhs, RANK_TOL) else {
        // Every linear part fixes a common vector: no conclusion possible.
        return Purity::Indeterminate {
            p: [0.0, 0.0],
            relative_residual: f64::NAN,
        };
    };
    let p = [p[0], p[1]];
    let relative_residual = residual / tn;
    if relative_residual < COBOUNDARY_TOL {
        Purity::NotPure { p, relative_residual }
    } else if relative_residual < PURE_TOL {
        Purity::Indeterminate { p, relative_residual }
    } else {
        Purity::Pure { relative_residual }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::build_fuchsian;

    fn linear() -> Vec<Mat2> {
        build_fuchsian(2).unwrap().linear_parts()
    }

    #[test]
    fn zero_and_coboundary_solve_the_relation() {
        let l = linear();
        let z = relation_map(&l, &[[0.0; 2]; 4]).unwrap();
        assert_eq!(z, [0.0, 0.0]);
        let r = relation_map(&l, &coboundary(&l, [3.0, -1.0])).unwrap();
        assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn matrix_matches_full_product() {
        let l = linear();
        let m = relation_matrix(&l).unwrap();
        let t = [[0.3, -0.1], [0.7, 0.2], [-0.4, 0.05], [0.0, 1.1]];
        let via_matrix = m.mul_vec(&flatten(&t));
        let rep = build_fuchsian(2).unwrap().attach_cocycle(&t).unwrap();
        let full = rep.relator().letters().iter().fold(crate::algebra::Mat3::IDENTITY, |acc, l| {
            acc * rep.letter_image(*l).to_mat3()
        });
        assert!((full.0[2][0] - via_matrix[0]).abs() < 1e-10);
        assert!((full.0[2][1] - via_matrix[1]).abs() < 1e-10);
    }

    #[test]
    fn refuses_broken_linear_part() {
        let mut l = linear();
        // A homothety cancels in the relator; a shear does not.
        l[0].b += 0.01;
        assert!(matches!(relation_map(&l, &[[0.0; 2]; 4]), Err(DeformationError::LinearRelation(_))));
    }

    #[test]
    fn solution_space_dimensions() {
        let s = solve_cocycle(&linear(), 42, 0.1).unwrap();
        assert!(s.basis.len() >= 6);
        assert!(s.pure_dimension >= 4);
        assert!(s.relation_residual < 1e-8);
        assert!((norm(&flatten(&s.t)) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_is_zero_cocycle() {
        let s = solve_cocycle(&linear(), 7, 0.0).unwrap();
        assert!(s.t.iter().all(|t| *t == [0.0, 0.0]));
        assert!(solve_cocycle(&linear(), 7, -1.0).is_err());
    }

    #[test]
    fn seeded_solutions_are_reproducible() {
        let a = solve_cocycle(&linear(), 42, 0.1).unwrap();
        let b = solve_cocycle(&linear(), 42, 0.1).unwrap();
        let c = solve_cocycle(&linear(), 43, 0.1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.t, c.t);
    }

    #[test]
    fn purity_verdicts() {
        let rep = build_fuchsian(2).unwrap();
        assert_eq!(
            is_pure(&rep),
            Purity::NotPure {
                p: [0.0, 0.0],
                relative_residual: 0.0
            }
        );
        let cob = rep.attach_cocycle(&coboundary(&rep.linear_parts(), [3.0, -1.0])).unwrap();
        match is_pure(&cob) {
            Purity::NotPure { p, .. } => {
                assert!((p[0] - 3.0).abs() < 1e-8 && (p[1] + 1.0).abs() < 1e-8, "{p:?}");
            }
            other => panic!("{other:?}"),
        }
        let s = solve_cocycle(&rep.linear_parts(), 42, 0.1).unwrap();
        assert!(is_pure(&rep.attach_cocycle(&s.t).unwrap()).is_pure());
    }
}
