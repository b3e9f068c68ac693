//! Checks against values computed here by independent means: naive 3×3
//! products, inverse power iteration, brute-force counting.

use flagdyn::curve::{attracting_fixed_point, repelling_fixed_point};
use flagdyn::deformation::solve_cocycle;
use flagdyn::representation::{build_fuchsian, distinct_element_count, stable_norm_bound};
use flagdyn::words::{reduced_word_count, surface_relator};
use flagdyn::{AffDualMap, Letter, Representation, Word};

type M3 = [[f64; 3]; 3];

fn block(m: &AffDualMap) -> M3 {
    let [a, b, c, d] = m.linear.to_row_major();
    let [u, v] = m.translation;
    [[a, b, 0.0], [c, d, 0.0], [u, v, 1.0]]
}

fn mul(x: &M3, y: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

fn inv(m: &M3) -> M3 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    out
}

fn naive_eval(rep: &Representation, w: &Word) -> M3 {
    let mut acc = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for &l in w.letters() {
        let g = block(&rep.generators()[l.index()]);
        let g = if l.is_inverted() { inv(&g) } else { g };
        acc = mul(&acc, &g);
    }
    acc
}

fn pure() -> Representation {
    let base = build_fuchsian(2).unwrap();
    let sol = solve_cocycle(&base.linear_parts(), 42, 0.1).unwrap();
    base.attach_cocycle(&sol.t).unwrap()
}

/// Direction of the eigenvector of `m` for its smallest eigenvalue.
fn inverse_power(m: &M3) -> [f64; 3] {
    let mi = inv(m);
    let mut x = [0.3, -0.7, 0.5];
    for _ in 0..200 {
        let y: Vec<f64> = (0..3).map(|i| (0..3).map(|k| mi[i][k] * x[k]).sum()).collect();
        let n = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        x = [y[0] / n, y[1] / n, y[2] / n];
    }
    x
}

fn same_point(a: [f64; 3], b: [f64; 3]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dot: f64 = (0..3).map(|i| a[i] * b[i]).sum::<f64>() / (na * nb);
    1.0 - dot.abs()
}

#[test]
fn relator_is_trivial_by_naive_products() {
    for rep in [build_fuchsian(2).unwrap(), pure()] {
        let m = naive_eval(&rep, &surface_relator(2));
        // ±I: the projective class of the identity.
        let s = m[2][2];
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { s } else { 0.0 };
                assert!((x - want).abs() < 1e-9, "entry ({i},{j}) = {x}");
            }
        }
    }
}

#[test]
fn eval_matches_naive_products() {
    let rep = pure();
    for w in ["a", "Ab", "abcdABCD", "ddcBA", "bacDCa"] {
        let w: Word = w.parse().unwrap();
        let ours = block(&rep.eval(&w));
        let theirs = naive_eval(&rep, &w);
        for i in 0..3 {
            for j in 0..3 {
                assert!((ours[i][j] - theirs[i][j]).abs() < 1e-9 * (1.0 + theirs[i][j].abs()), "{w}");
            }
        }
    }
}

#[test]
fn fixed_points_match_power_iteration() {
    let rep = pure();
    for w in ["a", "b", "C", "abD", "cdAB"] {
        let w: Word = w.parse().unwrap();
        let m = naive_eval(&rep, &w);
        let rep_pt = repelling_fixed_point(&rep.eval(&w)).unwrap().coords();
        assert!(same_point(rep_pt, inverse_power(&m)) < 1e-12, "repelling {w}");
        let att = attracting_fixed_point(&rep.eval(&w)).unwrap().coords();
        assert!(same_point(att, inverse_power(&inv(&m))) < 1e-12, "attracting {w}");
    }
}

fn brute_reduced(rank: usize, max_len: usize) -> u64 {
    let letters: Vec<Letter> = (0..rank).flat_map(|i| [Letter::new(i, 1), Letter::new(i, -1)]).collect();
    let mut total = 0u64;
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..=max_len {
        total += frontier.len() as u64;
        frontier = frontier
            .iter()
            .flat_map(|w| {
                letters.iter().filter_map(move |&l| {
                    (w.last() != Some(&l.inverse())).then(|| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
            })
            .collect();
    }
    total
}

#[test]
fn reduced_word_counts_match_brute_force() {
    for rank in 1..=4 {
        for n in 0..=5 {
            assert_eq!(reduced_word_count(rank, n).unwrap(), brute_reduced(rank, n), "rank {rank} length {n}");
        }
    }
}

#[test]
fn distinct_elements_match_pairwise_comparison() {
    let rep = build_fuchsian(2).unwrap();
    let n = 4;
    let mut elems: Vec<M3> = Vec::new();
    let letters: Vec<Letter> = (0..4).flat_map(|i| [Letter::new(i, 1), Letter::new(i, -1)]).collect();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..=n {
        for w in &frontier {
            let m = naive_eval(&rep, &Word::reduce(w.clone()));
            // Projective class: normalize by the corner entry.
            let m = m.map(|row| row.map(|x| x / m[2][2]));
            let seen = elems.iter().any(|e| {
                (0..3).all(|i| (0..3).all(|j| (e[i][j] - m[i][j]).abs() < 1e-7 * (1.0 + m[i][j].abs())))
            });
            if !seen {
                elems.push(m);
            }
        }
        frontier = frontier
            .iter()
            .flat_map(|w| {
                letters.iter().filter_map(move |&l| {
                    (w.last() != Some(&l.inverse())).then(|| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
            })
            .collect();
    }
    let ours = distinct_element_count(&rep, n).unwrap();
    assert_eq!(ours, elems.len() as u64);
    assert!(ours < reduced_word_count(4, n).unwrap());
}

#[test]
fn solution_space_dimensions_meet_the_lower_bounds() {
    // Genus 2 without cone points: at least 4g - 2 = 6 cocycles, and at
    // least 4g - 5 = 3 directions beyond the radiant ones.
    let sol = solve_cocycle(&build_fuchsian(2).unwrap().linear_parts(), 1, 1.0).unwrap();
    assert!(sol.basis.len() >= 6);
    assert!(sol.pure_dimension >= 3);
}

#[test]
fn stable_norm_threshold_is_one_half() {
    let rep = build_fuchsian(2).unwrap();
    let at_edge = stable_norm_bound(&rep.boundary_twist(1).unwrap(), 4).unwrap();
    assert!(at_edge.value >= 0.5 && at_edge.criterion_violated);
    let mild = stable_norm_bound(&rep.twist_generator(1, 0.05), 4).unwrap();
    assert!(mild.value < 0.5 && !mild.criterion_violated);
}
