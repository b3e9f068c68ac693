use flagdyn::curve::sample_curve;
use flagdyn::deformation::{coboundary, flatten, is_pure, relation_map, solve_cocycle, unflatten, Purity};
use flagdyn::foliation::classify_flags;
use flagdyn::representation::{build_fuchsian, distinct_element_count, stable_norm_bound};
use flagdyn::words::reduced_word_count;
use flagdyn::{Letter, Mat3, Representation, Word};
use proptest::prelude::*;
use std::sync::OnceLock;

fn fuchsian() -> &'static Representation {
    static R: OnceLock<Representation> = OnceLock::new();
    R.get_or_init(|| build_fuchsian(2).unwrap())
}

fn pure() -> &'static Representation {
    static R: OnceLock<Representation> = OnceLock::new();
    R.get_or_init(|| {
        let base = build_fuchsian(2).unwrap();
        let sol = solve_cocycle(&base.linear_parts(), 42, 0.1).unwrap();
        base.attach_cocycle(&sol.t).unwrap()
    })
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0usize..4, any::<bool>()), 0..=max_len).prop_map(|ls| {
        Word::reduce(ls.into_iter().map(|(i, inv)| Letter::new(i, if inv { -1 } else { 1 })))
    })
}

fn rel_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            num = num.max((a.0[i][j] - b.0[i][j]).abs());
            den = den.max(a.0[i][j].abs());
        }
    }
    num / den
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eval_is_a_homomorphism(u in word(6), v in word(6)) {
        let rep = pure();
        let lhs = rep.eval_uncached(u.mul(&v).letters()).to_mat3();
        let rhs = rep.eval_uncached(u.letters()).compose(&rep.eval_uncached(v.letters())).to_mat3();
        prop_assert!(rel_diff(&lhs, &rhs) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn relation_map_is_linear(
        t in prop::collection::vec(-1.0f64..1.0, 8),
        s in prop::collection::vec(-1.0f64..1.0, 8),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let linear = fuchsian().linear_parts();
        let combo: Vec<f64> = t.iter().zip(&s).map(|(x, y)| a * x + b * y).collect();
        let lhs = relation_map(&linear, &unflatten(&combo)).unwrap();
        let rt = relation_map(&linear, &unflatten(&t)).unwrap();
        let rs = relation_map(&linear, &unflatten(&s)).unwrap();
        for k in 0..2 {
            prop_assert!((lhs[k] - (a * rt[k] + b * rs[k])).abs() < 1e-9);
        }
    }

    #[test]
    fn coboundaries_lie_in_the_null_space(x in -10.0f64..10.0, y in -10.0f64..10.0) {
        let linear = fuchsian().linear_parts();
        let r = relation_map(&linear, &coboundary(&linear, [x, y])).unwrap();
        prop_assert!(r[0].hypot(r[1]) < 1e-9);
    }

    #[test]
    fn purity_is_scale_invariant(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let base = fuchsian();
        let sol = solve_cocycle(&base.linear_parts(), seed, 1.0).unwrap();
        let a = is_pure(&base.attach_cocycle(&sol.t).unwrap());
        let scaled: Vec<[f64; 2]> = sol.t.iter().map(|t| [t[0] * scale, t[1] * scale]).collect();
        let b = is_pure(&base.attach_cocycle(&scaled).unwrap());
        prop_assert_eq!(a.is_pure(), b.is_pure());
        prop_assert!((a.relative_residual() - b.relative_residual()).abs() < 1e-9);
    }

    #[test]
    fn coboundary_purity_recovers_the_point(x in -10.0f64..10.0, y in -10.0f64..10.0) {
        prop_assume!(x.hypot(y) > 1e-3);
        let base = fuchsian();
        let t = coboundary(&base.linear_parts(), [x, y]);
        match is_pure(&base.attach_cocycle(&t).unwrap()) {
            Purity::NotPure { p, .. } => prop_assert!((p[0] - x).abs() < 1e-8 && (p[1] - y).abs() < 1e-8),
            other => prop_assert!(false, "expected a recovered point, got {:?}", other),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stable_norm_bound_grows_with_length(index in 0usize..4, log in -1.5f64..1.5) {
        let rep = fuchsian().twist_generator(index, log);
        let mut prev = 0.0;
        for n in 1..=5 {
            let b = stable_norm_bound(&rep, n).unwrap().value;
            prop_assert!(b >= prev, "bound fell from {} to {} at length {}", prev, b, n);
            prev = b;
        }
    }
}

#[test]
fn solved_cocycles_satisfy_the_relation() {
    let linear = fuchsian().linear_parts();
    for seed in 0..20 {
        let sol = solve_cocycle(&linear, seed, 0.1).unwrap();
        let r = relation_map(&linear, &sol.t).unwrap();
        assert!(r[0].hypot(r[1]) < 1e-12, "seed {seed}");
        let n: f64 = flatten(&sol.t).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 0.1).abs() < 1e-12);
    }
}

#[test]
fn distinct_elements_undercount_words_at_length_8() {
    let words = reduced_word_count(4, 8).unwrap();
    let distinct = distinct_element_count(fuchsian(), 8).unwrap();
    assert!(distinct < words, "{distinct} distinct of {words} words");
}

#[test]
fn deeper_curves_refine_shallower_ones() {
    let rep = pure();
    let curves: Vec<_> = (2..=6).map(|d| sample_curve(rep, d).unwrap()).collect();
    for pair in curves.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        assert!(b.len() > a.len());
        assert!(b.max_theta_gap() <= a.max_theta_gap());
        // Every shallow sample survives in the deeper curve.
        for s in a.samples() {
            let t = b.sample_near(s.theta, 0.0).expect("sample kept");
            assert_eq!(t.delta, s.delta);
        }
    }
}

#[test]
fn classification_ignores_thread_count() {
    let rep = pure();
    let curve = sample_curve(rep, 6).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| classify_flags(rep, &curve, 2000, 9).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn curve_sampling_ignores_thread_count() {
    let rep = pure();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_curve(rep, 5).unwrap())
    };
    let a = run(1);
    let b = run(6);
    assert_eq!(a.samples(), b.samples());
}
