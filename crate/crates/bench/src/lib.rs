//! Fixtures shared by the benchmarks under `benches/`.

use flagdyn::algebra::line_through;
use flagdyn::curve::JordanCurve;
use flagdyn::deformation::solve_cocycle;
use flagdyn::foliation::FlagPoint;
use flagdyn::representation::build_fuchsian;
use flagdyn::{ProjPoint, Representation};

/// Genus 2 with the seed-42, amplitude-0.1 cocycle.
pub fn pure_representation() -> Representation {
    let base = build_fuchsian(2).expect("genus 2 is supported");
    let sol = solve_cocycle(&base.linear_parts(), 42, 0.1).expect("relation holds");
    base.attach_cocycle(&sol.t).expect("cocycle length matches")
}

/// `n` flags through points just off the curve, on a fixed grid of
/// directions so runs are comparable.
pub fn flag_grid(curve: &JordanCurve, n: usize) -> Vec<FlagPoint> {
    let sigma = curve.max_abs_delta();
    (0..n)
        .filter_map(|i| {
            let t1 = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            let t2 = (t1 + 1.0).rem_euclid(std::f64::consts::PI);
            let point = |t: f64, e: f64| {
                ProjPoint::new([t.cos(), t.sin(), curve.delta_at(t).ok()? + e]).ok()
            };
            let x = point(t1, 0.3 * sigma)?;
            let y = point(t2, -0.2 * sigma)?;
            FlagPoint::new(x, line_through(&x, &y).ok()?).ok()
        })
        .collect()
}
