//! Brute-force checkers, independent of the closed-form and solver code paths
//! they are used to verify.

use crate::error::{Error, Result};
use crate::game::{CostTable, StrategyProfile};

/// Tests the equilibrium definition on every profile by trying every
/// unilateral deviation.
pub fn enumerate_pure_ne(game: &CostTable, tol: f64) -> Vec<StrategyProfile> {
    let mut out = Vec::new();
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            let (c1, c2) = game.cost(StrategyProfile::new(i, j));
            let row_deviates =
                (0..game.rows()).any(|k| game.cost(StrategyProfile::new(k, j)).0 < c1 - tol);
            let col_deviates =
                (0..game.cols()).any(|k| game.cost(StrategyProfile::new(i, k)).1 < c2 - tol);
            if !row_deviates && !col_deviates {
                out.push(StrategyProfile::new(i, j));
            }
        }
    }
    out
}

/// Minimum of `f` over `steps` evenly spaced points of `[lo, hi]`
/// (endpoints included). Ties go to the smaller `x`.
pub fn grid_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize) -> Result<(f64, f64)> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || steps < 2 {
        return Err(Error::invalid(
            "grid",
            format!("need lo < hi and at least 2 points (lo={lo}, hi={hi}, steps={steps})"),
        ));
    }
    let h = (hi - lo) / (steps - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..steps {
        let x = if k == steps - 1 { hi } else { lo + k as f64 * h };
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain(format!("non-finite value {y} at x = {x}")));
        }
        if best.is_none_or(|(_, b)| y < b) {
            best = Some((x, y));
        }
    }
    Ok(best.expect("at least two samples"))
}

/// True iff `(x1, f(x1))`, `(x2, f(x2))`, `(x3, f(x3))` lie on one line.
///
/// The middle value is compared against the chord through the outer two;
/// `tol` is absolute for values of magnitude up to 1 and relative above.
/// Returns false for repeated sample points.
pub fn check_affine<F: Fn(f64) -> f64>(f: F, x1: f64, x2: f64, x3: f64, tol: f64) -> bool {
    if x1 == x2 || x2 == x3 || x1 == x3 {
        return false;
    }
    let (y1, y2, y3) = (f(x1), f(x2), f(x3));
    let chord = y1 + (y3 - y1) * (x2 - x1) / (x3 - x1);
    let scale = 1f64.max(y1.abs()).max(y2.abs()).max(y3.abs());
    (y2 - chord).abs() <= tol * scale
}
