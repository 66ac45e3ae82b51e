//! Brute-force cross-checks behind `--verify`.

use std::fmt;

use pandemic_games::game::{pure_nash_equilibria, CostTable, StrategyProfile};
use pandemic_games::oracle::{check_affine, enumerate_pure_ne, grid_argmin};
use pandemic_games::DEFAULT_TOL;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok" } else { "MISMATCH" };
        write!(f, "{status:<8} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Default)]
pub struct Checks {
    pub items: Vec<Check>,
}

impl Checks {
    pub fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.items.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.items.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|c| c.passed)
    }

    /// Solver NE set equals the exhaustive deviation check.
    pub fn nash_sets(&mut self, name: &str, game: &CostTable) {
        let mut solver: Vec<StrategyProfile> = pure_nash_equilibria(game, DEFAULT_TOL);
        let mut oracle = enumerate_pure_ne(game, DEFAULT_TOL);
        solver.sort();
        oracle.sort();
        let passed = solver == oracle;
        let show = |v: &[StrategyProfile]| {
            v.iter().map(|p| game.describe(*p)).collect::<Vec<_>>().join(" ")
        };
        self.record(
            name,
            passed,
            format!("solver [{}] vs oracle [{}]", show(&solver), show(&oracle)),
        );
    }

    pub fn affine<F: Fn(f64) -> f64>(&mut self, name: &str, f: F, lo: f64, hi: f64) {
        let mid = lo + 0.37 * (hi - lo);
        let passed = check_affine(f, lo, mid, hi, DEFAULT_TOL);
        self.record(name, passed, format!("samples at {lo}, {mid}, {hi}"));
    }

    /// `x_claimed` minimizes `f` on `[lo, hi]` up to one grid step or a
    /// value tie with the grid minimum.
    #[allow(clippy::too_many_arguments)]
    pub fn argmin<F: Fn(f64) -> f64>(
        &mut self,
        name: &str,
        f: F,
        lo: f64,
        hi: f64,
        points: usize,
        x_claimed: f64,
        step_tol: f64,
    ) {
        match grid_argmin(&f, lo, hi, points) {
            Ok((x, fx)) => {
                let f_claimed = f(x_claimed);
                let close = (x - x_claimed).abs() <= step_tol;
                let no_worse = f_claimed <= fx + DEFAULT_TOL * fx.abs().max(1.0);
                self.record(
                    name,
                    close || no_worse,
                    format!("claimed x={x_claimed} (f={f_claimed}), grid x={x} (f={fx})"),
                );
            }
            Err(e) => self.record(name, false, e.to_string()),
        }
    }
}
