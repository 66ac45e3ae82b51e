//! Two-player normal-form games over costs.
//!
//! Every entry of a [`CostTable`] is a cost pair, and both players minimize
//! their own coordinate. All solvers return every tied solution (within a
//! caller-supplied absolute tolerance) in row-major order.

use std::fmt;

use crate::error::{Error, Result};

/// Ordered, non-empty list of unique action labels for one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSet {
    labels: Vec<String>,
}

impl ActionSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::invalid("actions", "at least one action is required"));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::invalid(
                    "actions",
                    format!("duplicate action label `{label}`"),
                ));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// A pure strategy profile: one action index per player.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    pub action_p1: usize,
    pub action_p2: usize,
}

impl StrategyProfile {
    pub const fn new(action_p1: usize, action_p2: usize) -> Self {
        Self {
            action_p1,
            action_p2,
        }
    }
}

/// Two-player cost bimatrix. Player 1 picks the row, player 2 the column.
#[derive(Clone, Debug, PartialEq)]
pub struct CostTable {
    actions_p1: ActionSet,
    actions_p2: ActionSet,
    // row-major, rows = player 1 actions
    costs: Vec<(f64, f64)>,
}

impl CostTable {
    /// Builds a table from `rows[i][j] = (cost_p1, cost_p2)`.
    pub fn new(
        actions_p1: ActionSet,
        actions_p2: ActionSet,
        rows: Vec<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        if rows.len() != actions_p1.len() {
            return Err(Error::invalid(
                "costs",
                format!(
                    "expected {} rows, got {}",
                    actions_p1.len(),
                    rows.len()
                ),
            ));
        }
        let mut costs = Vec::with_capacity(actions_p1.len() * actions_p2.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != actions_p2.len() {
                return Err(Error::invalid(
                    "costs",
                    format!(
                        "row {i} has {} entries, expected {}",
                        row.len(),
                        actions_p2.len()
                    ),
                ));
            }
            for (j, &(c1, c2)) in row.iter().enumerate() {
                if !(c1.is_finite() && c2.is_finite() && c1 >= 0.0 && c2 >= 0.0) {
                    return Err(Error::invalid(
                        "costs",
                        format!("entry ({i}, {j}) = ({c1}, {c2}) is not finite and non-negative"),
                    ));
                }
            }
            costs.extend(row);
        }
        Ok(Self {
            actions_p1,
            actions_p2,
            costs,
        })
    }

    /// Builds a table by evaluating `f(row, col)` over the action cross-product.
    pub fn from_fn<F>(actions_p1: ActionSet, actions_p2: ActionSet, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> (f64, f64),
    {
        let rows = (0..actions_p1.len())
            .map(|i| (0..actions_p2.len()).map(|j| f(i, j)).collect())
            .collect();
        Self::new(actions_p1, actions_p2, rows)
    }

    pub fn actions(&self, player: Player) -> &ActionSet {
        match player {
            Player::One => &self.actions_p1,
            Player::Two => &self.actions_p2,
        }
    }

    pub fn rows(&self) -> usize {
        self.actions_p1.len()
    }

    pub fn cols(&self) -> usize {
        self.actions_p2.len()
    }

    pub fn cost(&self, profile: StrategyProfile) -> (f64, f64) {
        self.costs[profile.action_p1 * self.cols() + profile.action_p2]
    }

    /// Cost to `player` when it plays `own` and the opponent plays `other`.
    pub fn player_cost(&self, player: Player, own: usize, other: usize) -> f64 {
        match player {
            Player::One => self.cost(StrategyProfile::new(own, other)).0,
            Player::Two => self.cost(StrategyProfile::new(other, own)).1,
        }
    }

    /// All profiles in row-major order.
    pub fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        let cols = self.cols();
        (0..self.rows() * cols).map(move |k| StrategyProfile::new(k / cols, k % cols))
    }

    pub fn contains(&self, profile: StrategyProfile) -> bool {
        profile.action_p1 < self.rows() && profile.action_p2 < self.cols()
    }

    /// Swaps the roles of the two players.
    pub fn transpose(&self) -> CostTable {
        let mut costs = Vec::with_capacity(self.costs.len());
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                let (c1, c2) = self.cost(StrategyProfile::new(i, j));
                costs.push((c2, c1));
            }
        }
        CostTable {
            actions_p1: self.actions_p2.clone(),
            actions_p2: self.actions_p1.clone(),
            costs,
        }
    }

    /// Sub-game keeping only the listed actions, in the given order.
    pub fn restrict(&self, keep_p1: &[usize], keep_p2: &[usize]) -> Result<CostTable> {
        let pick = |set: &ActionSet, keep: &[usize]| -> Result<ActionSet> {
            if let Some(&bad) = keep.iter().find(|&&k| k >= set.len()) {
                return Err(Error::invalid(
                    "actions",
                    format!("action index {bad} out of range"),
                ));
            }
            ActionSet::new(keep.iter().map(|&k| set.label(k).to_owned()))
        };
        let actions_p1 = pick(&self.actions_p1, keep_p1)?;
        let actions_p2 = pick(&self.actions_p2, keep_p2)?;
        CostTable::from_fn(actions_p1, actions_p2, |i, j| {
            self.cost(StrategyProfile::new(keep_p1[i], keep_p2[j]))
        })
    }

    /// Adds `shift` to every cost of `player`.
    pub fn shifted(&self, player: Player, shift: f64) -> Result<CostTable> {
        CostTable::from_fn(self.actions_p1.clone(), self.actions_p2.clone(), |i, j| {
            let (c1, c2) = self.cost(StrategyProfile::new(i, j));
            match player {
                Player::One => (c1 + shift, c2),
                Player::Two => (c1, c2 + shift),
            }
        })
    }

    /// Formats a profile as `(row_label, col_label)`.
    pub fn describe(&self, profile: StrategyProfile) -> String {
        format!(
            "({}, {})",
            self.actions_p1.label(profile.action_p1),
            self.actions_p2.label(profile.action_p2)
        )
    }
}

impl fmt::Display for CostTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>6} |", "")?;
        for label in self.actions_p2.labels() {
            write!(f, " {label:>22}")?;
        }
        writeln!(f)?;
        for i in 0..self.rows() {
            write!(f, "{:>6} |", self.actions_p1.label(i))?;
            for j in 0..self.cols() {
                let (c1, c2) = self.cost(StrategyProfile::new(i, j));
                write!(f, " {:>22}", format!("({c1}, {c2})"))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Every solution concept for one table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionReport {
    pub pure_nash: Vec<StrategyProfile>,
    pub social_optima: Vec<StrategyProfile>,
    pub dominant_p1: Vec<usize>,
    pub dominant_p2: Vec<usize>,
}

/// Actions of `player` minimizing its cost against `opponent_action`; all
/// actions within `tol` of the minimum are returned.
pub fn best_responses(
    game: &CostTable,
    player: Player,
    opponent_action: usize,
    tol: f64,
) -> Vec<usize> {
    let n = game.actions(player).len();
    let costs: Vec<f64> = (0..n)
        .map(|a| game.player_cost(player, a, opponent_action))
        .collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    (0..n).filter(|&a| costs[a] <= best + tol).collect()
}

pub fn is_pure_nash(game: &CostTable, profile: StrategyProfile, tol: f64) -> bool {
    best_responses(game, Player::One, profile.action_p2, tol).contains(&profile.action_p1)
        && best_responses(game, Player::Two, profile.action_p1, tol).contains(&profile.action_p2)
}

/// Profiles where neither player can lower its own cost by more than `tol`
/// through a unilateral deviation, in row-major order.
pub fn pure_nash_equilibria(game: &CostTable, tol: f64) -> Vec<StrategyProfile> {
    // best-response indicator per column (player 1) and per row (player 2)
    let mut br1 = vec![false; game.rows() * game.cols()];
    for j in 0..game.cols() {
        for i in best_responses(game, Player::One, j, tol) {
            br1[i * game.cols() + j] = true;
        }
    }
    let mut out = Vec::new();
    for i in 0..game.rows() {
        for j in best_responses(game, Player::Two, i, tol) {
            if br1[i * game.cols() + j] {
                out.push(StrategyProfile::new(i, j));
            }
        }
    }
    out
}

/// Profiles whose total cost is within `tol` of the minimum total cost.
pub fn social_optima(game: &CostTable, tol: f64) -> Vec<StrategyProfile> {
    let total = |p: StrategyProfile| {
        let (c1, c2) = game.cost(p);
        c1 + c2
    };
    let best = game.profiles().map(total).fold(f64::INFINITY, f64::min);
    game.profiles().filter(|&p| total(p) <= best + tol).collect()
}

/// Dominant actions of `player`.
///
/// Weak: the action is a best response to every opponent action. Strict: the
/// action beats every other action by more than `tol` against every opponent
/// action.
pub fn dominant_actions(game: &CostTable, player: Player, weak: bool, tol: f64) -> Vec<usize> {
    let own = game.actions(player).len();
    let other = game.actions(player.opponent()).len();
    (0..own)
        .filter(|&a| {
            (0..other).all(|o| {
                let ca = game.player_cost(player, a, o);
                (0..own).filter(|&k| k != a).all(|k| {
                    let ck = game.player_cost(player, k, o);
                    if weak {
                        ca <= ck + tol
                    } else {
                        ca < ck - tol
                    }
                })
            })
        })
        .collect()
}

/// Runs every solver with weak dominance.
pub fn solve(game: &CostTable, tol: f64) -> SolutionReport {
    SolutionReport {
        pure_nash: pure_nash_equilibria(game, tol),
        social_optima: social_optima(game, tol),
        dominant_p1: dominant_actions(game, Player::One, true, tol),
        dominant_p2: dominant_actions(game, Player::Two, true, tol),
    }
}
