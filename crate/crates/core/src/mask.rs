//! The Mask Game.
//!
//! Two players meet and each picks `no` (free, no protection), `out` (protects
//! the other player from the wearer) or `in` (protects the wearer). An
//! infected player carries the cost of infection in every cell; a susceptible
//! player pays it only when facing an infected player and neither the
//! susceptible wears `in` nor the infected wears `out`.
//!
//! The Bayesian and efficiency variants collapse `out` and `in` into a single
//! `use` action with cost `c_use`.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_probability, Error, Result};
use crate::game::{ActionSet, CostTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaskAction {
    No,
    Out,
    In,
}

impl MaskAction {
    /// Action order used for every mask cost table.
    pub const ALL: [MaskAction; 3] = [MaskAction::No, MaskAction::Out, MaskAction::In];

    pub fn label(self) -> &'static str {
        match self {
            MaskAction::No => "no",
            MaskAction::Out => "out",
            MaskAction::In => "in",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<MaskAction> {
        Self::ALL.get(index).copied()
    }

    pub fn is_worn(self) -> bool {
        self != MaskAction::No
    }

    pub fn action_set() -> ActionSet {
        ActionSet::new(Self::ALL.map(MaskAction::label)).expect("labels are unique")
    }
}

impl fmt::Display for MaskAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HealthStatus {
    Susceptible,
    Infected,
}

impl HealthStatus {
    pub fn label(self) -> &'static str {
        match self {
            HealthStatus::Susceptible => "susceptible",
            HealthStatus::Infected => "infected",
        }
    }
}

impl fmt::Display for HealthStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for HealthStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "susceptible" | "s" | "S" => Ok(HealthStatus::Susceptible),
            "infected" | "i" | "I" => Ok(HealthStatus::Infected),
            other => Err(Error::invalid(
                "status",
                format!("unknown health status `{other}`"),
            )),
        }
    }
}

/// Mask game cost constants.
///
/// Validated construction requires `0 < c_out < c_in < c_infection` and
/// `0 < c_use < c_infection`. [`MaskCosts::subsidized`] may lower `c_out` and
/// `c_use` to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaskCosts {
    c_out: f64,
    c_in: f64,
    c_use: f64,
    c_infection: f64,
}

impl MaskCosts {
    pub fn new(c_out: f64, c_in: f64, c_use: f64, c_infection: f64) -> Result<Self> {
        let all_finite = [c_out, c_in, c_use, c_infection]
            .iter()
            .all(|c| c.is_finite());
        if !all_finite || !(0.0 < c_out && c_out < c_in && c_in < c_infection) {
            return Err(Error::invalid(
                "c_out",
                format!(
                    "ordering invariant 0 < c_out < c_in < c_infection violated \
                     (c_out={c_out}, c_in={c_in}, c_infection={c_infection})"
                ),
            ));
        }
        if !(0.0 < c_use && c_use < c_infection) {
            return Err(Error::invalid(
                "c_use",
                format!(
                    "ordering invariant 0 < c_use < c_infection violated \
                     (c_use={c_use}, c_infection={c_infection})"
                ),
            ));
        }
        Ok(Self {
            c_out,
            c_in,
            c_use,
            c_infection,
        })
    }

    pub fn c_out(&self) -> f64 {
        self.c_out
    }

    pub fn c_in(&self) -> f64 {
        self.c_in
    }

    pub fn c_use(&self) -> f64 {
        self.c_use
    }

    pub fn c_infection(&self) -> f64 {
        self.c_infection
    }

    /// Price of wearing `action` in the three-action game.
    pub fn action_cost(&self, action: MaskAction) -> f64 {
        match action {
            MaskAction::No => 0.0,
            MaskAction::Out => self.c_out,
            MaskAction::In => self.c_in,
        }
    }

    /// Lowers the price of `use` and `out` masks by `subsidy`, floored at zero.
    pub fn subsidized(&self, subsidy: f64) -> MaskCosts {
        MaskCosts {
            c_out: (self.c_out - subsidy).max(0.0),
            c_use: (self.c_use - subsidy).max(0.0),
            ..*self
        }
    }
}

/// Prior infection probability `rho` and the opponent's probability `p1` of
/// playing `use`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BayesianSetting {
    pub rho: f64,
    pub p1: f64,
}

impl BayesianSetting {
    pub fn new(rho: f64, p1: f64) -> Result<Self> {
        Ok(Self {
            rho: check_probability("rho", rho)?,
            p1: check_probability("p1", p1)?,
        })
    }
}

/// Mask efficiency multipliers: `a` on the wearer's chance of being infected,
/// `b` on the chance an infected wearer transmits. Smaller is better.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyParams {
    pub a: f64,
    pub b: f64,
}

impl EfficiencyParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let a = check_probability("a", a)?;
        let b = check_probability("b", b)?;
        if a > b {
            return Err(Error::invalid(
                "a",
                format!("protection efficiency must not exceed spreading efficiency (a={a}, b={b})"),
            ));
        }
        Ok(Self { a, b })
    }
}

impl Default for EfficiencyParams {
    /// Surgical-mask estimate: `b = 2/3`, `a = b/2`.
    fn default() -> Self {
        Self {
            a: 1.0 / 3.0,
            b: 2.0 / 3.0,
        }
    }
}

fn player_cost(
    own_status: HealthStatus,
    own: MaskAction,
    other_status: HealthStatus,
    other: MaskAction,
    costs: &MaskCosts,
) -> f64 {
    let infection = match (own_status, other_status) {
        (HealthStatus::Infected, _) => costs.c_infection,
        (HealthStatus::Susceptible, HealthStatus::Susceptible) => 0.0,
        (HealthStatus::Susceptible, HealthStatus::Infected) => {
            if own == MaskAction::In || other == MaskAction::Out {
                0.0
            } else {
                costs.c_infection
            }
        }
    };
    costs.action_cost(own) + infection
}

/// Full-information pair game over `(no, out, in)` for the given statuses.
pub fn pair_game(status1: HealthStatus, status2: HealthStatus, costs: &MaskCosts) -> CostTable {
    CostTable::from_fn(MaskAction::action_set(), MaskAction::action_set(), |i, j| {
        let (x, y) = (MaskAction::ALL[i], MaskAction::ALL[j]);
        (
            player_cost(status1, x, status2, y, costs),
            player_cost(status2, y, status1, x, costs),
        )
    })
    .expect("mask costs are finite and non-negative")
}

/// Expected cost of player 2 who plays `use` with probability `p2` when
/// neither player knows the statuses.
pub fn bayesian_expected_cost(setting: &BayesianSetting, p2: f64, costs: &MaskCosts) -> f64 {
    let BayesianSetting { rho, p1 } = *setting;
    let (c_use, c_i) = (costs.c_use, costs.c_infection);
    let susceptible = (1.0 - rho) * (p2 * c_use)
        + rho * (p2 * c_use + (1.0 - p2) * ((1.0 - p1) * c_i + p1 * 0.0));
    let infected = p2 * (c_i + c_use) + (1.0 - p2) * c_i;
    (1.0 - rho) * susceptible + rho * infected
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BayesianCondition {
    /// `rho (1 - rho) (1 - p1)`; compared against `c_use / c_infection`.
    pub threshold: f64,
    pub wear: bool,
}

impl BayesianCondition {
    /// Largest mask price at which wearing still lowers the expected cost.
    pub fn price_threshold(&self, costs: &MaskCosts) -> f64 {
        self.threshold * costs.c_infection
    }
}

/// Wearing lowers the expected cost iff `c_use / c_infection` is strictly
/// below `rho (1 - rho) (1 - p1)`.
pub fn bayesian_mask_condition(setting: &BayesianSetting, costs: &MaskCosts) -> BayesianCondition {
    let threshold = setting.rho * (1.0 - setting.rho) * (1.0 - setting.p1);
    BayesianCondition {
        threshold,
        wear: costs.c_use / costs.c_infection < threshold,
    }
}

/// Cost-minimizing `p2`. The cost is affine in `p2`, so this is 0 or 1;
/// indifference resolves to 0.
pub fn bayesian_best_p2(setting: &BayesianSetting, costs: &MaskCosts) -> f64 {
    if bayesian_mask_condition(setting, costs).wear {
        1.0
    } else {
        0.0
    }
}

/// Expected cost of a susceptible player facing an infected one when both
/// wear a mask with the same probability `p`.
pub fn efficiency_expected_cost(p: f64, eff: &EfficiencyParams, costs: &MaskCosts) -> f64 {
    let EfficiencyParams { a, b } = *eff;
    let (c_use, c_i) = (costs.c_use, costs.c_infection);
    p * p * (c_use + c_i * a * b)
        + p * (1.0 - p) * (c_use + c_i * a)
        + (1.0 - p) * p * (c_i * b)
        + (1.0 - p) * (1.0 - p) * c_i
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyAnalysis {
    /// Unconstrained minimizer of the quadratic cost; `None` when the cost is
    /// linear in `p` (`a = 1` or `b = 1`).
    pub stationary_p: Option<f64>,
    /// `2 c_infection (1 - a)(1 - b)`.
    pub second_derivative: f64,
    /// `1 - a b`; wearing always beats never wearing iff `c_use / c_infection`
    /// is strictly below it.
    pub use_beats_no_threshold: f64,
    pub use_beats_no: bool,
    /// Minimizer of the cost over `[0, 1]`.
    pub best_p: f64,
    pub degenerate: bool,
}

pub fn efficiency_analysis(eff: &EfficiencyParams, costs: &MaskCosts) -> EfficiencyAnalysis {
    let EfficiencyParams { a, b } = *eff;
    let (c_use, c_i) = (costs.c_use, costs.c_infection);
    let second_derivative = 2.0 * c_i * (1.0 - a) * (1.0 - b);
    let use_beats_no_threshold = 1.0 - a * b;
    let use_beats_no = c_use / c_i < use_beats_no_threshold;
    let degenerate = second_derivative <= 0.0;
    let cost = |p: f64| efficiency_expected_cost(p, eff, costs);

    let (stationary_p, best_p) = if degenerate {
        let best = if cost(1.0) < cost(0.0) { 1.0 } else { 0.0 };
        (None, best)
    } else {
        let stationary = (2.0 * c_i - c_i * (a + b) - c_use) / second_derivative;
        let clamped = stationary.clamp(0.0, 1.0);
        let mut best = clamped;
        for edge in [0.0, 1.0] {
            if cost(edge) < cost(best) {
                best = edge;
            }
        }
        (Some(stationary), best)
    };

    EfficiencyAnalysis {
        stationary_p,
        second_derivative,
        use_beats_no_threshold,
        use_beats_no,
        best_p,
        degenerate,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplayerOutcome {
    pub actions: Vec<MaskAction>,
    /// Set when nobody is infected. The assignment still gives every
    /// susceptible player `in`, although the two-player game with no infected
    /// player has `(no, no)` as its equilibrium.
    pub no_infected: bool,
}

/// Equilibrium assignment when every player meets every other: infected play
/// `no`, susceptible play `in`.
pub fn multiplayer_equilibrium(statuses: &[HealthStatus]) -> Result<MultiplayerOutcome> {
    if statuses.is_empty() {
        return Err(Error::invalid("statuses", "at least one player is required"));
    }
    let actions = statuses
        .iter()
        .map(|s| match s {
            HealthStatus::Infected => MaskAction::No,
            HealthStatus::Susceptible => MaskAction::In,
        })
        .collect();
    Ok(MultiplayerOutcome {
        actions,
        no_infected: !statuses.contains(&HealthStatus::Infected),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplayerSoCondition {
    /// True when the equilibrium is also the social optimum.
    pub holds: bool,
    /// `c_in / c_out`
    pub lhs: f64,
    /// `rho / (1 - rho)`; infinite at `rho = 1`.
    pub rhs: f64,
}

impl MultiplayerSoCondition {
    pub fn rhs_unbounded(&self) -> bool {
        self.rhs.is_infinite()
    }
}

pub fn multiplayer_so_condition(rho: f64, costs: &MaskCosts) -> Result<MultiplayerSoCondition> {
    let rho = check_probability("rho", rho)?;
    let lhs = costs.c_in / costs.c_out;
    if rho == 1.0 {
        return Ok(MultiplayerSoCondition {
            holds: true,
            lhs,
            rhs: f64::INFINITY,
        });
    }
    let rhs = rho / (1.0 - rho);
    Ok(MultiplayerSoCondition {
        holds: lhs < rhs,
        lhs,
        rhs,
    })
}
