//! Government policies as transformations of a [`Scenario`], and the
//! evaluation of the citizen games they induce.
//!
//! Evaluation composes the two games: every citizen first decides whether to
//! go out (meeting objective against her life value), and citizens who go out
//! then play the Mask Game with a representative partner. Pairs in which both
//! statuses are known (tested) play the full-information game; all other pairs
//! play the Bayesian game. Citizens are identical apart from health status, so
//! outcomes are computed in expectation over a population of `N`.

use std::fmt;
use std::str::FromStr;

use crate::distancing::{
    group_infection_probability, CostBenefitFunction, Decision, DistancingParams, GroupMeeting,
    MeetingDomain, MeetingObjective,
};
use crate::error::{check_non_negative, check_probability, Error, Result};
use crate::exec::Execution;
use crate::game::{pure_nash_equilibria, CostTable};
use crate::mask::{
    bayesian_best_p2, pair_game, BayesianSetting, EfficiencyParams, HealthStatus, MaskAction,
    MaskCosts,
};
use crate::DEFAULT_TOL;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Policy {
    /// Only `out` masks are allowed, and they must be worn.
    MaskMandate,
    /// Lowers the price of `out` and `use` masks.
    FreeMasks { subsidy: f64 },
    /// Upper bound on the size of a gathering.
    GatheringCap { limit: u32 },
    /// Nobody may leave home.
    Lockdown,
    /// Everyone is tested; statuses become common knowledge.
    MassTesting { per_test_cost: f64 },
    /// Only contact-traced citizens are tested.
    TargetedTesting {
        per_test_cost: f64,
        traced_fraction: f64,
    },
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Policy::MaskMandate | Policy::Lockdown => Ok(()),
            Policy::FreeMasks { subsidy } => check_non_negative("subsidy", subsidy).map(drop),
            Policy::GatheringCap { limit } => {
                if limit == 0 {
                    Err(Error::invalid("limit", "gathering cap must be positive"))
                } else {
                    Ok(())
                }
            }
            Policy::MassTesting { per_test_cost } => {
                check_non_negative("per_test_cost", per_test_cost).map(drop)
            }
            Policy::TargetedTesting {
                per_test_cost,
                traced_fraction,
            } => {
                check_non_negative("per_test_cost", per_test_cost)?;
                check_probability("traced_fraction", traced_fraction).map(drop)
            }
        }
    }

    /// Amount spent on tests for a population of `population`.
    pub fn testing_outlay(&self, population: u64) -> f64 {
        let n = population as f64;
        match *self {
            Policy::MassTesting { per_test_cost } => n * per_test_cost,
            Policy::TargetedTesting {
                per_test_cost,
                traced_fraction,
            } => traced_fraction * (n * per_test_cost),
            _ => 0.0,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::MaskMandate => f.write_str("mask_mandate"),
            Policy::FreeMasks { subsidy } => write!(f, "free_masks:{subsidy}"),
            Policy::GatheringCap { limit } => write!(f, "gathering_cap:{limit}"),
            Policy::Lockdown => f.write_str("lockdown"),
            Policy::MassTesting { per_test_cost } => write!(f, "mass_testing:{per_test_cost}"),
            Policy::TargetedTesting {
                per_test_cost,
                traced_fraction,
            } => write!(f, "targeted_testing:{per_test_cost},{traced_fraction}"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    /// Parses the `Display` form, e.g. `free_masks:50` or
    /// `targeted_testing:20,0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = || {
            Error::invalid(
                "policy",
                format!(
                    "malformed policy `{s}` (expected mask_mandate, free_masks:s, gathering_cap:l, \
                     lockdown, mass_testing:c or targeted_testing:c,f)"
                ),
            )
        };
        let s = s.trim();
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a)),
            None => (s, None),
        };
        let nums = |args: Option<&str>| -> Result<Vec<f64>> {
            args.ok_or_else(malformed)?
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| malformed()))
                .collect()
        };
        let policy = match (kind, args) {
            ("mask_mandate", None) => Policy::MaskMandate,
            ("lockdown", None) => Policy::Lockdown,
            ("free_masks", a) => match nums(a)?.as_slice() {
                [subsidy] => Policy::FreeMasks { subsidy: *subsidy },
                _ => return Err(malformed()),
            },
            ("gathering_cap", Some(a)) => Policy::GatheringCap {
                limit: a.trim().parse().map_err(|_| malformed())?,
            },
            ("mass_testing", a) => match nums(a)?.as_slice() {
                [per_test_cost] => Policy::MassTesting {
                    per_test_cost: *per_test_cost,
                },
                _ => return Err(malformed()),
            },
            ("targeted_testing", a) => match nums(a)?.as_slice() {
                [per_test_cost, traced_fraction] => Policy::TargetedTesting {
                    per_test_cost: *per_test_cost,
                    traced_fraction: *traced_fraction,
                },
                _ => return Err(malformed()),
            },
            _ => return Err(malformed()),
        };
        policy.validate()?;
        Ok(policy)
    }
}

/// Formats a policy list as `a+b+c`, or `none`.
pub fn describe_policies(policies: &[Policy]) -> String {
    if policies.is_empty() {
        "none".to_owned()
    } else {
        policies
            .iter()
            .map(Policy::to_string)
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Effects of the policies applied so far.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolicyState {
    pub policies_applied: Vec<Policy>,
    pub mask_mandate: bool,
    pub gathering_cap: Option<u32>,
    pub lockdown: bool,
    /// Fraction of citizens whose status is known through testing.
    pub revealed_fraction: f64,
    pub warnings: Vec<String>,
}

/// Everything needed to evaluate the citizen games for one population.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub mask_costs: MaskCosts,
    pub efficiency: EfficiencyParams,
    /// `rho` doubles as the share of infected citizens.
    pub bayesian: BayesianSetting,
    pub distancing: DistancingParams,
    pub benefit_fn: CostBenefitFunction,
    pub cost_fn: CostBenefitFunction,
    pub meeting_domain: MeetingDomain,
    pub population: u64,
    pub policy: PolicyState,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mask_costs: MaskCosts,
        efficiency: EfficiencyParams,
        bayesian: BayesianSetting,
        distancing: DistancingParams,
        benefit_fn: CostBenefitFunction,
        cost_fn: CostBenefitFunction,
        meeting_domain: MeetingDomain,
        population: u64,
    ) -> Result<Self> {
        if population < 2 {
            return Err(Error::invalid(
                "n",
                format!("population must be at least 2 (got {population})"),
            ));
        }
        Ok(Self {
            mask_costs,
            efficiency,
            bayesian,
            distancing,
            benefit_fn,
            cost_fn,
            meeting_domain,
            population,
            policy: PolicyState::default(),
        })
    }

    /// Mask actions available to citizens under the current policies.
    pub fn allowed_mask_actions(&self) -> Vec<MaskAction> {
        if self.policy.mask_mandate {
            vec![MaskAction::Out]
        } else {
            MaskAction::ALL.to_vec()
        }
    }

    /// Full-information pair game restricted to the allowed actions.
    pub fn pair_game(&self, status1: HealthStatus, status2: HealthStatus) -> CostTable {
        let full = pair_game(status1, status2, &self.mask_costs);
        let keep: Vec<usize> = self
            .allowed_mask_actions()
            .into_iter()
            .map(MaskAction::index)
            .collect();
        full.restrict(&keep, &keep).expect("allowed actions are in range")
    }

    /// Profile played in the restricted pair game: the first pure
    /// equilibrium in row-major order.
    pub fn pair_outcome(
        &self,
        status1: HealthStatus,
        status2: HealthStatus,
    ) -> Result<(MaskAction, MaskAction)> {
        let allowed = self.allowed_mask_actions();
        let game = self.pair_game(status1, status2);
        let ne = pure_nash_equilibria(&game, DEFAULT_TOL);
        let first = ne.first().ok_or_else(|| {
            Error::Domain(format!("no pure equilibrium for {status1}/{status2} pair"))
        })?;
        Ok((allowed[first.action_p1], allowed[first.action_p2]))
    }

    /// Upper bound on exposure while a gathering cap is in force. Meetings
    /// may run longer when the group is capped, up to `z_max / l` time units,
    /// so the bound is `l * (z_max / l)`.
    pub fn exposure_limit(&self) -> f64 {
        match self.policy.gathering_cap {
            Some(limit) => {
                let l = f64::from(limit);
                let t_max = self.meeting_domain.z_max / l;
                self.meeting_domain.z_max.min(l * t_max)
            }
            None => self.meeting_domain.z_max,
        }
    }
}

/// Applies one policy, returning the transformed scenario.
pub fn apply_policy(scenario: &Scenario, policy: &Policy) -> Result<Scenario> {
    policy.validate()?;
    let mut out = scenario.clone();
    let state = &mut out.policy;
    state.policies_applied.push(*policy);
    match *policy {
        Policy::MaskMandate => state.mask_mandate = true,
        Policy::FreeMasks { subsidy } => out.mask_costs = out.mask_costs.subsidized(subsidy),
        Policy::GatheringCap { limit } => {
            state.gathering_cap = Some(state.gathering_cap.map_or(limit, |l| l.min(limit)));
            if state.lockdown {
                state
                    .warnings
                    .push(format!("{policy} has no effect under lockdown"));
            }
        }
        Policy::Lockdown => {
            state.lockdown = true;
            if let Some(limit) = state.gathering_cap {
                state.warnings.push(format!(
                    "gathering_cap:{limit} has no effect under lockdown"
                ));
            }
        }
        Policy::MassTesting { .. } => state.revealed_fraction = 1.0,
        Policy::TargetedTesting {
            traced_fraction, ..
        } => state.revealed_fraction = state.revealed_fraction.max(traced_fraction),
    }
    Ok(out)
}

/// Weights of the mechanism designer's linear cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignerCostModel {
    pub weight_infection: f64,
    pub weight_test: f64,
    pub weight_economic: f64,
}

impl DesignerCostModel {
    pub fn new(weight_infection: f64, weight_test: f64, weight_economic: f64) -> Result<Self> {
        Ok(Self {
            weight_infection: check_non_negative("weight_infection", weight_infection)?,
            weight_test: check_non_negative("weight_test", weight_test)?,
            weight_economic: check_non_negative("weight_economic", weight_economic)?,
        })
    }
}

/// Outcome quantities the designer is billed for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignerInputs {
    pub expected_infections: f64,
    /// Benefit citizens would have obtained had a policy not kept them home.
    pub suppressed_benefit: f64,
    pub population: u64,
}

pub fn testing_outlay(policies: &[Policy], population: u64) -> f64 {
    policies.iter().map(|p| p.testing_outlay(population)).sum()
}

pub fn designer_cost(inputs: &DesignerInputs, policies: &[Policy], model: &DesignerCostModel) -> f64 {
    model.weight_infection * inputs.expected_infections
        + model.weight_test * testing_outlay(policies, inputs.population)
        + model.weight_economic * inputs.suppressed_benefit
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairOutcome {
    pub statuses: (HealthStatus, HealthStatus),
    /// Probability of meeting this status pair.
    pub weight: f64,
    pub actions: (MaskAction, MaskAction),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaskOutcome {
    /// Probability of wearing a mask in pairs without status information.
    pub wear_probability: f64,
    /// Probability that both members of a pair know their statuses.
    pub full_information_share: f64,
    /// Profiles of the full-information games, one per unordered status pair.
    pub pairs: Vec<PairOutcome>,
    /// Multiplier on transmission when a susceptible citizen meets an
    /// infected one, averaged over information regimes.
    pub transmission_factor: f64,
    pub spend_susceptible: f64,
    pub spend_infected: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CitizenOutcome {
    pub decision: Decision,
    pub z_star: Option<f64>,
    pub group_size: Option<f64>,
    pub duration: Option<f64>,
    /// Infection probability of a susceptible citizen who goes out.
    pub infection_probability: f64,
    pub mask: Option<MaskOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MechanismReport {
    pub citizen_outcome: CitizenOutcome,
    pub expected_infections: f64,
    pub social_cost: f64,
    pub designer_cost: f64,
    pub testing_outlay: f64,
    pub suppressed_benefit: f64,
    pub policies_applied: Vec<Policy>,
    pub warnings: Vec<String>,
}

fn mask_outcome(s: &Scenario) -> Result<MaskOutcome> {
    use HealthStatus::{Infected, Susceptible};

    let rho = s.bayesian.rho;
    let costs = &s.mask_costs;
    let EfficiencyParams { a, b } = s.efficiency;
    let revealed = s.policy.revealed_fraction;
    let full = revealed * revealed;

    let ss = s.pair_outcome(Susceptible, Susceptible)?;
    let si = s.pair_outcome(Susceptible, Infected)?;
    let ii = s.pair_outcome(Infected, Infected)?;

    let (wear, unit_price) = if s.policy.mask_mandate {
        (1.0, costs.c_out())
    } else {
        (bayesian_best_p2(&s.bayesian, costs), costs.c_use())
    };
    let bayes_spend = wear * unit_price;
    let price = |act: MaskAction| costs.action_cost(act);

    let spend_susceptible =
        full * (rho * price(si.0) + (1.0 - rho) * price(ss.0)) + (1.0 - full) * bayes_spend;
    let spend_infected =
        full * (rho * price(ii.0) + (1.0 - rho) * price(si.1)) + (1.0 - full) * bayes_spend;

    let factor = |worn: bool, eff: f64| if worn { eff } else { 1.0 };
    let full_factor = factor(si.0.is_worn(), a) * factor(si.1.is_worn(), b);
    let bayes_factor = (1.0 - wear + wear * a) * (1.0 - wear + wear * b);
    let transmission_factor = full * full_factor + (1.0 - full) * bayes_factor;

    Ok(MaskOutcome {
        wear_probability: wear,
        full_information_share: full,
        pairs: vec![
            PairOutcome {
                statuses: (Susceptible, Susceptible),
                weight: (1.0 - rho) * (1.0 - rho),
                actions: ss,
            },
            PairOutcome {
                statuses: (Susceptible, Infected),
                weight: 2.0 * rho * (1.0 - rho),
                actions: si,
            },
            PairOutcome {
                statuses: (Infected, Infected),
                weight: rho * rho,
                actions: ii,
            },
        ],
        transmission_factor,
        spend_susceptible,
        spend_infected,
    })
}

pub fn evaluate_mechanism(
    scenario: &Scenario,
    policies: &[Policy],
    model: &DesignerCostModel,
) -> Result<MechanismReport> {
    evaluate_mechanism_with(scenario, policies, model, Execution::default())
}

/// Applies `policies` left to right, then plays the distancing and mask
/// games.
pub fn evaluate_mechanism_with(
    scenario: &Scenario,
    policies: &[Policy],
    model: &DesignerCostModel,
    exec: Execution,
) -> Result<MechanismReport> {
    let mut s = scenario.clone();
    for policy in policies {
        s = apply_policy(&s, policy)?;
    }
    let n = s.population as f64;
    let rho = s.bayesian.rho;

    let objective = MeetingObjective::new(
        s.benefit_fn,
        s.cost_fn,
        s.distancing.infection_prob,
        s.distancing.mortality,
    )?;
    let domain = MeetingDomain::new(
        s.meeting_domain.z_min,
        s.exposure_limit(),
        s.meeting_domain.grid_steps,
    )?;
    let choice = objective.extended_go_decision_with(s.distancing.life_value, &domain, exec)?;
    let stay_cost = n * s.cost_fn.eval(s.meeting_domain.z_min);

    let (citizen_outcome, expected_infections, social_cost, suppressed_benefit) =
        match choice.z_star {
            Some(z) if s.policy.lockdown => {
                let outcome = stay_outcome();
                (outcome, 0.0, stay_cost, n * s.benefit_fn.eval(z))
            }
            None => (stay_outcome(), 0.0, stay_cost, 0.0),
            Some(z) => {
                // the capped group meets for longer at the same exposure
                let group_size = match s.policy.gathering_cap {
                    Some(limit) => z.min(f64::from(limit)),
                    None => z,
                };
                let meeting = GroupMeeting::new(group_size, z / group_size)?;
                let mask = mask_outcome(&s)?;
                let infection_probability =
                    group_infection_probability(rho * mask.transmission_factor, &meeting);
                let infections = n * (1.0 - rho) * infection_probability;
                let social = n
                    * ((1.0 - rho)
                        * (mask.spend_susceptible
                            + infection_probability * s.mask_costs.c_infection())
                        + rho * mask.spend_infected);
                let outcome = CitizenOutcome {
                    decision: Decision::Go,
                    z_star: Some(z),
                    group_size: Some(meeting.group_size),
                    duration: Some(meeting.duration),
                    infection_probability,
                    mask: Some(mask),
                };
                (outcome, infections, social, 0.0)
            }
        };

    let inputs = DesignerInputs {
        expected_infections,
        suppressed_benefit,
        population: s.population,
    };
    let policies_applied = s.policy.policies_applied;
    Ok(MechanismReport {
        citizen_outcome,
        expected_infections,
        social_cost,
        designer_cost: designer_cost(&inputs, &policies_applied, model),
        testing_outlay: testing_outlay(&policies_applied, s.population),
        suppressed_benefit,
        policies_applied,
        warnings: s.policy.warnings,
    })
}

fn stay_outcome() -> CitizenOutcome {
    CitizenOutcome {
        decision: Decision::Stay,
        z_star: None,
        group_size: None,
        duration: None,
        infection_probability: 0.0,
        mask: None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedPolicySet {
    /// Position of the set in the input list.
    pub index: usize,
    pub policies: Vec<Policy>,
    pub report: MechanismReport,
}

pub fn compare_policies(
    scenario: &Scenario,
    policy_sets: &[Vec<Policy>],
    model: &DesignerCostModel,
) -> Result<Vec<RankedPolicySet>> {
    compare_policies_with(scenario, policy_sets, model, Execution::default())
}

/// Evaluates every set and ranks by designer cost, then social cost, then
/// input order.
pub fn compare_policies_with(
    scenario: &Scenario,
    policy_sets: &[Vec<Policy>],
    model: &DesignerCostModel,
    exec: Execution,
) -> Result<Vec<RankedPolicySet>> {
    if policy_sets.is_empty() {
        return Err(Error::invalid("policy_sets", "at least one policy set is required"));
    }
    // sets run concurrently; each inner sweep stays sequential
    let reports = exec.map_slice(policy_sets, |set| {
        evaluate_mechanism_with(scenario, set, model, Execution::Sequential)
    });
    let mut ranked = reports
        .into_iter()
        .zip(policy_sets)
        .enumerate()
        .map(|(index, (report, set))| {
            Ok(RankedPolicySet {
                index,
                policies: set.clone(),
                report: report?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|x, y| {
        x.report
            .designer_cost
            .total_cmp(&y.report.designer_cost)
            .then(x.report.social_cost.total_cmp(&y.report.social_cost))
    });
    Ok(ranked)
}
