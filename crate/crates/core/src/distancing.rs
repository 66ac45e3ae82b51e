//! The Distancing Game: whether to leave home, and for which exposure
//! `z = group size × duration` a meeting is worth the most.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_non_negative, check_positive, check_probability, Error, Result};
use crate::exec::Execution;

/// Inputs of the go-out/stay-home decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistancingParams {
    /// Benefit of going out.
    pub benefit: f64,
    /// Cost of staying home.
    pub home_cost: f64,
    pub mortality: f64,
    /// Value the player assigns to her own life.
    pub life_value: f64,
    pub infection_prob: f64,
}

impl DistancingParams {
    pub fn new(
        benefit: f64,
        home_cost: f64,
        mortality: f64,
        life_value: f64,
        infection_prob: f64,
    ) -> Result<Self> {
        Ok(Self {
            benefit: check_non_negative("B", benefit)?,
            home_cost: check_non_negative("C", home_cost)?,
            mortality: check_probability("m", mortality)?,
            life_value: check_non_negative("L", life_value)?,
            infection_prob: check_probability("rho", infection_prob)?,
        })
    }
}

/// Benefit or cost as a function of exposure `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostBenefitFunction {
    Constant(f64),
    Linear { slope: f64, intercept: f64 },
}

impl CostBenefitFunction {
    pub fn constant(k: f64) -> Result<Self> {
        Ok(Self::Constant(check_non_negative("constant", k)?))
    }

    pub fn linear(slope: f64, intercept: f64) -> Result<Self> {
        Ok(Self::Linear {
            slope: check_non_negative("slope", slope)?,
            intercept: check_non_negative("intercept", intercept)?,
        })
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            Self::Constant(k) => k,
            Self::Linear { slope, intercept } => slope * z + intercept,
        }
    }
}

impl fmt::Display for CostBenefitFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(k) => write!(f, "constant:{k}"),
            Self::Linear { slope, intercept } => write!(f, "linear:{slope},{intercept}"),
        }
    }
}

impl FromStr for CostBenefitFunction {
    type Err = Error;

    /// Parses `constant:k` or `linear:slope,intercept`.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = || {
            Error::invalid(
                "function",
                format!("malformed function `{s}` (expected constant:k or linear:slope,intercept)"),
            )
        };
        let (kind, args) = s.trim().split_once(':').ok_or_else(malformed)?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| malformed())?;
        match (kind.trim(), nums.as_slice()) {
            ("constant", [k]) => Self::constant(*k),
            ("linear", [slope, intercept]) => Self::linear(*slope, *intercept),
            _ => Err(malformed()),
        }
    }
}

/// Sampling range for the exposure `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeetingDomain {
    pub z_min: f64,
    pub z_max: f64,
    /// Number of grid intervals; a sweep has `grid_steps + 1` samples.
    pub grid_steps: usize,
}

impl MeetingDomain {
    pub const MAX_EXPOSURE: f64 = 100.0;

    pub fn new(z_min: f64, z_max: f64, grid_steps: usize) -> Result<Self> {
        check_positive("z_min", z_min)?;
        check_positive("z_max", z_max)?;
        if z_min >= z_max {
            return Err(Error::invalid(
                "z_min",
                format!("must be below z_max (z_min={z_min}, z_max={z_max})"),
            ));
        }
        if z_max > Self::MAX_EXPOSURE {
            return Err(Error::invalid(
                "z_max",
                format!("must not exceed {} (got {z_max})", Self::MAX_EXPOSURE),
            ));
        }
        if grid_steps == 0 {
            return Err(Error::invalid("grid_steps", "must be positive"));
        }
        Ok(Self {
            z_min,
            z_max,
            grid_steps,
        })
    }

    pub fn with_grid_steps(self, grid_steps: usize) -> Result<Self> {
        Self::new(self.z_min, self.z_max, grid_steps)
    }

    pub fn step(&self) -> f64 {
        (self.z_max - self.z_min) / self.grid_steps as f64
    }

    /// The `i`-th grid point; the last one is exactly `z_max`.
    pub fn sample(&self, i: usize) -> f64 {
        if i >= self.grid_steps {
            self.z_max
        } else {
            self.z_min + i as f64 * self.step()
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        (self.z_min..=self.z_max).contains(&z)
    }
}

impl Default for MeetingDomain {
    fn default() -> Self {
        Self {
            z_min: 0.1,
            z_max: 100.0,
            grid_steps: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupMeeting {
    pub group_size: f64,
    pub duration: f64,
}

impl GroupMeeting {
    pub fn new(group_size: f64, duration: f64) -> Result<Self> {
        Ok(Self {
            group_size: check_positive("group_size", group_size)?,
            duration: check_positive("duration", duration)?,
        })
    }

    pub fn exposure(&self) -> f64 {
        self.group_size * self.duration
    }

    pub fn validate_in(&self, domain: &MeetingDomain) -> Result<()> {
        let z = self.exposure();
        if domain.contains(z) {
            Ok(())
        } else {
            Err(Error::invalid(
                "exposure",
                format!(
                    "g*t = {z} outside [{}, {}]",
                    domain.z_min, domain.z_max
                ),
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Stay,
    Go,
}

impl Decision {
    pub fn label(self) -> &'static str {
        match self {
            Decision::Stay => "stay",
            Decision::Go => "go",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Utility of going out with probability `p`: `p (B - rho m L) - (1 - p) C`.
pub fn distancing_utility(p: f64, params: &DistancingParams) -> f64 {
    let DistancingParams {
        benefit,
        home_cost,
        mortality,
        life_value,
        infection_prob,
    } = *params;
    p * (benefit - infection_prob * mortality * life_value) - (1.0 - p) * home_cost
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StayHomeDecision {
    pub decision: Decision,
    /// `(B + C) / (rho m)`: staying home is preferred by anyone valuing her
    /// life above it. Infinite when `rho m = 0`.
    pub life_value_threshold: f64,
}

pub fn stay_home_decision(params: &DistancingParams) -> StayHomeDecision {
    let risk = params.infection_prob * params.mortality;
    if risk == 0.0 {
        return StayHomeDecision {
            decision: Decision::Go,
            life_value_threshold: f64::INFINITY,
        };
    }
    let threshold = (params.benefit + params.home_cost) / risk;
    StayHomeDecision {
        decision: if threshold < params.life_value {
            Decision::Stay
        } else {
            Decision::Go
        },
        life_value_threshold: threshold,
    }
}

/// Probability of infection after exposure `z` at per-unit probability `rho`.
pub fn exposure_infection_probability(rho: f64, z: f64) -> f64 {
    // 1 - (1 - rho)^z, accurate for small rho
    -(z * (-rho).ln_1p()).exp_m1()
}

/// `1 - (1 - rho)^(g t)`
pub fn group_infection_probability(rho: f64, meeting: &GroupMeeting) -> f64 {
    exposure_infection_probability(rho, meeting.exposure())
}

/// Life value above which a player stays home, as a function of exposure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeetingObjective {
    pub benefit: CostBenefitFunction,
    pub cost: CostBenefitFunction,
    pub rho: f64,
    pub mortality: f64,
}

impl MeetingObjective {
    /// Fails with a domain error when `rho` or `m` is zero: without risk the
    /// objective is unbounded.
    pub fn new(
        benefit: CostBenefitFunction,
        cost: CostBenefitFunction,
        rho: f64,
        mortality: f64,
    ) -> Result<Self> {
        check_probability("rho", rho)?;
        check_probability("m", mortality)?;
        if rho == 0.0 || mortality == 0.0 {
            return Err(Error::Domain(format!(
                "meeting objective undefined without infection risk (rho={rho}, m={mortality})"
            )));
        }
        Ok(Self {
            benefit,
            cost,
            rho,
            mortality,
        })
    }

    /// `(B(z) + C(z)) / ((1 - (1 - rho)^z) m)`
    pub fn at(&self, z: f64) -> f64 {
        (self.benefit.eval(z) + self.cost.eval(z))
            / (exposure_infection_probability(self.rho, z) * self.mortality)
    }

    pub fn optimal_meeting(&self, domain: &MeetingDomain) -> Result<OptimalMeeting> {
        self.optimal_meeting_with(domain, Execution::default())
    }

    /// Grid search over the domain followed by one golden-section pass on the
    /// interval bracketing the best grid point. Ties go to the smaller `z`.
    pub fn optimal_meeting_with(
        &self,
        domain: &MeetingDomain,
        exec: Execution,
    ) -> Result<OptimalMeeting> {
        let values = self.sample_values(domain, exec)?;
        let mut best = 0;
        for (i, &v) in values.iter().enumerate().skip(1) {
            if v > values[best] {
                best = i;
            }
        }
        let mut z_star = domain.sample(best);
        let mut value = values[best];

        let lo = domain.sample(best.saturating_sub(1));
        let hi = domain.sample((best + 1).min(domain.grid_steps));
        let refined = golden_section_max(|z| self.at(z), lo, hi, GOLDEN_ITERATIONS);
        let refined_value = self.at(refined);
        if refined_value.is_finite() && refined_value > value {
            z_star = refined;
            value = refined_value;
        }
        Ok(OptimalMeeting { z_star, value })
    }

    /// Go (at the maximizing exposure) iff the maximum exceeds `life_value`.
    pub fn extended_go_decision(
        &self,
        life_value: f64,
        domain: &MeetingDomain,
    ) -> Result<ExtendedGoDecision> {
        self.extended_go_decision_with(life_value, domain, Execution::default())
    }

    pub fn extended_go_decision_with(
        &self,
        life_value: f64,
        domain: &MeetingDomain,
        exec: Execution,
    ) -> Result<ExtendedGoDecision> {
        let best = self.optimal_meeting_with(domain, exec)?;
        let go = best.value > life_value;
        Ok(ExtendedGoDecision {
            decision: if go { Decision::Go } else { Decision::Stay },
            z_star: go.then_some(best.z_star),
            max_value: best.value,
        })
    }

    pub fn curve_series(&self, domain: &MeetingDomain) -> Result<Vec<(f64, f64)>> {
        self.curve_series_with(domain, Execution::default())
    }

    /// `grid_steps + 1` evenly spaced `(z, objective)` samples.
    pub fn curve_series_with(
        &self,
        domain: &MeetingDomain,
        exec: Execution,
    ) -> Result<Vec<(f64, f64)>> {
        let values = self.sample_values(domain, exec)?;
        Ok(values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (domain.sample(i), v))
            .collect())
    }

    fn sample_values(&self, domain: &MeetingDomain, exec: Execution) -> Result<Vec<f64>> {
        let values = exec.map_range(domain.grid_steps + 1, |i| self.at(domain.sample(i)));
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "meeting objective is not finite at z = {}",
                domain.sample(i)
            )));
        }
        Ok(values)
    }
}

const GOLDEN_ITERATIONS: usize = 60;

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalMeeting {
    pub z_star: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedGoDecision {
    pub decision: Decision,
    /// Exposure of the chosen meeting; `None` when staying home.
    pub z_star: Option<f64>,
    pub max_value: f64,
}

/// Meeting objective at a single exposure.
pub fn z_objective(
    z: f64,
    benefit: CostBenefitFunction,
    cost: CostBenefitFunction,
    rho: f64,
    mortality: f64,
) -> Result<f64> {
    Ok(MeetingObjective::new(benefit, cost, rho, mortality)?.at(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const RHO: f64 = 0.0077;
    const M: f64 = 0.034;
    const L: f64 = 11.3e6;

    fn params(benefit: f64, home_cost: f64) -> DistancingParams {
        DistancingParams::new(benefit, home_cost, M, L, RHO).unwrap()
    }

    fn objective(b: CostBenefitFunction, c: CostBenefitFunction) -> MeetingObjective {
        MeetingObjective::new(b, c, RHO, M).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DistancingParams::new(-1.0, 0.0, M, L, RHO).is_err());
        assert!(DistancingParams::new(1.0, 0.0, 1.5, L, RHO).is_err());
        assert!(DistancingParams::new(1.0, 0.0, M, L, -0.1).is_err());
        assert!(MeetingDomain::new(0.0, 100.0, 10).is_err());
        assert!(MeetingDomain::new(5.0, 1.0, 10).is_err());
        assert!(MeetingDomain::new(0.1, 150.0, 10).is_err());
        assert!(MeetingDomain::new(0.1, 100.0, 0).is_err());
        assert!(CostBenefitFunction::linear(-1.0, 0.0).is_err());
    }

    #[test]
    fn utility_examples() {
        let p = params(3000.0, 250.0);
        assert_eq!(distancing_utility(0.0, &p), -250.0);
        let even = DistancingParams::new(RHO * M * L, 0.0, M, L, RHO).unwrap();
        assert_abs_diff_eq!(distancing_utility(1.0, &even), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(distancing_utility(1.0, &params(3000.0, 0.0)), 41.7, epsilon = 0.1);
    }

    #[test]
    fn stay_home_examples() {
        let d = stay_home_decision(&params(1.0, 0.0));
        assert_abs_diff_eq!(d.life_value_threshold, 3819.7, epsilon = 0.1);
        let d = stay_home_decision(&params(2958.0, 0.0));
        assert_eq!(d.decision, Decision::Stay);
        let d = stay_home_decision(&params(2000.0, 959.0));
        assert_eq!(d.decision, Decision::Go);
        let no_risk = DistancingParams::new(10.0, 0.0, M, L, 0.0).unwrap();
        let d = stay_home_decision(&no_risk);
        assert_eq!(d.decision, Decision::Go);
        assert!(d.life_value_threshold.is_infinite());
    }

    #[test]
    fn group_probability_examples() {
        let m = GroupMeeting::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(group_infection_probability(RHO, &m), RHO, epsilon = 1e-15);
        let m = GroupMeeting::new(4.0, 2.5).unwrap();
        assert_eq!(group_infection_probability(0.0, &m), 0.0);
        let m = GroupMeeting::new(2.0, 3.0).unwrap();
        assert_abs_diff_eq!(group_infection_probability(RHO, &m), 0.0453, epsilon = 1e-4);
        assert_abs_diff_eq!(
            group_infection_probability(RHO, &m),
            1.0 - (1.0f64 - RHO).powi(6),
            epsilon = 1e-14
        );
    }

    #[test]
    fn group_meeting_domain_check() {
        let domain = MeetingDomain::default();
        assert!(GroupMeeting::new(10.0, 5.0).unwrap().validate_in(&domain).is_ok());
        assert!(GroupMeeting::new(20.0, 6.0).unwrap().validate_in(&domain).is_err());
        assert!(GroupMeeting::new(0.0, 6.0).is_err());
    }

    #[test]
    fn z_objective_examples() {
        let b = CostBenefitFunction::Constant(1000.0);
        let c = CostBenefitFunction::Constant(500.0);
        let v = z_objective(1.0, b, c, RHO, M).unwrap();
        assert_abs_diff_eq!(v, 5.73e6, epsilon = 1e4);

        let b = CostBenefitFunction::linear(10.0, 0.0).unwrap();
        let c = CostBenefitFunction::linear(5.0, 0.0).unwrap();
        let limit = 15.0 / (-(1.0 - RHO).ln() * M);
        let v = z_objective(1e-6, b, c, RHO, M).unwrap();
        assert_abs_diff_eq!(v / limit, 1.0, epsilon = 1e-5);

        let meeting = GroupMeeting::new(3.0, 2.0).unwrap();
        let direct = (b.eval(6.0) + c.eval(6.0)) / (group_infection_probability(RHO, &meeting) * M);
        assert_abs_diff_eq!(z_objective(6.0, b, c, RHO, M).unwrap(), direct, epsilon = 1e-6);

        assert!(matches!(z_objective(1.0, b, c, 0.0, M), Err(Error::Domain(_))));
        assert!(matches!(z_objective(1.0, b, c, RHO, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn optimal_meeting_shapes() {
        let domain = MeetingDomain::default();
        let constant = objective(
            CostBenefitFunction::Constant(1000.0),
            CostBenefitFunction::Constant(500.0),
        );
        let best = constant.optimal_meeting(&domain).unwrap();
        assert_eq!(best.z_star, domain.z_min);
        assert_eq!(best.value, constant.at(domain.z_min));

        let linear = objective(
            CostBenefitFunction::linear(10.0, 0.0).unwrap(),
            CostBenefitFunction::linear(5.0, 0.0).unwrap(),
        );
        let best = linear.optimal_meeting(&domain).unwrap();
        assert_eq!(best.z_star, domain.z_max);
    }

    #[test]
    fn maximizer_dominates_grid() {
        let obj = objective(
            CostBenefitFunction::linear(50.0, 20.0).unwrap(),
            CostBenefitFunction::Constant(0.0),
        );
        let domain = MeetingDomain::new(0.5, 100.0, 7).unwrap();
        let best = obj.optimal_meeting(&domain).unwrap();
        for (z, v) in obj.curve_series(&domain).unwrap() {
            assert!(best.value >= v, "z={z}");
        }
    }

    #[test]
    fn extended_decision_examples() {
        let unit = MeetingDomain::new(1.0, 100.0, 1000).unwrap();
        let two_nine = objective(
            CostBenefitFunction::Constant(2900.0),
            CostBenefitFunction::Constant(0.0),
        );
        let d = two_nine.extended_go_decision(L, &unit).unwrap();
        assert_eq!(d.decision, Decision::Stay);
        assert_eq!(d.z_star, None);

        let rich = objective(
            CostBenefitFunction::Constant(3000.0),
            CostBenefitFunction::Constant(0.0),
        );
        let d = rich.extended_go_decision(L, &unit).unwrap();
        assert_eq!(d.decision, Decision::Go);
        assert_eq!(d.z_star, Some(1.0));

        let d = rich.extended_go_decision(1e12, &unit).unwrap();
        assert_eq!(d.decision, Decision::Stay);
    }

    #[test]
    fn curve_series_contract() {
        let domain = MeetingDomain::new(0.1, 100.0, 500).unwrap();
        let obj = objective(
            CostBenefitFunction::Constant(1000.0),
            CostBenefitFunction::Constant(500.0),
        );
        let series = obj.curve_series(&domain).unwrap();
        assert_eq!(series.len(), 501);
        assert_eq!(series[0], (0.1, obj.at(0.1)));
        assert_eq!(series[500].0, 100.0);
        assert!(series.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let domain = MeetingDomain::default();
        let obj = objective(
            CostBenefitFunction::linear(10.0, 0.0).unwrap(),
            CostBenefitFunction::Constant(500.0),
        );
        assert_eq!(
            obj.optimal_meeting_with(&domain, Execution::Sequential).unwrap(),
            obj.optimal_meeting_with(&domain, Execution::Parallel).unwrap()
        );
        assert_eq!(
            obj.curve_series_with(&domain, Execution::Sequential).unwrap(),
            obj.curve_series_with(&domain, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn function_text_round_trip() {
        for text in ["constant:1000", "linear:10,0", "linear:2.5,7"] {
            let f: CostBenefitFunction = text.parse().unwrap();
            assert_eq!(f.to_string().parse::<CostBenefitFunction>().unwrap(), f);
        }
        for bad in ["constant", "quadratic:1", "linear:1", "constant:x", "constant:-1"] {
            assert!(bad.parse::<CostBenefitFunction>().is_err(), "{bad}");
        }
    }
}
