//! Scenario file format.
//!
//! A single TOML document feeds every subcommand; sections a subcommand does
//! not use may be left out. Unknown sections and keys are rejected.
//!
//! ```toml
//! [mask]
//! c_out = 1.0
//! c_in = 10.0
//! c_use = 100.0
//! c_infection = 1000.0
//! a = 0.3333333333333333   # optional, default 1/3
//! b = 0.6666666666666666   # optional, default 2/3
//!
//! [bayesian]
//! rho = 0.5
//! p1 = 0.5
//!
//! [distancing]
//! B = 3000.0
//! C = 0.0
//! m = 0.034
//! L = 11300000.0
//! rho = 0.0077
//!
//! [functions]
//! benefit = "linear:10,0"   # or constant:k
//! cost = "constant:500"
//!
//! [meeting]                 # optional, defaults shown
//! z_min = 0.1
//! z_max = 100.0
//! grid_steps = 10000
//!
//! [population]
//! n = 1000
//!
//! [policies]
//! apply = ["free_masks:50", "targeted_testing:20,0.1"]
//! compare = [[], ["mask_mandate"], ["lockdown"]]   # optional
//!
//! [designer]
//! weight_infection = 5000.0
//! weight_test = 1.0
//! weight_economic = 0.1
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use pandemic_games::distancing::{CostBenefitFunction, DistancingParams, MeetingDomain};
use pandemic_games::mask::{BayesianSetting, EfficiencyParams, MaskCosts};
use pandemic_games::policy::{DesignerCostModel, Policy, Scenario};

use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayesian: Option<BayesianSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distancing: Option<DistancingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<FunctionsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meeting: Option<MeetingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<PopulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<PoliciesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designer: Option<DesignerSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSection {
    pub c_out: f64,
    pub c_in: f64,
    pub c_use: f64,
    pub c_infection: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesianSection {
    pub rho: f64,
    pub p1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistancingSection {
    #[serde(rename = "B")]
    pub benefit: f64,
    #[serde(rename = "C")]
    pub home_cost: f64,
    pub m: f64,
    #[serde(rename = "L")]
    pub life_value: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsSection {
    pub benefit: String,
    pub cost: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeetingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    pub n: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoliciesSection {
    #[serde(default)]
    pub apply: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignerSection {
    pub weight_infection: f64,
    pub weight_test: f64,
    pub weight_economic: f64,
}

fn in_section(section: &'static str) -> impl Fn(pandemic_games::Error) -> CliError {
    move |err| match err {
        pandemic_games::Error::InvalidParameter { name, reason } => {
            CliError::Config(format!("[{section}].{name}: {reason}"))
        }
        other => CliError::Config(format!("[{section}]: {other}")),
    }
}

fn required<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("missing required section [{name}]")))
}

fn parse_policy(text: &str, location: &str) -> Result<Policy> {
    text.parse::<Policy>()
        .map_err(|e| CliError::Config(format!("[policies].{location}: {e}")))
}

impl ScenarioFile {
    /// Parses and validates every section present in `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim().to_owned()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario sections serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.mask.is_some() {
            self.mask_costs()?;
            self.efficiency()?;
        }
        if self.bayesian.is_some() {
            self.bayesian()?;
        }
        if self.distancing.is_some() {
            self.distancing()?;
        }
        if self.functions.is_some() {
            self.functions()?;
        }
        self.meeting_domain()?;
        if self.population.is_some() {
            self.population()?;
        }
        if self.policies.is_some() {
            self.policy_sets()?;
        }
        if self.designer.is_some() {
            self.designer()?;
        }
        Ok(())
    }

    pub fn mask_costs(&self) -> Result<MaskCosts> {
        let m = required(&self.mask, "mask")?;
        MaskCosts::new(m.c_out, m.c_in, m.c_use, m.c_infection).map_err(in_section("mask"))
    }

    pub fn efficiency(&self) -> Result<EfficiencyParams> {
        let m = required(&self.mask, "mask")?;
        let default = EfficiencyParams::default();
        EfficiencyParams::new(m.a.unwrap_or(default.a), m.b.unwrap_or(default.b))
            .map_err(in_section("mask"))
    }

    pub fn bayesian(&self) -> Result<BayesianSetting> {
        let b = required(&self.bayesian, "bayesian")?;
        BayesianSetting::new(b.rho, b.p1).map_err(in_section("bayesian"))
    }

    pub fn distancing(&self) -> Result<DistancingParams> {
        let d = required(&self.distancing, "distancing")?;
        DistancingParams::new(d.benefit, d.home_cost, d.m, d.life_value, d.rho)
            .map_err(in_section("distancing"))
    }

    /// Benefit and cost functions.
    pub fn functions(&self) -> Result<(CostBenefitFunction, CostBenefitFunction)> {
        let f = required(&self.functions, "functions")?;
        let parse = |key: &str, text: &str| {
            text.parse::<CostBenefitFunction>().map_err(|e| match e {
                pandemic_games::Error::InvalidParameter { reason, .. } => {
                    CliError::Config(format!("[functions].{key}: {reason}"))
                }
                other => CliError::Config(format!("[functions].{key}: {other}")),
            })
        };
        Ok((parse("benefit", &f.benefit)?, parse("cost", &f.cost)?))
    }

    pub fn meeting_domain(&self) -> Result<MeetingDomain> {
        let default = MeetingDomain::default();
        let m = self.meeting.clone().unwrap_or_default();
        MeetingDomain::new(
            m.z_min.unwrap_or(default.z_min),
            m.z_max.unwrap_or(default.z_max),
            m.grid_steps.unwrap_or(default.grid_steps),
        )
        .map_err(in_section("meeting"))
    }

    pub fn population(&self) -> Result<u64> {
        let p = required(&self.population, "population")?;
        if p.n < 2 {
            return Err(CliError::Config(format!(
                "[population].n: must be at least 2 (got {})",
                p.n
            )));
        }
        Ok(p.n)
    }

    /// The `apply` list; empty when the section is absent.
    pub fn policies(&self) -> Result<Vec<Policy>> {
        let Some(p) = &self.policies else {
            return Ok(Vec::new());
        };
        p.apply
            .iter()
            .enumerate()
            .map(|(i, text)| parse_policy(text, &format!("apply[{i}]")))
            .collect()
    }

    /// Policy sets to rank: `compare` when given, otherwise no policy versus
    /// the `apply` list.
    pub fn policy_sets(&self) -> Result<Vec<Vec<Policy>>> {
        let apply = self.policies()?;
        match self.policies.as_ref().and_then(|p| p.compare.as_ref()) {
            Some(sets) => sets
                .iter()
                .enumerate()
                .map(|(i, set)| {
                    set.iter()
                        .enumerate()
                        .map(|(j, text)| parse_policy(text, &format!("compare[{i}][{j}]")))
                        .collect()
                })
                .collect(),
            None if apply.is_empty() => Ok(vec![Vec::new()]),
            None => Ok(vec![Vec::new(), apply]),
        }
    }

    pub fn designer(&self) -> Result<DesignerCostModel> {
        let d = required(&self.designer, "designer")?;
        DesignerCostModel::new(d.weight_infection, d.weight_test, d.weight_economic)
            .map_err(in_section("designer"))
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let (benefit_fn, cost_fn) = self.functions()?;
        Scenario::new(
            self.mask_costs()?,
            self.efficiency()?,
            self.bayesian()?,
            self.distancing()?,
            benefit_fn,
            cost_fn,
            self.meeting_domain()?,
            self.population()?,
        )
        .map_err(in_section("population"))
    }
}

/// Reads and fully validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    ScenarioFile::load(path)?.scenario()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[mask]
c_out = 1
c_in = 10
c_use = 100
c_infection = 1000

[bayesian]
rho = 0.5
p1 = 0.5

[distancing]
B = 3000
C = 0
m = 0.034
L = 11300000
rho = 0.0077

[functions]
benefit = "linear:10,0"
cost = "constant:500"

[meeting]
grid_steps = 1000

[population]
n = 100

[policies]
apply = ["free_masks:50", "targeted_testing:20,0.1"]

[designer]
weight_infection = 1
weight_test = 1
weight_economic = 1
"#;

    fn config_message(text: &str) -> String {
        match ScenarioFile::parse(text) {
            Err(CliError::Config(msg)) => msg,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn full_file_round_trips() {
        let file = ScenarioFile::parse(FULL).unwrap();
        let again = ScenarioFile::parse(&file.to_toml()).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.scenario().unwrap(), file.scenario().unwrap());
        let s = file.scenario().unwrap();
        assert_eq!(s.mask_costs.c_in(), 10.0);
        assert_eq!(s.population, 100);
        assert_eq!(s.meeting_domain.grid_steps, 1000);
        assert_eq!(s.meeting_domain.z_min, 0.1);
        assert_eq!(file.policy_sets().unwrap().len(), 2);
    }

    #[test]
    fn ordering_violation_names_invariant() {
        let text = FULL.replace("c_out = 1\n", "c_out = 10\n");
        let msg = config_message(&text);
        assert!(msg.contains("[mask].c_out"), "{msg}");
        assert!(msg.contains("c_out < c_in"), "{msg}");
    }

    #[test]
    fn range_violation_names_key() {
        let text = FULL.replace("rho = 0.5", "rho = 1.5");
        let msg = config_message(&text);
        assert!(msg.contains("[bayesian].rho"), "{msg}");
    }

    #[test]
    fn unknown_key_is_named() {
        let text = FULL.replace("p1 = 0.5", "p1 = 0.5\nsigma = 2");
        let msg = config_message(&text);
        assert!(msg.contains("sigma"), "{msg}");
        let msg = config_message("[weather]\nrain = 1\n");
        assert!(msg.contains("weather"), "{msg}");
    }

    #[test]
    fn missing_key_and_section() {
        let text = FULL.replace("c_in = 10\n", "");
        let msg = config_message(&text);
        assert!(msg.contains("c_in"), "{msg}");
        let file = ScenarioFile::parse("[bayesian]\nrho = 0.1\np1 = 0.2\n").unwrap();
        match file.mask_costs() {
            Err(CliError::Config(msg)) => assert!(msg.contains("[mask]"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_function_and_policy() {
        let msg = config_message(&FULL.replace("linear:10,0", "cubic:1"));
        assert!(msg.contains("[functions].benefit"), "{msg}");
        let msg = config_message(&FULL.replace("free_masks:50", "free_masks:-3"));
        assert!(msg.contains("[policies].apply[0]"), "{msg}");
    }
}
