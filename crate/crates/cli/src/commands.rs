//! Subcommand implementations. Each builds a [`Report`] and, when asked,
//! the matching cross-checks.

use pandemic_games::distancing::{
    distancing_utility, stay_home_decision, z_objective, Decision, MeetingDomain,
    MeetingObjective,
};
use pandemic_games::game::{dominant_actions, solve, CostTable, Player};
use pandemic_games::mask::{
    bayesian_best_p2, bayesian_expected_cost, bayesian_mask_condition, efficiency_analysis,
    efficiency_expected_cost, multiplayer_equilibrium, multiplayer_so_condition, pair_game,
    HealthStatus, MaskAction,
};
use pandemic_games::oracle::enumerate_pure_ne;
use pandemic_games::policy::{
    apply_policy, compare_policies_with, describe_policies, designer_cost, testing_outlay,
    DesignerInputs, Policy, Scenario,
};
use pandemic_games::{Execution, DEFAULT_TOL};

use crate::error::CliError;
use crate::report::{Cell, Report};
use crate::scenario::ScenarioFile;
use crate::verify::Checks;

type Result<T> = std::result::Result<T, CliError>;

/// Inputs shared by every subcommand.
pub struct Context<'a> {
    pub file: &'a ScenarioFile,
    pub grid_steps: Option<usize>,
    pub statuses: Option<&'a [HealthStatus]>,
    pub exec: Execution,
    pub verify: bool,
}

impl Context<'_> {
    fn domain(&self) -> Result<MeetingDomain> {
        let domain = self.file.meeting_domain()?;
        match self.grid_steps {
            Some(n) => domain
                .with_grid_steps(n)
                .map_err(|e| CliError::Config(format!("--grid-steps: {e}"))),
            None => Ok(domain),
        }
    }

    fn objective(&self) -> Result<MeetingObjective> {
        let d = self.file.distancing()?;
        let (benefit, cost) = self.file.functions()?;
        MeetingObjective::new(benefit, cost, d.infection_prob, d.mortality)
            .map_err(CliError::compute)
    }

    fn scenario(&self) -> Result<Scenario> {
        let mut s = self.file.scenario()?;
        s.meeting_domain = self.domain()?;
        Ok(s)
    }
}

fn labels(game: &CostTable, player: Player, idx: &[usize]) -> String {
    if idx.is_empty() {
        return "none".into();
    }
    idx.iter()
        .map(|&i| game.actions(player).label(i).to_owned())
        .collect::<Vec<_>>()
        .join("; ")
}

fn profiles(game: &CostTable, list: &[pandemic_games::game::StrategyProfile]) -> String {
    if list.is_empty() {
        return "none".into();
    }
    list.iter()
        .map(|p| game.describe(*p))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn mask_basic(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    use HealthStatus::{Infected, Susceptible};
    let costs = ctx.file.mask_costs()?;
    let mut report = Report::key_value();
    let pairs = [
        (Susceptible, Susceptible),
        (Susceptible, Infected),
        (Infected, Susceptible),
        (Infected, Infected),
    ];
    for (s1, s2) in pairs {
        let game = pair_game(s1, s2, &costs);
        let section = format!("{}-{}", s1.label(), s2.label());
        let sol = solve(&game, DEFAULT_TOL);
        let strict1 = dominant_actions(&game, Player::One, false, DEFAULT_TOL);
        let strict2 = dominant_actions(&game, Player::Two, false, DEFAULT_TOL);
        report.kv(&section, "nash", profiles(&game, &sol.pure_nash));
        report.kv(&section, "social_optimum", profiles(&game, &sol.social_optima));
        report.kv(&section, "dominant_p1", labels(&game, Player::One, &sol.dominant_p1));
        report.kv(&section, "dominant_p2", labels(&game, Player::Two, &sol.dominant_p2));
        report.kv(&section, "strictly_dominant_p1", labels(&game, Player::One, &strict1));
        report.kv(&section, "strictly_dominant_p2", labels(&game, Player::Two, &strict2));
        if ctx.verify {
            checks.nash_sets(&format!("{section} nash"), &game);
            let min = game
                .profiles()
                .map(|p| {
                    let (a, b) = game.cost(p);
                    a + b
                })
                .fold(f64::INFINITY, f64::min);
            let so_ok = sol.social_optima.iter().all(|p| {
                let (a, b) = game.cost(*p);
                (a + b - min).abs() <= DEFAULT_TOL
            }) && !sol.social_optima.is_empty();
            checks.record(
                format!("{section} social optimum"),
                so_ok,
                format!("minimum total cost {min}"),
            );
        }
    }
    if ctx.verify {
        let si = pair_game(Susceptible, Infected, &costs);
        let is = pair_game(Infected, Susceptible, &costs);
        checks.record(
            "one-infected symmetry",
            si.transpose() == is,
            "infected-as-player-1 table is the transpose",
        );
    }

    if let Some(statuses) = ctx.statuses {
        let outcome = multiplayer_equilibrium(statuses).map_err(|e| {
            CliError::Config(format!("--statuses: {e}"))
        })?;
        let actions: Vec<&str> = outcome.actions.iter().map(|a| a.label()).collect();
        report.kv("multiplayer", "players", statuses.len() as u64);
        report.kv("multiplayer", "nash", format!("({})", actions.join(", ")));
        report.kv("multiplayer", "no_infected", outcome.no_infected);
    }
    if ctx.file.bayesian.is_some() {
        let rho = ctx.file.bayesian()?.rho;
        let so = multiplayer_so_condition(rho, &costs).map_err(CliError::compute)?;
        report.kv("multiplayer", "so_ratio_lhs", so.lhs);
        report.kv("multiplayer", "so_ratio_rhs", so.rhs);
        report.kv("multiplayer", "so_all_out", so.holds);
    }
    Ok(report)
}

pub fn mask_bayesian(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    let costs = ctx.file.mask_costs()?;
    let setting = ctx.file.bayesian()?;
    let cond = bayesian_mask_condition(&setting, &costs);
    let best = bayesian_best_p2(&setting, &costs);
    let u0 = bayesian_expected_cost(&setting, 0.0, &costs);
    let u1 = bayesian_expected_cost(&setting, 1.0, &costs);

    let mut r = Report::key_value();
    let sec = "bayesian";
    r.kv(sec, "rho", setting.rho);
    r.kv(sec, "p1", setting.p1);
    r.kv(sec, "c_use", costs.c_use());
    r.kv(sec, "c_infection", costs.c_infection());
    r.kv(sec, "threshold_ratio", cond.threshold);
    r.kv(sec, "threshold", cond.price_threshold(&costs));
    r.kv(sec, "decision", if cond.wear { "wear" } else { "no mask" });
    r.kv(sec, "best_p2", best);
    r.kv(sec, "expected_cost_no_mask", u0);
    r.kv(sec, "expected_cost_mask", u1);

    if ctx.verify {
        checks.affine(
            "expected cost affine in p2",
            |p| bayesian_expected_cost(&setting, p, &costs),
            0.0,
            1.0,
        );
        let endpoint = if u1 < u0 { 1.0 } else { 0.0 };
        let tie = (u1 - u0).abs() <= DEFAULT_TOL * u0.abs().max(1.0);
        checks.record(
            "best p2 vs endpoint comparison",
            tie || endpoint == best,
            format!("U(0)={u0}, U(1)={u1}, best_p2={best}"),
        );
    }
    Ok(r)
}

pub fn mask_efficiency(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    let costs = ctx.file.mask_costs()?;
    let eff = ctx.file.efficiency()?;
    let an = efficiency_analysis(&eff, &costs);
    let u = |p: f64| efficiency_expected_cost(p, &eff, &costs);

    let mut r = Report::key_value();
    let sec = "efficiency";
    r.kv(sec, "a", eff.a);
    r.kv(sec, "b", eff.b);
    r.kv(sec, "c_use", costs.c_use());
    r.kv(sec, "c_infection", costs.c_infection());
    r.kv(sec, "second_derivative", an.second_derivative);
    r.kv(
        sec,
        "stationary_p",
        match an.stationary_p {
            Some(p) => Cell::Num(p),
            None => Cell::Text("none".into()),
        },
    );
    r.kv(sec, "use_beats_no_threshold", an.use_beats_no_threshold);
    r.kv(sec, "use_beats_no", an.use_beats_no);
    r.kv(sec, "best_p", an.best_p);
    r.kv(sec, "expected_cost_best", u(an.best_p));
    r.kv(sec, "expected_cost_no_mask", u(0.0));
    r.kv(sec, "expected_cost_always_mask", u(1.0));
    r.kv(sec, "degenerate", an.degenerate);

    if ctx.verify {
        checks.argmin("best p vs grid", u, 0.0, 1.0, 10_001, an.best_p, 1e-4);
        let h = 1e-3;
        let fd = (u(0.5 + h) - 2.0 * u(0.5) + u(0.5 - h)) / (h * h);
        let scale = an.second_derivative.abs().max(1.0);
        checks.record(
            "curvature vs finite difference",
            (fd - an.second_derivative).abs() <= 1e-6 * scale,
            format!("analytic {}, finite difference {fd}", an.second_derivative),
        );
    }
    Ok(r)
}

pub fn distancing(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    let p = ctx.file.distancing()?;
    let d = stay_home_decision(&p);
    let risk = p.infection_prob * p.mortality;
    let u_go = distancing_utility(1.0, &p);
    let u_stay = distancing_utility(0.0, &p);

    let mut r = Report::key_value();
    let sec = "distancing";
    r.kv(sec, "B", p.benefit);
    r.kv(sec, "C", p.home_cost);
    r.kv(sec, "m", p.mortality);
    r.kv(sec, "L", p.life_value);
    r.kv(sec, "rho", p.infection_prob);
    r.kv(sec, "life_value_multiplier", if risk > 0.0 { 1.0 / risk } else { f64::INFINITY });
    r.kv(sec, "life_value_threshold", d.life_value_threshold);
    r.kv(sec, "decision", d.decision.label());
    r.kv(sec, "utility_go", u_go);
    r.kv(sec, "utility_stay", u_stay);

    if ctx.verify {
        checks.affine("utility affine in p", |x| distancing_utility(x, &p), 0.0, 1.0);
        let tie = (u_go - u_stay).abs() <= DEFAULT_TOL * u_stay.abs().max(1.0);
        let expected = if u_go < u_stay { Decision::Stay } else { Decision::Go };
        checks.record(
            "decision vs utility comparison",
            tie || expected == d.decision,
            format!("U(go)={u_go}, U(stay)={u_stay}"),
        );
    }
    Ok(r)
}

pub fn meeting_opt(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    let obj = ctx.objective()?;
    let domain = ctx.domain()?;
    let life_value = ctx.file.distancing()?.life_value;
    let best = obj
        .optimal_meeting_with(&domain, ctx.exec)
        .map_err(CliError::compute)?;
    let go = obj
        .extended_go_decision_with(life_value, &domain, ctx.exec)
        .map_err(CliError::compute)?;

    let mut r = Report::key_value();
    let sec = "meeting";
    r.kv(sec, "benefit", obj.benefit.to_string());
    r.kv(sec, "cost", obj.cost.to_string());
    r.kv(sec, "rho", obj.rho);
    r.kv(sec, "m", obj.mortality);
    r.kv(sec, "z_min", domain.z_min);
    r.kv(sec, "z_max", domain.z_max);
    r.kv(sec, "grid_steps", domain.grid_steps as u64);
    r.kv(sec, "z_star", best.z_star);
    r.kv(sec, "objective_max", best.value);
    r.kv(sec, "L", life_value);
    r.kv(sec, "decision", go.decision.label());

    if ctx.verify {
        let fine = domain.grid_steps.saturating_mul(10).saturating_add(1);
        checks.argmin(
            "z* vs 10x finer grid",
            |z| -obj.at(z),
            domain.z_min,
            domain.z_max,
            fine,
            best.z_star,
            domain.step(),
        );
        let expected = if best.value > life_value { Decision::Go } else { Decision::Stay };
        checks.record(
            "decision vs maximum",
            expected == go.decision,
            format!("max {} vs L {life_value}", best.value),
        );
    }
    Ok(r)
}

pub fn curves(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    let obj = ctx.objective()?;
    let domain = ctx.domain()?;
    let series = obj
        .curve_series_with(&domain, ctx.exec)
        .map_err(CliError::compute)?;
    let mut r = Report::new(["z", "objective"]);
    for &(z, v) in &series {
        r.push(vec![Cell::Num(z), Cell::Num(v)]);
    }
    if ctx.verify {
        checks.record(
            "series length",
            series.len() == domain.grid_steps + 1,
            format!("{} points for {} steps", series.len(), domain.grid_steps),
        );
        let ends_ok = series.first().map(|p| p.0) == Some(domain.z_min)
            && series.last().map(|p| p.0) == Some(domain.z_max);
        checks.record("series endpoints", ends_ok, "first z_min, last z_max");
        let mut worst = 0.0_f64;
        for &(z, v) in series.iter().step_by((series.len() / 16).max(1)) {
            let direct = z_objective(z, obj.benefit, obj.cost, obj.rho, obj.mortality)
                .map_err(CliError::compute)?;
            worst = worst.max((direct - v).abs() / direct.abs().max(1.0));
        }
        checks.record(
            "series vs direct evaluation",
            worst <= DEFAULT_TOL,
            format!("largest relative gap {worst:e}"),
        );
    }
    Ok(r)
}

pub const POLICY_COLUMNS: [&str; 13] = [
    "rank",
    "policies",
    "decision",
    "z_star",
    "group_size",
    "duration",
    "wear_probability",
    "expected_infections",
    "social_cost",
    "designer_cost",
    "testing_outlay",
    "suppressed_benefit",
    "warnings",
];

pub fn policy_compare(ctx: &Context, checks: &mut Checks) -> Result<Report> {
    let scenario = ctx.scenario()?;
    let sets = ctx.file.policy_sets()?;
    let model = ctx.file.designer()?;
    let ranked =
        compare_policies_with(&scenario, &sets, &model, ctx.exec).map_err(CliError::compute)?;

    let mut r = Report::new(POLICY_COLUMNS);
    for (rank, entry) in ranked.iter().enumerate() {
        let rep = &entry.report;
        let c = &rep.citizen_outcome;
        r.push(vec![
            Cell::Int(rank as u64 + 1),
            describe_policies(&entry.policies).into(),
            c.decision.label().into(),
            Cell::Num(c.z_star.unwrap_or(0.0)),
            Cell::Num(c.group_size.unwrap_or(0.0)),
            Cell::Num(c.duration.unwrap_or(0.0)),
            Cell::Num(c.mask.as_ref().map_or(0.0, |m| m.wear_probability)),
            Cell::Num(rep.expected_infections),
            Cell::Num(rep.social_cost),
            Cell::Num(rep.designer_cost),
            Cell::Num(rep.testing_outlay),
            Cell::Num(rep.suppressed_benefit),
            rep.warnings.join("; ").into(),
        ]);
        if ctx.verify {
            verify_policy_set(&scenario, &entry.policies, rep, &model, checks)?;
        }
    }
    if ctx.verify {
        let sorted = ranked.windows(2).all(|w| {
            let (a, b) = (&w[0].report, &w[1].report);
            a.designer_cost < b.designer_cost
                || (a.designer_cost == b.designer_cost && a.social_cost <= b.social_cost)
        });
        checks.record("ranking order", sorted, "designer cost, then social cost");
    }
    Ok(r)
}

fn verify_policy_set(
    scenario: &Scenario,
    policies: &[Policy],
    rep: &pandemic_games::policy::MechanismReport,
    model: &pandemic_games::policy::DesignerCostModel,
    checks: &mut Checks,
) -> Result<()> {
    let name = describe_policies(policies);
    let mut s = scenario.clone();
    for p in policies {
        s = apply_policy(&s, p).map_err(CliError::compute)?;
    }
    if let Some(mask) = &rep.citizen_outcome.mask {
        let allowed = s.allowed_mask_actions();
        let position = |a: MaskAction| allowed.iter().position(|&x| x == a);
        for pair in &mask.pairs {
            let game = s.pair_game(pair.statuses.0, pair.statuses.1);
            let oracle = enumerate_pure_ne(&game, DEFAULT_TOL);
            let played = position(pair.actions.0)
                .zip(position(pair.actions.1))
                .map(|(i, j)| pandemic_games::game::StrategyProfile::new(i, j));
            checks.record(
                format!("{name}: {}-{} pair is an equilibrium", pair.statuses.0.label(), pair.statuses.1.label()),
                played.is_some_and(|p| oracle.contains(&p)),
                format!("played ({}, {})", pair.actions.0.label(), pair.actions.1.label()),
            );
        }
    }
    if s.policy.lockdown {
        checks.record(
            format!("{name}: lockdown infections"),
            rep.expected_infections == 0.0,
            format!("{}", rep.expected_infections),
        );
    }
    if let (Some(cap), Some(g)) = (s.policy.gathering_cap, rep.citizen_outcome.group_size) {
        checks.record(
            format!("{name}: group within cap"),
            g <= f64::from(cap) + DEFAULT_TOL,
            format!("g={g}, cap={cap}"),
        );
    }
    let outlay = testing_outlay(policies, s.population);
    let inputs = DesignerInputs {
        expected_infections: rep.expected_infections,
        suppressed_benefit: rep.suppressed_benefit,
        population: s.population,
    };
    let recomputed = designer_cost(&inputs, policies, model);
    checks.record(
        format!("{name}: designer cost"),
        outlay == rep.testing_outlay
            && (recomputed - rep.designer_cost).abs() <= DEFAULT_TOL * recomputed.abs().max(1.0),
        format!("recomputed {recomputed}, reported {}", rep.designer_cost),
    );
    Ok(())
}
