use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use pandemic_games::distancing::{CostBenefitFunction, MeetingDomain, MeetingObjective};
use pandemic_games::mask::{BayesianSetting, EfficiencyParams, MaskCosts};
use pandemic_games::policy::{
    compare_policies_with, DesignerCostModel, Policy, Scenario,
};
use pandemic_games::distancing::DistancingParams;
use pandemic_games::Execution;

const PATHS: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn mixed_objective() -> MeetingObjective {
    MeetingObjective::new(
        CostBenefitFunction::linear(10.0, 0.0).unwrap(),
        CostBenefitFunction::Constant(500.0),
        0.0077,
        0.034,
    )
    .unwrap()
}

fn bench_optimal_meeting(c: &mut Criterion) {
    let objective = mixed_objective();
    let mut group = c.benchmark_group("optimal_meeting");
    for steps in [10_000usize, 100_000, 1_000_000] {
        let domain = MeetingDomain::new(0.1, 100.0, steps).unwrap();
        for (name, exec) in PATHS {
            group.bench_with_input(BenchmarkId::new(name, steps), &domain, |b, d| {
                b.iter(|| objective.optimal_meeting_with(black_box(d), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_curve_series(c: &mut Criterion) {
    let objective = mixed_objective();
    let domain = MeetingDomain::new(0.1, 100.0, 100_000).unwrap();
    let mut group = c.benchmark_group("curve_series");
    for (name, exec) in PATHS {
        group.bench_function(name, |b| {
            b.iter(|| objective.curve_series_with(black_box(&domain), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_compare_policies(c: &mut Criterion) {
    let scenario = Scenario::new(
        MaskCosts::new(1.0, 10.0, 100.0, 1000.0).unwrap(),
        EfficiencyParams::default(),
        BayesianSetting::new(0.2, 0.5).unwrap(),
        DistancingParams::new(3000.0, 0.0, 0.034, 11.3e6, 0.0077).unwrap(),
        CostBenefitFunction::linear(10.0, 0.0).unwrap(),
        CostBenefitFunction::Constant(500.0),
        MeetingDomain::new(0.1, 100.0, 20_000).unwrap(),
        10_000,
    )
    .unwrap();
    let model = DesignerCostModel::new(1.0, 1.0, 1.0).unwrap();
    let sets: Vec<Vec<Policy>> = (0..32)
        .map(|k| {
            let mut set = vec![Policy::FreeMasks {
                subsidy: f64::from(k) * 5.0,
            }];
            if k % 2 == 0 {
                set.push(Policy::MaskMandate);
            }
            if k % 3 == 0 {
                set.push(Policy::TargetedTesting {
                    per_test_cost: 20.0,
                    traced_fraction: 0.1,
                });
            }
            set
        })
        .collect();
    let mut group = c.benchmark_group("compare_policies");
    for (name, exec) in PATHS {
        group.bench_function(name, |b| {
            b.iter(|| compare_policies_with(black_box(&scenario), &sets, &model, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_optimal_meeting,
    bench_curve_series,
    bench_compare_policies
);
criterion_main!(benches);
