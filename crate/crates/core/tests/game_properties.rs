use proptest::prelude::*;

use pandemic_games::game::{
    dominant_actions, is_pure_nash, pure_nash_equilibria, social_optima, ActionSet, CostTable,
    Player, StrategyProfile,
};
use pandemic_games::oracle::enumerate_pure_ne;
use pandemic_games::DEFAULT_TOL;

fn labels(prefix: &str, n: usize) -> ActionSet {
    ActionSet::new((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

// Integer-valued costs make ties common, which is where solvers disagree.
fn table(max_dim: usize) -> impl Strategy<Value = CostTable> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec((0u32..6, 0u32..6), r * c).prop_map(move |cells| {
            CostTable::from_fn(labels("r", r), labels("c", c), |i, j| {
                let (a, b) = cells[i * c + j];
                (f64::from(a), f64::from(b))
            })
            .unwrap()
        })
    })
}

fn real_table_3x3() -> impl Strategy<Value = CostTable> {
    prop::collection::vec((0.0..1000.0f64, 0.0..1000.0f64), 9).prop_map(|cells| {
        CostTable::from_fn(labels("r", 3), labels("c", 3), |i, j| cells[i * 3 + j]).unwrap()
    })
}

proptest! {
    #[test]
    fn nash_is_sound_and_complete(g in table(4)) {
        let ne = pure_nash_equilibria(&g, DEFAULT_TOL);
        for p in g.profiles() {
            prop_assert_eq!(ne.contains(&p), is_pure_nash(&g, p, DEFAULT_TOL));
        }
        let mut sorted = ne.clone();
        sorted.sort();
        prop_assert_eq!(sorted, ne);
    }

    #[test]
    fn nash_matches_oracle_on_integer_tables(g in table(4)) {
        prop_assert_eq!(pure_nash_equilibria(&g, DEFAULT_TOL), enumerate_pure_ne(&g, DEFAULT_TOL));
    }

    #[test]
    fn nash_matches_oracle_on_real_tables(g in real_table_3x3()) {
        prop_assert_eq!(pure_nash_equilibria(&g, DEFAULT_TOL), enumerate_pure_ne(&g, DEFAULT_TOL));
    }

    #[test]
    fn social_optima_are_minimal(g in table(4)) {
        let total = |p: StrategyProfile| { let (a, b) = g.cost(p); a + b };
        let so = social_optima(&g, DEFAULT_TOL);
        prop_assert!(!so.is_empty());
        for &p in &so {
            for q in g.profiles() {
                prop_assert!(total(q) >= total(p) - DEFAULT_TOL);
            }
        }
    }

    #[test]
    fn strict_dominance_implies_weak(g in table(4)) {
        for player in [Player::One, Player::Two] {
            let strict = dominant_actions(&g, player, false, DEFAULT_TOL);
            let weak = dominant_actions(&g, player, true, DEFAULT_TOL);
            prop_assert!(strict.iter().all(|a| weak.contains(a)));
        }
    }

    #[test]
    fn constant_shift_preserves_equilibria(g in table(4), shift in 0.0..5000.0f64) {
        for player in [Player::One, Player::Two] {
            let h = g.shifted(player, shift).unwrap();
            prop_assert_eq!(pure_nash_equilibria(&g, DEFAULT_TOL), pure_nash_equilibria(&h, DEFAULT_TOL));
            for who in [Player::One, Player::Two] {
                prop_assert_eq!(
                    dominant_actions(&g, who, true, DEFAULT_TOL),
                    dominant_actions(&h, who, true, DEFAULT_TOL)
                );
            }
        }
    }

    #[test]
    fn transpose_swaps_equilibria(g in table(4)) {
        let swapped: Vec<StrategyProfile> = pure_nash_equilibria(&g.transpose(), DEFAULT_TOL)
            .into_iter()
            .map(|p| StrategyProfile::new(p.action_p2, p.action_p1))
            .collect();
        let mut expected = pure_nash_equilibria(&g, DEFAULT_TOL);
        let mut got = swapped;
        expected.sort();
        got.sort();
        prop_assert_eq!(got, expected);
    }
}
