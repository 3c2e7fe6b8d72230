mod common;

use atlh::cegm::{load_model, StateSet};
use atlh::mcheck::{strategic_holds, CheckOptions, StrategyMode, SuccessScope, TemporalGoal};

/// `a` must pick the same action in `s1` and `s2` under uniform strategies;
/// `x` wins only from `s1`, `y` only from `s2`.
const GUESS: &str = "\
agents: a
states: s0 s1 s2 win lose
init: s0
actions a: x y
trans s0 (x) -> s1
trans s0 (y) -> s2
trans s1 (x) -> win
trans s1 (y) -> lose
trans s2 (x) -> lose
trans s2 (y) -> win
trans win (x) -> win
trans win (y) -> win
trans lose (x) -> lose
trans lose (y) -> lose
obs a: s1 ~ s2
prop goal: win
";

fn goal(m: &atlh::cegm::Cegm) -> TemporalGoal {
    TemporalGoal::Until {
        hold: StateSet::full(m.num_states()),
        target: m.prop_states("goal").unwrap().clone(),
    }
}

#[test]
fn lasso_oracle_on_guessing_game() {
    let m = load_model(GUESS).unwrap();
    let g = goal(&m);
    let s1 = m.state_index("s1").unwrap();
    for mode in [StrategyMode::Uniform, StrategyMode::NonUniform] {
        assert!(common::lasso_holds(&m, &[0], &g, 0, mode, SuccessScope::Objective));
        assert!(common::lasso_holds(&m, &[0], &g, s1, mode, SuccessScope::Objective));
    }
    assert!(!common::lasso_holds(&m, &[0], &g, s1, StrategyMode::Uniform, SuccessScope::Subjective));
    assert!(common::lasso_holds(&m, &[0], &g, s1, StrategyMode::NonUniform, SuccessScope::Subjective));
    assert!(!common::lasso_holds(&m, &[], &g, 0, StrategyMode::Uniform, SuccessScope::Objective));
}

#[test]
fn engine_agrees_on_guessing_game() {
    let m = load_model(GUESS).unwrap();
    let g = goal(&m);
    for mode in [StrategyMode::Uniform, StrategyMode::NonUniform] {
        for scope in [SuccessScope::Objective, SuccessScope::Subjective] {
            for force_enumeration in [false, true] {
                let opts = CheckOptions {
                    strategy_mode: mode,
                    success_scope: scope,
                    force_enumeration,
                    ..CheckOptions::default()
                };
                for q in 0..m.num_states() {
                    for coalition in [&[][..], &[0][..]] {
                        assert_eq!(
                            strategic_holds(&m, q, coalition, &g, &opts).unwrap(),
                            common::lasso_holds(&m, coalition, &g, q, mode, scope),
                            "state {q}, {mode}, {scope:?}, coalition {coalition:?}"
                        );
                    }
                }
            }
        }
    }
}

/// `F (p & G q)` where the only `p` state is left for a `!q` state every
/// other step: no lasso keeps `q` forever after `p`.
#[test]
fn eventually_always_needs_a_stable_suffix() {
    let m = load_model(
        "agents: a\nstates: s t\ninit: s\nactions a: x\ntrans s (x) -> t\ntrans t (x) -> s\nprop p: s\nprop q: s\n",
    )
    .unwrap();
    let g = TemporalGoal::EventuallyAlways {
        reach: m.prop_states("p").unwrap().clone(),
        stay: m.prop_states("q").unwrap().clone(),
    };
    assert!(!common::lasso_holds(&m, &[0], &g, 0, StrategyMode::Uniform, SuccessScope::Objective));
    assert!(!strategic_holds(&m, 0, &[0], &g, &CheckOptions::default()).unwrap());
}

#[test]
fn strategy_counts() {
    let m = load_model(GUESS).unwrap();
    assert_eq!(common::strategy_count(&m, &[0], StrategyMode::Uniform), 16);
    assert_eq!(common::strategy_count(&m, &[0], StrategyMode::NonUniform), 32);
}
