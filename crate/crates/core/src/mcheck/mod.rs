//! Bottom-up labeling for ATLH/ATLK over memoryless strategies.

mod hartley;
mod strategic;
mod strategy;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cegm::{Cegm, StateSet};
use crate::formula::{Coalition, Formula};

pub use hartley::{compare_log, hartley_classes, log_ordering};
pub use strategic::TemporalGoal;
pub use strategy::{DecisionPoint, Strategy, StrategySpace};

use strategic::Engine;

/// `ir` strategies must agree on indistinguishable states; `Ir` need not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrategyMode {
    #[default]
    Uniform,
    NonUniform,
}

impl FromStr for StrategyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ir" => Ok(StrategyMode::Uniform),
            "Ir" => Ok(StrategyMode::NonUniform),
            other => Err(format!("unknown strategy mode `{other}` (expected `ir` or `Ir`)")),
        }
    }
}

impl fmt::Display for StrategyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyMode::Uniform => "ir",
            StrategyMode::NonUniform => "Ir",
        })
    }
}

/// Where a strategy has to succeed: from the evaluation state only, or from
/// every state some coalition member considers possible there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuccessScope {
    #[default]
    Objective,
    Subjective,
}

impl FromStr for SuccessScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "objective" => Ok(SuccessScope::Objective),
            "subjective" => Ok(SuccessScope::Subjective),
            other => Err(format!(
                "unknown success scope `{other}` (expected `objective` or `subjective`)"
            )),
        }
    }
}

impl fmt::Display for SuccessScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuccessScope::Objective => "objective",
            SuccessScope::Subjective => "subjective",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    pub strategy_mode: StrategyMode,
    pub success_scope: SuccessScope,
    /// Worker threads for strategy enumeration; 1 runs inline.
    pub threads: usize,
    /// Largest strategy space that will be enumerated.
    pub strategy_cap: u128,
    /// Enumerate strategies even when a fixpoint over the game suffices.
    pub force_enumeration: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strategy_mode: StrategyMode::Uniform,
            success_scope: SuccessScope::Objective,
            threads: 1,
            strategy_cap: 1 << 28,
            force_enumeration: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("unknown proposition `{0}`")]
    UnknownAtom(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(
        "strategy space of coalition {{{}}} has {} strategies, above the cap of {cap}",
        coalition.join(", "),
        count.map(|c| c.to_string()).unwrap_or_else(|| "more than 2^128".to_string())
    )]
    StrategySpaceTooLarge {
        coalition: Vec<String>,
        count: Option<u128>,
        cap: u128,
    },
    #[error("cannot start worker threads: {0}")]
    ThreadPool(String),
}

/// Truth sets of every subformula, in evaluation order.
#[derive(Debug, Clone)]
pub struct Labeling {
    order: Vec<Formula>,
    sets: HashMap<Formula, StateSet>,
}

impl Labeling {
    pub fn get(&self, f: &Formula) -> Option<&StateSet> {
        self.sets.get(f)
    }

    /// Subformulas in the order they were labeled; the checked formula is last.
    pub fn formulas(&self) -> &[Formula] {
        &self.order
    }

    pub fn root(&self) -> &StateSet {
        &self.sets[self.order.last().expect("labeling is never empty")]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Formula, &StateSet)> {
        self.order.iter().map(move |f| (f, &self.sets[f]))
    }
}

fn agent_index(model: &Cegm, name: &str) -> Result<usize, CheckError> {
    model
        .agent_index(name)
        .ok_or_else(|| CheckError::UnknownAgent(name.to_string()))
}

fn coalition_indices(model: &Cegm, c: &Coalition) -> Result<Vec<usize>, CheckError> {
    c.iter().map(|a| agent_index(model, a)).collect()
}

/// Reports the first atom or agent the model does not declare.
pub fn validate(model: &Cegm, f: &Formula) -> Result<(), CheckError> {
    for p in f.atoms() {
        if model.prop_index(p).is_none() {
            return Err(CheckError::UnknownAtom(p.to_string()));
        }
    }
    for a in f.agents() {
        agent_index(model, a)?;
    }
    Ok(())
}

fn knows(model: &Cegm, agent: usize, arg: &StateSet) -> StateSet {
    let mut out = StateSet::empty(model.num_states());
    for block in model.classes(agent) {
        if block.is_subset(arg) {
            out.union_with(block);
        }
    }
    out
}

/// Labels every subformula of `f` in ascending length order.
pub fn label(model: &Cegm, f: &Formula, opts: &CheckOptions) -> Result<Labeling, CheckError> {
    validate(model, f)?;
    let engine = Engine::new(model, opts)?;
    let n = model.num_states();
    let order = f.subformulas_by_length();
    let mut sets: HashMap<Formula, StateSet> = HashMap::with_capacity(order.len());
    for g in &order {
        let set = {
            let get = |h: &Formula| -> &StateSet { &sets[h] };
            match g {
                Formula::Atom(p) => model.prop_states(p).expect("validated").clone(),
                Formula::True => StateSet::full(n),
                Formula::False => StateSet::empty(n),
                Formula::Not(h) => get(h).complement(),
                Formula::And(a, b) => get(a).intersection(get(b)),
                Formula::Or(a, b) => get(a).union(get(b)),
                Formula::Knows(a, h) => knows(model, agent_index(model, a)?, get(h)),
                Formula::MutualKnows(c, h) => {
                    let mut out = StateSet::full(n);
                    for a in coalition_indices(model, c)? {
                        out.intersect_with(&knows(model, a, get(h)));
                    }
                    out
                }
                Formula::Hartley(a, cmp, t, beta) => {
                    let agent = agent_index(model, a)?;
                    let labels: Vec<StateSet> = beta.iter().map(|b| get(b).clone()).collect();
                    let mut out = StateSet::empty(n);
                    for block in model.classes(agent) {
                        let count = hartley::count_vectors(block, &labels) as u64;
                        if compare_log(count, *cmp, *t) {
                            out.union_with(block);
                        }
                    }
                    out
                }
                Formula::CoalX(..) | Formula::CoalG(..) | Formula::CoalU(..) | Formula::CoalFG(..) => {
                    let (c, goal) = goal_of(model, g, &sets)?;
                    engine.label(&c, &goal)?
                }
            }
        };
        sets.insert(g.clone(), set);
    }
    Ok(Labeling { order, sets })
}

fn goal_of(
    model: &Cegm,
    f: &Formula,
    sets: &HashMap<Formula, StateSet>,
) -> Result<(Vec<usize>, TemporalGoal), CheckError> {
    let get = |h: &Formula| sets[h].clone();
    Ok(match f {
        Formula::CoalX(c, h) => (coalition_indices(model, c)?, TemporalGoal::Next(get(h))),
        Formula::CoalG(c, h) => (coalition_indices(model, c)?, TemporalGoal::Always(get(h))),
        Formula::CoalU(c, a, b) => (
            coalition_indices(model, c)?,
            TemporalGoal::Until {
                hold: get(a),
                target: get(b),
            },
        ),
        Formula::CoalFG(c, a, b) => (
            coalition_indices(model, c)?,
            TemporalGoal::EventuallyAlways {
                reach: get(a),
                stay: get(b),
            },
        ),
        other => unreachable!("not a strategic formula: {other}"),
    })
}

/// Truth of `f` at `state`.
pub fn check(model: &Cegm, state: usize, f: &Formula, opts: &CheckOptions) -> Result<bool, CheckError> {
    if state >= model.num_states() {
        return Err(CheckError::UnknownState(state.to_string()));
    }
    Ok(label(model, f, opts)?.root().contains(state))
}

/// Truth of `f` at the state called `state`.
pub fn check_at(model: &Cegm, state: &str, f: &Formula, opts: &CheckOptions) -> Result<bool, CheckError> {
    let q = model
        .state_index(state)
        .ok_or_else(|| CheckError::UnknownState(state.to_string()))?;
    check(model, q, f, opts)
}

/// Whether `coalition` can enforce `goal` from `state`.
pub fn strategic_holds(
    model: &Cegm,
    state: usize,
    coalition: &[usize],
    goal: &TemporalGoal,
    opts: &CheckOptions,
) -> Result<bool, CheckError> {
    let engine = Engine::new(model, opts)?;
    Ok(engine.label(coalition, goal)?.contains(state))
}

/// Strategy witnessing a top-level strategic formula at `state`.
///
/// Returns `None` when `f` is not strategic or does not hold at `state`.
pub fn find_witness(
    model: &Cegm,
    state: usize,
    f: &Formula,
    labeling: &Labeling,
    opts: &CheckOptions,
) -> Result<Option<Strategy>, CheckError> {
    if !f.is_strategic() {
        return Ok(None);
    }
    let (c, goal) = goal_of(model, f, &labeling.sets)?;
    Engine::new(model, opts)?.witness(&c, &goal, state)
}

/// All strategies of `coalition` in enumeration order.
pub fn enumerate_strategies(
    model: &Cegm,
    coalition: &Coalition,
    opts: &CheckOptions,
) -> Result<Vec<Strategy>, CheckError> {
    let c = coalition_indices(model, coalition)?;
    let space = StrategySpace::new(model, &c, opts.strategy_mode);
    match space.count() {
        Some(count) if count <= opts.strategy_cap => Ok(space.iter().collect()),
        count => Err(CheckError::StrategySpaceTooLarge {
            coalition: coalition.iter().map(str::to_string).collect(),
            count,
            cap: opts.strategy_cap,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cegm::load_model;
    use crate::formula::parse_formula;

    const FIG1: &str = "\
agents: v c
states: s0 s1 s2
init: s0
actions v: voteA voteNA eps
actions c: eps
avail v s1: eps
avail v s2: eps
trans s0 (voteA, eps) -> s1
trans s0 (voteNA, eps) -> s2
trans s0 (eps, eps) -> s0
trans s1 (eps, eps) -> s1
trans s2 (eps, eps) -> s2
obs c: s1 ~ s2
prop Voted: s1 s2
prop V_A: s1
";

    fn labels(model: &Cegm, text: &str) -> Vec<String> {
        let f = parse_formula(text).unwrap();
        let l = label(model, &f, &CheckOptions::default()).unwrap();
        model.state_names(l.root()).into_iter().map(String::from).collect()
    }

    #[test]
    fn labels_atoms_and_knowledge() {
        let m = load_model(FIG1).unwrap();
        assert_eq!(labels(&m, "Voted"), vec!["s1", "s2"]);
        assert_eq!(labels(&m, "K[c] Voted"), vec!["s1", "s2"]);
        assert!(labels(&m, "K[c] V_A").is_empty());
        assert_eq!(labels(&m, "E[v, c] Voted"), vec!["s1", "s2"]);
        assert_eq!(labels(&m, "E[] false").len(), 3);
    }

    #[test]
    fn strategic_operators() {
        let m = load_model(FIG1).unwrap();
        assert_eq!(labels(&m, "<v> X V_A"), vec!["s0", "s1"]);
        assert_eq!(labels(&m, "<> X V_A"), vec!["s1"]);
        assert_eq!(labels(&m, "<v> F (Voted & V_A & G !(K[c] V_A | K[c] !V_A))"), vec!["s0", "s1"]);
        assert!(labels(&m, "<v> F (Voted & K[c] V_A)").is_empty());
        assert_eq!(labels(&m, "<v> G !Voted"), vec!["s0"]);
        assert_eq!(labels(&m, "<> G true").len(), 3);
        assert_eq!(labels(&m, "<v> (!Voted U V_A)"), vec!["s0", "s1"]);
    }

    #[test]
    fn enumeration_agrees_with_game_solver() {
        let m = load_model(FIG1).unwrap();
        let forced = CheckOptions {
            force_enumeration: true,
            ..CheckOptions::default()
        };
        for text in ["<v> X V_A", "<v> G !Voted", "<v> (!Voted U V_A)", "<c> F Voted"] {
            let f = parse_formula(text).unwrap();
            let a = label(&m, &f, &CheckOptions::default()).unwrap();
            let b = label(&m, &f, &forced).unwrap();
            assert_eq!(a.root(), b.root(), "{text}");
        }
    }

    #[test]
    fn witness_is_reported() {
        let m = load_model(FIG1).unwrap();
        let f = parse_formula("<v> F V_A").unwrap();
        let opts = CheckOptions::default();
        let l = label(&m, &f, &opts).unwrap();
        let s = find_witness(&m, 0, &f, &l, &opts).unwrap().unwrap();
        assert_eq!(s.action(0, 0), m.action_index(0, "voteA"));
        let g = parse_formula("<v> F (V_A & G V_A)").unwrap();
        let l = label(&m, &g, &opts).unwrap();
        let s = find_witness(&m, 0, &g, &l, &opts).unwrap().unwrap();
        assert_eq!(s.action(0, 0), m.action_index(0, "voteA"));
        let h = parse_formula("<c> F V_A").unwrap();
        let l = label(&m, &h, &opts).unwrap();
        assert!(find_witness(&m, 0, &h, &l, &opts).unwrap().is_none());
    }

    #[test]
    fn subjective_scope_uses_coalition_classes() {
        let m = load_model(FIG1).unwrap();
        let subjective = CheckOptions {
            success_scope: SuccessScope::Subjective,
            ..CheckOptions::default()
        };
        let f = parse_formula("<c> X V_A").unwrap();
        assert!(check_at(&m, "s1", &f, &CheckOptions::default()).unwrap());
        assert!(!check_at(&m, "s1", &f, &subjective).unwrap());
    }

    #[test]
    fn hartley_labels() {
        let m = load_model(FIG1).unwrap();
        assert_eq!(labels(&m, "H[c] = 1 {V_A}"), vec!["s1", "s2"]);
        assert_eq!(labels(&m, "H[c] = log(1) {V_A}"), vec!["s0"]);
        assert_eq!(labels(&m, "H[v] < 1 {V_A, Voted}").len(), 3);
    }

    #[test]
    fn unknown_names_are_errors() {
        let m = load_model(FIG1).unwrap();
        let opts = CheckOptions::default();
        assert_eq!(
            check(&m, 0, &parse_formula("zz").unwrap(), &opts),
            Err(CheckError::UnknownAtom("zz".into()))
        );
        assert_eq!(
            check(&m, 0, &parse_formula("K[q] Voted").unwrap(), &opts),
            Err(CheckError::UnknownAgent("q".into()))
        );
        assert!(matches!(
            check_at(&m, "s9", &parse_formula("Voted").unwrap(), &opts),
            Err(CheckError::UnknownState(_))
        ));
    }

    #[test]
    fn strategy_cap_is_enforced() {
        let m = load_model(FIG1).unwrap();
        let opts = CheckOptions {
            strategy_cap: 2,
            force_enumeration: true,
            ..CheckOptions::default()
        };
        let err = check(&m, 0, &parse_formula("<v> X V_A").unwrap(), &opts).unwrap_err();
        assert!(matches!(err, CheckError::StrategySpaceTooLarge { .. }));
    }

    #[test]
    fn parallel_matches_sequential() {
        let m = load_model(FIG1).unwrap();
        let par = CheckOptions {
            threads: 3,
            force_enumeration: true,
            ..CheckOptions::default()
        };
        let f = parse_formula("<v> F (Voted & G !V_A)").unwrap();
        let a = label(&m, &f, &CheckOptions::default()).unwrap();
        let b = label(&m, &f, &par).unwrap();
        assert_eq!(a.root(), b.root());
        assert_eq!(enumerate_strategies(&m, &Coalition::new(&["v"]), &par).unwrap().len(), 3);
    }
}
