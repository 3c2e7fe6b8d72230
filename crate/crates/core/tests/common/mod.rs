//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use atlh::cegm::{Cegm, StateSet};
use atlh::formula::{Formula, Threshold};
use atlh::mcheck::{StrategyMode, SuccessScope, TemporalGoal};
use atlh::sample::{random_model, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn models(seed: u64, count: usize, params: &ModelParams) -> Vec<(u64, Cegm)> {
    let mut root = rng(seed);
    (0..count)
        .map(|_| {
            let s: u64 = root.gen();
            (s, random_model(&mut rng(s), params))
        })
        .collect()
}

pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> StateSet {
    StateSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

/// Direct evaluation of formulas without strategic operators.
pub fn eval(model: &Cegm, q: usize, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => model.prop_states(p).is_some_and(|s| s.contains(q)),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !eval(model, q, g),
        Formula::And(a, b) => eval(model, q, a) && eval(model, q, b),
        Formula::Or(a, b) => eval(model, q, a) || eval(model, q, b),
        Formula::Knows(a, g) => {
            let ag = model.agent_index(a).unwrap();
            model.class(ag, q).iter().all(|r| eval(model, r, g))
        }
        Formula::MutualKnows(c, g) => c.iter().all(|a| {
            let ag = model.agent_index(a).unwrap();
            model.class(ag, q).iter().all(|r| eval(model, r, g))
        }),
        Formula::Hartley(a, cmp, t, beta) => {
            let count = hartley_count(model, a, q, beta) as f64;
            let ord = match t {
                Threshold::LogOfCount(k) => count.partial_cmp(&(*k as f64)),
                Threshold::Real(r) => count.log2().partial_cmp(&r.to_f64()),
            };
            cmp.holds(ord.unwrap())
        }
        other => panic!("strategic formula given to the direct evaluator: {other}"),
    }
}

pub fn hartley_count(model: &Cegm, agent: &str, q: usize, beta: &[Formula]) -> usize {
    let ag = model.agent_index(agent).unwrap();
    let vectors: HashSet<Vec<bool>> = model
        .class(ag, q)
        .iter()
        .map(|r| beta.iter().map(|b| eval(model, r, b)).collect())
        .collect();
    vectors.len()
}

/// Action per coalition member and state.
type Choice = Vec<Vec<usize>>;

fn strategies(model: &Cegm, coalition: &[usize], mode: StrategyMode) -> Vec<Choice> {
    let n = model.num_states();
    // decision units: (member position, states sharing the choice)
    let mut units: Vec<(usize, Vec<usize>)> = Vec::new();
    for (pos, &a) in coalition.iter().enumerate() {
        match mode {
            StrategyMode::Uniform => {
                let mut seen = BTreeSet::new();
                for q in 0..n {
                    let block: Vec<usize> = model.class(a, q).iter().collect();
                    if seen.insert(block.clone()) {
                        units.push((pos, block));
                    }
                }
            }
            StrategyMode::NonUniform => units.extend((0..n).map(|q| (pos, vec![q]))),
        }
    }
    let mut out = Vec::new();
    let mut current: Choice = vec![vec![usize::MAX; n]; coalition.len()];
    fn go(model: &Cegm, coalition: &[usize], units: &[(usize, Vec<usize>)], i: usize, cur: &mut Choice, out: &mut Vec<Choice>) {
        if i == units.len() {
            out.push(cur.clone());
            return;
        }
        let (pos, block) = &units[i];
        for &act in model.avail(coalition[*pos], block[0]) {
            for &q in block {
                cur[*pos][q] = act;
            }
            go(model, coalition, units, i + 1, cur, out);
        }
    }
    go(model, coalition, &units, 0, &mut current, &mut out);
    out
}

fn successors(model: &Cegm, coalition: &[usize], s: &Choice, q: usize) -> Vec<usize> {
    let mut out: Vec<usize> = model
        .profiles(q)
        .into_iter()
        .filter(|(p, _)| coalition.iter().enumerate().all(|(pos, &a)| p[a] == s[pos][q]))
        .map(|(_, t)| t)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Truth of the goal on the lasso `path[..loop_at] (path[loop_at..])^ω`.
fn lasso_satisfies(goal: &TemporalGoal, path: &[usize], loop_at: usize) -> bool {
    let k = path.len();
    let at = |j: usize| if j < k { path[j] } else { path[loop_at + (j - loop_at) % (k - loop_at)] };
    match goal {
        TemporalGoal::Next(t) => t.contains(at(1)),
        TemporalGoal::Always(t) => path.iter().all(|&s| t.contains(s)),
        TemporalGoal::Until { hold, target } => match (0..k).find(|&j| target.contains(path[j])) {
            Some(j) => path[..j].iter().all(|&s| hold.contains(s)),
            None => false,
        },
        TemporalGoal::EventuallyAlways { reach, stay } => (0..k).any(|j| {
            reach.contains(path[j]) && path[j.min(loop_at)..].iter().all(|&s| stay.contains(s))
        }),
    }
}

/// Whether every simple lasso from `q` under the strategy satisfies the
/// goal.
fn all_lassos(model: &Cegm, coalition: &[usize], s: &Choice, goal: &TemporalGoal, q: usize) -> bool {
    fn dfs(
        model: &Cegm,
        coalition: &[usize],
        s: &Choice,
        goal: &TemporalGoal,
        path: &mut Vec<usize>,
    ) -> bool {
        let last = *path.last().unwrap();
        for t in successors(model, coalition, s, last) {
            let ok = match path.iter().position(|&x| x == t) {
                Some(i) => lasso_satisfies(goal, path, i),
                None => {
                    path.push(t);
                    let r = dfs(model, coalition, s, goal, path);
                    path.pop();
                    r
                }
            };
            if !ok {
                return false;
            }
        }
        true
    }
    dfs(model, coalition, s, goal, &mut vec![q])
}

/// Brute force: some strategy of the coalition makes every lasso path from
/// every start state satisfy the goal.
pub fn lasso_holds(
    model: &Cegm,
    coalition: &[usize],
    goal: &TemporalGoal,
    q: usize,
    mode: StrategyMode,
    scope: SuccessScope,
) -> bool {
    let mut starts = vec![q];
    if scope == SuccessScope::Subjective {
        for &a in coalition {
            starts.extend(model.class(a, q).iter());
        }
    }
    strategies(model, coalition, mode)
        .iter()
        .any(|s| starts.iter().all(|&r| all_lassos(model, coalition, s, goal, r)))
}

pub fn strategy_count(model: &Cegm, coalition: &[usize], mode: StrategyMode) -> u128 {
    let n = model.num_states();
    let mut total: u128 = 1;
    for &a in coalition {
        let mut seen = BTreeSet::new();
        for q in 0..n {
            let key = match mode {
                StrategyMode::Uniform => model.class(a, q).iter().collect::<Vec<_>>(),
                StrategyMode::NonUniform => vec![q],
            };
            if seen.insert(key) {
                total = total.saturating_mul(model.avail(a, q).len() as u128);
            }
        }
    }
    total
}

/// ThreeBallot information-set table as printed: vote, ballot set, receipt and the coercer's possible
/// information sets, one row per line.
pub const PRINTED_TABLE: &str = "\
nAnB | BB FB BF | BB | nAnB ; AnB nAnB ; nAB nAnB ; AnB nAB nAnB ; AnB nAB AB nAnB
nAnB | BB FB BF | FB | nAnB ; nAB nAnB ; AnB nAnB ; AnB AB nAnB ; AnB nAB AB nAnB
nAnB | BB FB BF | BF | nAnB ; nAB nAnB ; AnB nAnB ; nAB AB nAnB ; AnB nAB AB nAnB
nAnB | BB BB FF | BB | nAnB ; nAB nAnB ; AnB nAnB ; AB nAnB ; AnB nAB AB nAnB
nAnB | BB BB FF | FF | nAnB ; nAB nAnB ; AnB nAnB ; AB nAnB ; AnB nAB AB nAnB
AnB | BB FB FF | BB | AnB ; AnB AB ; AnB nAnB ; AnB nAB nAnB ; AnB nAB AB nAnB
AnB | BB FB FF | FB | AnB ; AnB AB ; AnB nAnB ; AnB AB nAnB ; AnB nAB AB nAnB
AnB | BB FB FF | FF | AnB ; AnB AB ; AnB nAnB ; AnB nAB AB ; AnB nAB AB nAnB
AnB | FB FB BF | FB | AnB ; AnB nAB ; AnB AB ; AnB nAnB ; AnB nAB AB nAnB
AnB | FB FB BF | BF | AnB ; AnB nAB ; AnB AB ; AnB nAnB ; AnB nAB AB nAnB
nAB | BB BF FF | BB | nAB ; nAB nAnB ; nAB AB ; AnB nAB nAnB ; AnB nAB AB nAnB
nAB | BB BF FF | BF | nAB ; nAB AB ; nAB nAnB ; nAB AB nAnB ; AnB nAB AB nAnB
nAB | BB BF FF | FF | nAB ; nAB nAnB ; nAB AB ; AnB nAB AB ; AnB nAB AB nAnB
nAB | FB BF BF | FB | nAB ; nAB nAnB ; nAB AB ; AnB nAB ; AnB nAB AB nAnB
nAB | FB BF BF | BF | nAB ; nAB nAnB ; nAB AB ; AnB nAB ; AnB nAB AB nAnB
AB | FB BF FF | FB | AB ; AnB AB ; nAB AB ; AnB AB nAnB ; AnB nAB AB nAnB
AB | FB BF FF | BF | AB ; AnB AB ; nAB AB ; nAB AB nAnB ; AnB nAB AB nAnB
AB | FB BF FF | FF | AB ; AnB AB ; nAB AB ; AnB nAB AB ; AnB nAB AB nAnB
AB | BB FF FF | BB | AB ; AB nAnB ; AnB AB ; nAB AB ; AnB nAB AB nAnB
AB | BB FF FF | FF | AB ; AB nAnB ; AnB AB ; nAB AB ; AnB nAB AB nAnB";

/// A table row in plain strings: vote, ballots, receipt, sorted sets.
pub type PlainRow = (String, Vec<String>, String, BTreeSet<BTreeSet<String>>);

pub fn printed_table() -> Vec<PlainRow> {
    PRINTED_TABLE
        .lines()
        .map(|line| {
            let cols: Vec<&str> = line.split('|').map(str::trim).collect();
            let sets = cols[3]
                .split(';')
                .map(|s| s.split_whitespace().map(str::to_string).collect())
                .collect();
            (
                cols[0].to_string(),
                cols[1].split_whitespace().map(str::to_string).collect(),
                cols[2].to_string(),
                sets,
            )
        })
        .collect()
}

pub fn plain_rows(table: &atlh::scenarios::InfosetTable) -> Vec<PlainRow> {
    table
        .rows
        .iter()
        .map(|r| {
            (
                r.vote.code().to_string(),
                r.ballots.ballots().iter().map(|b| b.to_string()).collect(),
                r.receipt.to_string(),
                r.infosets
                    .iter()
                    .map(|s| s.iter().map(|v| v.code().to_string()).collect())
                    .collect(),
            )
        })
        .collect()
}
