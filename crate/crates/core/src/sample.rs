//! Random models and formulas for property and equivalence testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cegm::{Cegm, CegmBuilder};
use crate::formula::{Cmp, Coalition, Decimal, Formula, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelParams {
    pub min_states: usize,
    pub max_states: usize,
    pub max_agents: usize,
    /// Actions declared per agent, at least 1.
    pub max_actions: usize,
    pub num_props: usize,
    /// Every transition is a self-loop.
    pub reflexive_only: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            min_states: 1,
            max_states: 6,
            max_agents: 3,
            max_actions: 2,
            num_props: 3,
            reflexive_only: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaParams {
    pub max_depth: usize,
    pub max_coalition: usize,
    pub max_beta: usize,
    pub strategic: bool,
    pub knowledge: bool,
    pub hartley: bool,
}

impl Default for FormulaParams {
    fn default() -> Self {
        FormulaParams {
            max_depth: 3,
            max_coalition: 2,
            max_beta: 2,
            strategic: true,
            knowledge: true,
            hartley: true,
        }
    }
}

/// Random model with uniform availability: each agent picks one non-empty
/// action subset per epistemic class.
pub fn random_model<R: Rng>(rng: &mut R, params: &ModelParams) -> Cegm {
    let n = rng.gen_range(params.min_states.max(1)..=params.max_states.max(params.min_states).max(1));
    let k = rng.gen_range(1..=params.max_agents.max(1));
    let agents: Vec<String> = (0..k).map(|i| format!("a{i}")).collect();
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut b = CegmBuilder::new().agents(&agents);
    for s in &states {
        b.add_state(s.clone());
    }
    b.set_initial(states[0].clone());

    let mut avail: Vec<Vec<Vec<String>>> = Vec::with_capacity(k);
    for agent in &agents {
        let num_actions = rng.gen_range(1..=params.max_actions.max(1));
        let actions: Vec<String> = (0..num_actions).map(|i| format!("x{i}")).collect();
        b.set_actions(agent, &actions);
        let blocks = rng.gen_range(1..=n);
        let block_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
        let mut per_block: Vec<Vec<String>> = Vec::with_capacity(blocks);
        for _ in 0..blocks {
            let mut subset: Vec<String> = actions.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
            if subset.is_empty() {
                subset.push(actions.choose(rng).expect("non-empty").clone());
            }
            per_block.push(subset);
        }
        for q in 0..n {
            for r in (q + 1)..n {
                if block_of[q] == block_of[r] {
                    b.add_obs(agent, &states[q], &states[r]);
                }
            }
        }
        let mut agent_avail = Vec::with_capacity(n);
        for q in 0..n {
            let subset = per_block[block_of[q]].clone();
            if subset.len() != actions.len() {
                b.set_avail(agent, &states[q], &subset);
            }
            agent_avail.push(subset);
        }
        avail.push(agent_avail);
    }

    for q in 0..n {
        let mut profile = vec![0usize; k];
        loop {
            let names: Vec<&str> = (0..k).map(|a| avail[a][q][profile[a]].as_str()).collect();
            let target = if params.reflexive_only { q } else { rng.gen_range(0..n) };
            b.add_transition(&states[q], &names, &states[target]);
            let mut a = k;
            let done = loop {
                if a == 0 {
                    break true;
                }
                a -= 1;
                profile[a] += 1;
                if profile[a] < avail[a][q].len() {
                    break false;
                }
                profile[a] = 0;
            };
            if done {
                break;
            }
        }
    }

    for p in 0..params.num_props {
        let holds: Vec<&str> = states
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .map(String::as_str)
            .collect();
        b.add_prop(&format!("p{p}"), &holds);
    }
    b.build().expect("generated models are valid")
}

fn random_coalition<R: Rng>(rng: &mut R, agents: &[String], max: usize) -> Coalition {
    let size = rng.gen_range(0..=max.min(agents.len()));
    agents.choose_multiple(rng, size).cloned().collect()
}

fn random_threshold<R: Rng>(rng: &mut R) -> Threshold {
    if rng.gen_bool(0.5) {
        Threshold::LogOfCount(rng.gen_range(1..=5))
    } else {
        let choices = [
            Decimal::integer(0),
            Decimal::new(5, 1),
            Decimal::integer(1),
            Decimal::new(1585, 3),
            Decimal::integer(2),
            Decimal::new(25, 1),
        ];
        Threshold::Real(*choices.choose(rng).expect("non-empty"))
    }
}

/// Random formula over the model's propositions and agents.
pub fn random_formula<R: Rng>(rng: &mut R, model: &Cegm, params: &FormulaParams) -> Formula {
    gen(rng, model, params, params.max_depth)
}

/// Random formula that contains at least one `K`, `E` or `H` node when the
/// parameters allow them.
pub fn random_epistemic_formula<R: Rng>(rng: &mut R, model: &Cegm, params: &FormulaParams) -> Formula {
    loop {
        let f = random_formula(rng, model, params);
        if !(params.knowledge || params.hartley) || f.has_hartley() || f.has_knowledge() {
            return f;
        }
    }
}

fn gen<R: Rng>(rng: &mut R, model: &Cegm, p: &FormulaParams, depth: usize) -> Formula {
    let leaf = |rng: &mut R| match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::atom(model.props().choose(rng).expect("models carry propositions").clone()),
    };
    if depth == 0 {
        return leaf(rng);
    }
    let agents = model.agents();
    let mut kinds: Vec<u8> = vec![0, 1, 2, 3];
    if p.knowledge {
        kinds.extend([4, 4, 5]);
    }
    if p.hartley {
        kinds.extend([6, 6, 6]);
    }
    if p.strategic {
        kinds.extend([7, 8, 9, 10, 11]);
    }
    let d = depth - 1;
    match *kinds.choose(rng).expect("non-empty") {
        0 => leaf(rng),
        1 => Formula::not(gen(rng, model, p, d)),
        2 => Formula::and(gen(rng, model, p, d), gen(rng, model, p, d)),
        3 => Formula::or(gen(rng, model, p, d), gen(rng, model, p, d)),
        4 => Formula::knows(agents.choose(rng).expect("agents").clone(), gen(rng, model, p, d)),
        5 => Formula::mutual_knows(random_coalition(rng, agents, p.max_coalition), gen(rng, model, p, d)),
        6 => {
            let size = rng.gen_range(1..=p.max_beta.max(1));
            let mut beta: Vec<Formula> = Vec::with_capacity(size);
            let mut tries = 0;
            while beta.len() < size && tries < 20 {
                let f = gen(rng, model, p, d);
                if !beta.contains(&f) {
                    beta.push(f);
                }
                tries += 1;
            }
            let cmp = *Cmp::ALL.choose(rng).expect("non-empty");
            Formula::hartley(agents.choose(rng).expect("agents").clone(), cmp, random_threshold(rng), beta)
                .expect("β is non-empty and duplicate-free")
        }
        7 => Formula::next(random_coalition(rng, agents, p.max_coalition), gen(rng, model, p, d)),
        8 => Formula::always(random_coalition(rng, agents, p.max_coalition), gen(rng, model, p, d)),
        9 => Formula::until(
            random_coalition(rng, agents, p.max_coalition),
            gen(rng, model, p, d),
            gen(rng, model, p, d),
        ),
        10 => Formula::eventually(random_coalition(rng, agents, p.max_coalition), gen(rng, model, p, d)),
        _ => Formula::eventually_always(
            random_coalition(rng, agents, p.max_coalition),
            gen(rng, model, p, d),
            gen(rng, model, p, d),
        ),
    }
}
