//! Concurrent epistemic game models.
//!
//! A [`Cegm`] is an explicit-state concurrent game structure with one
//! indistinguishability partition per agent and a propositional valuation.
//! Agents, states, actions and propositions keep their declaration order, and
//! every iteration in this crate follows that order so runs are deterministic.

mod format;
mod stateset;

use std::collections::HashMap;

use thiserror::Error;

pub use format::{load_model, save_model};
pub use stateset::StateSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model declares no {0}")]
    Missing(&'static str),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("agent `{agent}` has no available action in state `{state}`")]
    EmptyAvailability { agent: String, state: String },
    #[error("missing transition from `{state}` for profile ({})", profile.join(", "))]
    MissingTransition { state: String, profile: Vec<String> },
    #[error("transition from `{state}` uses action `{action}` unavailable to agent `{agent}`")]
    UnavailableAction {
        state: String,
        agent: String,
        action: String,
    },
    #[error("transition from `{state}` for profile ({}) declared twice", profile.join(", "))]
    DuplicateTransition { state: String, profile: Vec<String> },
    #[error("profile from `{state}` has {got} actions, expected {expected}")]
    ProfileArity {
        state: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid epistemic declaration for agent `{agent}`: {message}")]
    InvalidObservation { agent: String, message: String },
    #[error(
        "non-uniform availability for agent `{agent}` on indistinguishable states {{{}}}",
        class.join(", ")
    )]
    NonUniformAvailability { agent: String, class: Vec<String> },
}

/// Validated concurrent epistemic game model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cegm {
    agents: Vec<String>,
    states: Vec<String>,
    initial: usize,
    actions: Vec<Vec<String>>,
    // [agent][state] -> sorted action indices
    avail: Vec<Vec<Vec<usize>>>,
    // [state][profile index] -> target; agent 0 is the most significant digit
    trans: Vec<Vec<usize>>,
    // [agent][state] -> block index into `classes[agent]`
    class_of: Vec<Vec<usize>>,
    classes: Vec<Vec<StateSet>>,
    props: Vec<String>,
    valuation: Vec<StateSet>,
    agent_index: HashMap<String, usize>,
    state_index: HashMap<String, usize>,
    prop_index: HashMap<String, usize>,
}

impl Cegm {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn actions(&self, agent: usize) -> &[String] {
        &self.actions[agent]
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agent_index.get(name).copied()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.prop_index.get(name).copied()
    }

    pub fn action_index(&self, agent: usize, name: &str) -> Option<usize> {
        self.actions[agent].iter().position(|a| a == name)
    }

    /// Actions available to `agent` at `state` (indices into [`Cegm::actions`]).
    pub fn avail(&self, agent: usize, state: usize) -> &[usize] {
        &self.avail[agent][state]
    }

    /// States where `prop` holds.
    pub fn valuation(&self, prop: usize) -> &StateSet {
        &self.valuation[prop]
    }

    pub fn prop_states(&self, name: &str) -> Option<&StateSet> {
        self.prop_index(name).map(|p| &self.valuation[p])
    }

    /// Epistemic class `[q]` of `agent` by indices.
    pub fn class(&self, agent: usize, state: usize) -> &StateSet {
        &self.classes[agent][self.class_of[agent][state]]
    }

    /// Block id of `state` in the partition of `agent`.
    pub fn class_id(&self, agent: usize, state: usize) -> usize {
        self.class_of[agent][state]
    }

    /// The blocks of `agent`'s partition, ordered by their first state.
    pub fn classes(&self, agent: usize) -> &[StateSet] {
        &self.classes[agent]
    }

    pub fn epistemic_class(&self, agent: &str, state: &str) -> Result<&StateSet, ModelError> {
        let a = self.agent_index(agent).ok_or_else(|| unknown("agent", agent))?;
        let q = self.state_index(state).ok_or_else(|| unknown("state", state))?;
        Ok(self.class(a, q))
    }

    /// Number of full action profiles at `state`.
    pub fn num_profiles(&self, state: usize) -> usize {
        self.trans[state].len()
    }

    /// Target of the profile with the given per-agent action indices.
    pub fn transition(&self, state: usize, profile: &[usize]) -> Option<usize> {
        let mut index = 0;
        for (agent, &action) in profile.iter().enumerate() {
            let avail = &self.avail[agent][state];
            let pos = avail.iter().position(|&x| x == action)?;
            index = index * avail.len() + pos;
        }
        Some(self.trans[state][index])
    }

    /// All successors of `state` when agents with `Some(action)` in `fixed`
    /// play that action and the rest play anything available.
    ///
    /// Panics if a fixed action is not available; use [`Cegm::successors`] for
    /// the checked variant.
    pub fn successors_fixed(&self, state: usize, fixed: &[Option<usize>]) -> StateSet {
        let n = self.agents.len();
        let mut choices: Vec<Vec<usize>> = Vec::with_capacity(n);
        for agent in 0..n {
            let avail = &self.avail[agent][state];
            match fixed.get(agent).copied().flatten() {
                Some(action) => {
                    let pos = avail
                        .iter()
                        .position(|&x| x == action)
                        .expect("fixed action must be available");
                    choices.push(vec![pos]);
                }
                None => choices.push((0..avail.len()).collect()),
            }
        }
        let mut out = StateSet::empty(self.num_states());
        let mut cursor = vec![0usize; n];
        loop {
            let mut index = 0;
            for agent in 0..n {
                index = index * self.avail[agent][state].len() + choices[agent][cursor[agent]];
            }
            out.insert(self.trans[state][index]);
            let mut agent = n;
            loop {
                if agent == 0 {
                    return out;
                }
                agent -= 1;
                cursor[agent] += 1;
                if cursor[agent] < choices[agent].len() {
                    break;
                }
                cursor[agent] = 0;
            }
        }
    }

    /// One-step successors of `state` under a partial assignment of actions.
    pub fn successors(&self, state: &str, partial: &[(&str, &str)]) -> Result<StateSet, ModelError> {
        let q = self.state_index(state).ok_or_else(|| unknown("state", state))?;
        let mut fixed = vec![None; self.agents.len()];
        for &(agent, action) in partial {
            let a = self.agent_index(agent).ok_or_else(|| unknown("agent", agent))?;
            let act = self
                .action_index(a, action)
                .ok_or_else(|| unknown("action", action))?;
            if !self.avail[a][q].contains(&act) {
                return Err(ModelError::UnavailableAction {
                    state: state.to_string(),
                    agent: agent.to_string(),
                    action: action.to_string(),
                });
            }
            fixed[a] = Some(act);
        }
        Ok(self.successors_fixed(q, &fixed))
    }

    /// Every full profile at `state` with its target, in canonical order.
    pub fn profiles(&self, state: usize) -> Vec<(Vec<usize>, usize)> {
        let n = self.agents.len();
        let radices: Vec<usize> = (0..n).map(|a| self.avail[a][state].len()).collect();
        let mut out = Vec::with_capacity(self.trans[state].len());
        for (index, &target) in self.trans[state].iter().enumerate() {
            let mut rest = index;
            let mut profile = vec![0; n];
            for agent in (0..n).rev() {
                profile[agent] = self.avail[agent][state][rest % radices[agent]];
                rest /= radices[agent];
            }
            out.push((profile, target));
        }
        out
    }

    pub fn state_names(&self, set: &StateSet) -> Vec<&str> {
        set.iter().map(|i| self.states[i].as_str()).collect()
    }
}

fn unknown(kind: &'static str, name: &str) -> ModelError {
    ModelError::Unknown {
        kind,
        name: name.to_string(),
    }
}

/// Name-based model builder shared by the file loader and the generators.
#[derive(Debug, Default, Clone)]
pub struct CegmBuilder {
    agents: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    actions: HashMap<String, Vec<String>>,
    avail: Vec<(String, String, Vec<String>)>,
    trans: Vec<(String, Vec<String>, String)>,
    obs: Vec<(String, String, String)>,
    props: Vec<(String, Vec<String>)>,
}

impl CegmBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn agents<S: AsRef<str>>(mut self, agents: &[S]) -> Self {
        self.agents = agents.iter().map(|s| s.as_ref().to_string()).collect();
        self
    }

    pub fn add_agent(&mut self, agent: &str) {
        self.agents.push(agent.to_string());
    }

    pub fn add_state(&mut self, state: impl Into<String>) {
        self.states.push(state.into());
    }

    pub fn set_initial(&mut self, state: impl Into<String>) {
        self.initial = Some(state.into());
    }

    pub fn set_actions<S: AsRef<str>>(&mut self, agent: &str, actions: &[S]) {
        self.actions.insert(
            agent.to_string(),
            actions.iter().map(|s| s.as_ref().to_string()).collect(),
        );
    }

    pub fn set_avail<S: AsRef<str>>(&mut self, agent: &str, state: &str, actions: &[S]) {
        self.avail.push((
            agent.to_string(),
            state.to_string(),
            actions.iter().map(|s| s.as_ref().to_string()).collect(),
        ));
    }

    pub fn add_transition<S: AsRef<str>>(&mut self, from: &str, profile: &[S], to: &str) {
        self.trans.push((
            from.to_string(),
            profile.iter().map(|s| s.as_ref().to_string()).collect(),
            to.to_string(),
        ));
    }

    /// Declares `s1 ~ s2` for `agent`; the relation is closed at build time.
    pub fn add_obs(&mut self, agent: &str, s1: &str, s2: &str) {
        self.obs
            .push((agent.to_string(), s1.to_string(), s2.to_string()));
    }

    pub fn add_prop<S: AsRef<str>>(&mut self, name: &str, states: &[S]) {
        self.props.push((
            name.to_string(),
            states.iter().map(|s| s.as_ref().to_string()).collect(),
        ));
    }

    pub fn build(self) -> Result<Cegm, ModelError> {
        if self.agents.is_empty() {
            return Err(ModelError::Missing("agents"));
        }
        if self.states.is_empty() {
            return Err(ModelError::Missing("states"));
        }
        let agent_index = index_of("agent", &self.agents)?;
        let state_index = index_of("state", &self.states)?;
        let n_states = self.states.len();
        let n_agents = self.agents.len();
        let state_of = |name: &str| state_index.get(name).copied().ok_or_else(|| unknown("state", name));
        let agent_of = |name: &str| agent_index.get(name).copied().ok_or_else(|| unknown("agent", name));

        let initial = match &self.initial {
            Some(s) => state_of(s)?,
            None => return Err(ModelError::Missing("initial state")),
        };

        for name in self.actions.keys() {
            agent_of(name)?;
        }
        let mut actions = Vec::with_capacity(n_agents);
        for agent in &self.agents {
            let list = self.actions.get(agent).ok_or_else(|| ModelError::Parse {
                line: 0,
                message: format!("no actions declared for agent `{agent}`"),
            })?;
            index_of("action", list)?;
            if list.is_empty() {
                return Err(ModelError::EmptyAvailability {
                    agent: agent.clone(),
                    state: self.states[0].clone(),
                });
            }
            actions.push(list.clone());
        }
        let action_of = |agent: usize, name: &str| {
            actions[agent]
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| unknown("action", name))
        };

        let mut avail: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n_states]; n_agents];
        for (agent, state, list) in &self.avail {
            let a = agent_of(agent)?;
            let q = state_of(state)?;
            if avail[a][q].is_some() {
                return Err(ModelError::Duplicate {
                    kind: "availability declaration",
                    name: format!("{agent} {state}"),
                });
            }
            if list.is_empty() {
                return Err(ModelError::EmptyAvailability {
                    agent: agent.clone(),
                    state: state.clone(),
                });
            }
            let mut idx = list
                .iter()
                .map(|act| action_of(a, act))
                .collect::<Result<Vec<_>, _>>()?;
            idx.sort_unstable();
            let before = idx.len();
            idx.dedup();
            if idx.len() != before {
                return Err(ModelError::Duplicate {
                    kind: "available action",
                    name: format!("{agent} {state}"),
                });
            }
            avail[a][q] = Some(idx);
        }
        let avail: Vec<Vec<Vec<usize>>> = avail
            .into_iter()
            .enumerate()
            .map(|(a, per_state)| {
                per_state
                    .into_iter()
                    .map(|x| x.unwrap_or_else(|| (0..actions[a].len()).collect()))
                    .collect()
            })
            .collect();

        let mut trans: Vec<Vec<Option<usize>>> = (0..n_states)
            .map(|q| vec![None; (0..n_agents).map(|a| avail[a][q].len()).product()])
            .collect();
        for (from, profile, to) in &self.trans {
            let q = state_of(from)?;
            let target = state_of(to)?;
            if profile.len() != n_agents {
                return Err(ModelError::ProfileArity {
                    state: from.clone(),
                    expected: n_agents,
                    got: profile.len(),
                });
            }
            let mut index = 0;
            for (a, act) in profile.iter().enumerate() {
                let act_idx = action_of(a, act)?;
                let pos = avail[a][q].iter().position(|&x| x == act_idx).ok_or_else(|| {
                    ModelError::UnavailableAction {
                        state: from.clone(),
                        agent: self.agents[a].clone(),
                        action: act.clone(),
                    }
                })?;
                index = index * avail[a][q].len() + pos;
            }
            if trans[q][index].is_some() {
                return Err(ModelError::DuplicateTransition {
                    state: from.clone(),
                    profile: profile.clone(),
                });
            }
            trans[q][index] = Some(target);
        }
        let mut full_trans = Vec::with_capacity(n_states);
        for (q, row) in trans.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (index, target) in row.into_iter().enumerate() {
                match target {
                    Some(t) => out.push(t),
                    None => {
                        let mut rest = index;
                        let mut profile = vec![String::new(); n_agents];
                        for a in (0..n_agents).rev() {
                            let len = avail[a][q].len();
                            profile[a] = actions[a][avail[a][q][rest % len]].clone();
                            rest /= len;
                        }
                        return Err(ModelError::MissingTransition {
                            state: self.states[q].clone(),
                            profile,
                        });
                    }
                }
            }
            full_trans.push(out);
        }

        // Union-find per agent closes the declared links.
        let mut parent: Vec<Vec<usize>> = vec![(0..n_states).collect(); n_agents];
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while p[root] != root {
                root = p[root];
            }
            let mut cur = x;
            while p[cur] != root {
                let next = p[cur];
                p[cur] = root;
                cur = next;
            }
            root
        }
        for (agent, s1, s2) in &self.obs {
            let a = agent_of(agent)?;
            let (x, y) = match (state_of(s1), state_of(s2)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    return Err(ModelError::InvalidObservation {
                        agent: agent.clone(),
                        message: e.to_string(),
                    })
                }
            };
            let (rx, ry) = (find(&mut parent[a], x), find(&mut parent[a], y));
            if rx != ry {
                let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
                parent[a][hi] = lo;
            }
        }
        let mut class_of = vec![vec![0; n_states]; n_agents];
        let mut classes = vec![Vec::new(); n_agents];
        for a in 0..n_agents {
            let mut block_of_root: HashMap<usize, usize> = HashMap::new();
            for q in 0..n_states {
                let root = find(&mut parent[a], q);
                let next = block_of_root.len();
                let block = *block_of_root.entry(root).or_insert(next);
                if block == classes[a].len() {
                    classes[a].push(StateSet::empty(n_states));
                }
                classes[a][block].insert(q);
                class_of[a][q] = block;
            }
            for block in &classes[a] {
                let mut members = block.iter();
                let first = members.next().expect("blocks are non-empty");
                if members.any(|q| avail[a][q] != avail[a][first]) {
                    return Err(ModelError::NonUniformAvailability {
                        agent: self.agents[a].clone(),
                        class: block.iter().map(|q| self.states[q].clone()).collect(),
                    });
                }
            }
        }

        let mut props = Vec::new();
        let mut valuation = Vec::new();
        let mut prop_index = HashMap::new();
        for (name, states) in &self.props {
            if prop_index.insert(name.clone(), props.len()).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "proposition",
                    name: name.clone(),
                });
            }
            let mut set = StateSet::empty(n_states);
            for s in states {
                set.insert(state_of(s)?);
            }
            props.push(name.clone());
            valuation.push(set);
        }

        Ok(Cegm {
            agents: self.agents,
            states: self.states,
            initial,
            actions,
            avail,
            trans: full_trans,
            class_of,
            classes,
            props,
            valuation,
            agent_index,
            state_index,
            prop_index,
        })
    }
}

fn index_of(kind: &'static str, names: &[String]) -> Result<HashMap<String, usize>, ModelError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if map.insert(name.clone(), i).is_some() {
            return Err(ModelError::Duplicate {
                kind,
                name: name.clone(),
            });
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_agent() -> CegmBuilder {
        let mut b = CegmBuilder::new().agents(&["x", "y"]);
        for s in ["a", "b"] {
            b.add_state(s);
        }
        b.set_initial("a");
        b.set_actions("x", &["l", "r"]);
        b.set_actions("y", &["u"]);
        b.add_transition("a", &["l", "u"], "a");
        b.add_transition("a", &["r", "u"], "b");
        b.add_transition("b", &["l", "u"], "b");
        b.add_transition("b", &["r", "u"], "a");
        b
    }

    #[test]
    fn successors_and_profiles() {
        let m = two_agent().build().unwrap();
        let all = m.successors("a", &[]).unwrap();
        assert_eq!(m.state_names(&all), vec!["a", "b"]);
        let only = m.successors("a", &[("x", "r")]).unwrap();
        assert_eq!(m.state_names(&only), vec!["b"]);
        let full = m.successors("a", &[("x", "l"), ("y", "u")]).unwrap();
        assert_eq!(full.count(), 1);
        assert_eq!(m.profiles(0).len(), 2);
        assert_eq!(m.transition(1, &[1, 0]), Some(0));
    }

    #[test]
    fn identity_relation_by_default() {
        let m = two_agent().build().unwrap();
        assert_eq!(m.state_names(m.epistemic_class("x", "a").unwrap()), vec!["a"]);
        assert_eq!(m.classes(1).len(), 2);
    }

    #[test]
    fn closure_of_links_is_transitive() {
        let mut b = CegmBuilder::new().agents(&["x"]);
        for s in ["s0", "s1", "s2", "s3"] {
            b.add_state(s);
        }
        b.set_initial("s0");
        b.set_actions("x", &["e"]);
        for s in ["s0", "s1", "s2", "s3"] {
            b.add_transition(s, &["e"], s);
        }
        b.add_obs("x", "s3", "s1");
        b.add_obs("x", "s1", "s2");
        let m = b.build().unwrap();
        assert_eq!(m.state_names(m.class(0, 2)), vec!["s1", "s2", "s3"]);
        assert_eq!(m.classes(0).len(), 2);
        assert_eq!(m.class_id(0, 0), 0);
    }

    #[test]
    fn rejects_missing_transition() {
        let mut b = two_agent();
        b.trans.pop();
        assert!(matches!(b.build(), Err(ModelError::MissingTransition { .. })));
    }

    #[test]
    fn rejects_unavailable_action_in_transition() {
        let mut b = two_agent();
        b.set_avail("x", "b", &["l"]);
        assert!(matches!(b.build(), Err(ModelError::UnavailableAction { .. })));
    }

    #[test]
    fn rejects_unavailable_partial() {
        let mut b = two_agent();
        b.trans.retain(|(from, p, _)| !(from == "b" && p[0] == "r"));
        b.set_avail("x", "b", &["l"]);
        let m = b.build().unwrap();
        assert!(matches!(
            m.successors("b", &[("x", "r")]),
            Err(ModelError::UnavailableAction { .. })
        ));
    }

    #[test]
    fn rejects_non_uniform_availability() {
        let mut b = two_agent();
        b.trans.retain(|(from, p, _)| !(from == "b" && p[0] == "r"));
        b.set_avail("x", "b", &["l"]);
        b.add_obs("x", "a", "b");
        match b.build() {
            Err(ModelError::NonUniformAvailability { agent, class }) => {
                assert_eq!(agent, "x");
                assert_eq!(class, vec!["a", "b"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        let mut b = two_agent();
        b.add_state("a");
        assert!(matches!(b.build(), Err(ModelError::Duplicate { .. })));
        let mut b = two_agent();
        b.add_prop("p", &["zz"]);
        assert!(matches!(b.build(), Err(ModelError::Unknown { .. })));
        let mut b = two_agent();
        b.add_obs("x", "a", "nowhere");
        assert!(matches!(b.build(), Err(ModelError::InvalidObservation { .. })));
    }
}
