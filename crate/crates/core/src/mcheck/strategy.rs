use crate::cegm::{Cegm, StateSet};

use super::StrategyMode;

/// One choice a coalition member makes: a single action shared by `states`.
#[derive(Debug, Clone)]
pub struct DecisionPoint {
    pub agent: usize,
    pub states: StateSet,
    pub options: Vec<usize>,
}

/// Memoryless collective strategy: `actions[i][q]` is the action of the
/// `i`-th coalition member at state `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    coalition: Vec<usize>,
    actions: Vec<Vec<usize>>,
}

impl Strategy {
    pub(crate) fn new(coalition: Vec<usize>, actions: Vec<Vec<usize>>) -> Self {
        Strategy { coalition, actions }
    }

    /// Coalition members as agent indices, ascending.
    pub fn coalition(&self) -> &[usize] {
        &self.coalition
    }

    pub fn action(&self, agent: usize, state: usize) -> Option<usize> {
        let pos = self.coalition.iter().position(|&a| a == agent)?;
        Some(self.actions[pos][state])
    }

    /// Per-agent action vector at `state` with `None` for agents outside the coalition.
    pub fn fixed_at(&self, state: usize, num_agents: usize) -> Vec<Option<usize>> {
        let mut fixed = vec![None; num_agents];
        for (pos, &agent) in self.coalition.iter().enumerate() {
            fixed[agent] = Some(self.actions[pos][state]);
        }
        fixed
    }

    /// `(agent, state, action)` names for every state.
    pub fn describe(&self, model: &Cegm) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for (pos, &agent) in self.coalition.iter().enumerate() {
            for (q, &act) in self.actions[pos].iter().enumerate() {
                out.push((
                    model.agents()[agent].clone(),
                    model.states()[q].clone(),
                    model.actions(agent)[act].clone(),
                ));
            }
        }
        out
    }
}

/// All collective strategies of a coalition, indexed in mixed radix with the
/// last decision point varying fastest.
#[derive(Debug, Clone)]
pub struct StrategySpace {
    coalition: Vec<usize>,
    num_states: usize,
    points: Vec<DecisionPoint>,
    count: Option<u128>,
}

impl StrategySpace {
    /// Decision points follow agent order, then class (or state) order.
    pub fn new(model: &Cegm, coalition: &[usize], mode: StrategyMode) -> Self {
        let mut coalition = coalition.to_vec();
        coalition.sort_unstable();
        coalition.dedup();
        let n = model.num_states();
        let mut points = Vec::new();
        for &agent in &coalition {
            match mode {
                StrategyMode::Uniform => {
                    for block in model.classes(agent) {
                        let first = block.first().expect("blocks are non-empty");
                        points.push(DecisionPoint {
                            agent,
                            states: block.clone(),
                            options: model.avail(agent, first).to_vec(),
                        });
                    }
                }
                StrategyMode::NonUniform => {
                    for q in 0..n {
                        points.push(DecisionPoint {
                            agent,
                            states: StateSet::singleton(n, q),
                            options: model.avail(agent, q).to_vec(),
                        });
                    }
                }
            }
        }
        let count = points
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.options.len() as u128));
        StrategySpace {
            coalition,
            num_states: n,
            points,
            count,
        }
    }

    pub fn coalition(&self) -> &[usize] {
        &self.coalition
    }

    pub fn points(&self) -> &[DecisionPoint] {
        &self.points
    }

    /// Number of strategies, or `None` if it does not fit in 128 bits.
    pub fn count(&self) -> Option<u128> {
        self.count
    }

    /// True when every real choice concerns a single state, so that the
    /// uniformity constraint is vacuous.
    pub fn is_unconstrained(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.options.len() == 1 || p.states.count() == 1)
    }

    pub fn decode(&self, mut index: u128) -> Strategy {
        let mut actions = vec![vec![0usize; self.num_states]; self.coalition.len()];
        for point in self.points.iter().rev() {
            let radix = point.options.len() as u128;
            let choice = point.options[(index % radix) as usize];
            index /= radix;
            let pos = self
                .coalition
                .iter()
                .position(|&a| a == point.agent)
                .expect("point agent is a coalition member");
            for q in point.states.iter() {
                actions[pos][q] = choice;
            }
        }
        Strategy::new(self.coalition.clone(), actions)
    }

    /// Iterates over all strategies in index order.
    ///
    /// Panics if the space does not fit in 128 bits.
    pub fn iter(&self) -> impl Iterator<Item = Strategy> + '_ {
        let count = self.count.expect("strategy space overflows u128");
        (0..count).map(move |i| self.decode(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cegm::load_model;

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

    #[test]
    fn counts_follow_classes() {
        let m = load_model(FIG1).unwrap();
        let v = StrategySpace::new(&m, &[0], StrategyMode::Uniform);
        assert_eq!(v.count(), Some(3));
        let c = StrategySpace::new(&m, &[1], StrategyMode::Uniform);
        assert_eq!(c.count(), Some(1));
        let all: Vec<Strategy> = v.iter().collect();
        assert_eq!(all.len(), 3);
        let first_moves: Vec<usize> = all.iter().map(|s| s.action(0, 0).unwrap()).collect();
        assert_eq!(first_moves, vec![0, 1, 2]);
        assert!(all.iter().all(|s| s.action(0, 1) == Some(2)));
        assert_eq!(StrategySpace::new(&m, &[], StrategyMode::Uniform).count(), Some(1));
    }

    #[test]
    fn uniformity_ties_class_members() {
        let text = FIG1.replace("actions c: eps", "actions c: eps x").replace(
            "trans s1 (eps, eps) -> s1\ntrans s2 (eps, eps) -> s2",
            "trans s1 (eps, eps) -> s1\ntrans s1 (eps, x) -> s1\ntrans s2 (eps, eps) -> s2\ntrans s2 (eps, x) -> s2",
        );
        let text = text.replace("trans s0 (voteA, eps) -> s1", "trans s0 (voteA, eps) -> s1\ntrans s0 (voteA, x) -> s1\ntrans s0 (voteNA, x) -> s2\ntrans s0 (eps, x) -> s0");
        let m = load_model(&text).unwrap();
        let ir = StrategySpace::new(&m, &[1], StrategyMode::Uniform);
        assert_eq!(ir.count(), Some(4));
        assert!(!ir.is_unconstrained());
        for s in ir.iter() {
            assert_eq!(s.action(1, 1), s.action(1, 2));
        }
        let nonuniform = StrategySpace::new(&m, &[1], StrategyMode::NonUniform);
        assert_eq!(nonuniform.count(), Some(8));
        assert!(nonuniform.is_unconstrained());
    }
}
