//! Formula size game on sets of pointed epistemic models.
//!
//! A node `⟨C, D⟩` asks for a formula true on every pointed model of `C`
//! and false on every one of `D`. The spoiler closes a node with an atom,
//! swaps sides with a negation, splits `C` with a disjunction, or moves to
//! epistemic successors with `K[a]`. The fewest nodes of a winning tree equal
//! the size of the smallest separating formula.
//!
//! Pointed models are merged up to bisimulation first, since no epistemic
//! formula separates bisimilar ones. Sides are then bit masks over classes.

use std::collections::HashMap;

use crate::cegm::Cegm;
use crate::formula::Formula;

use super::{PointedModel, SuccinctError};

const MAX_CLASSES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FsgMove {
    Atomic(String),
    Not,
    Or,
    Knows(String),
}

/// Node of a winning tree. Sides list one representative `(model, state)`
/// per bisimulation class, with `model` indexing [`Fsg::models`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsgNode {
    pub left: Vec<(usize, usize)>,
    pub right: Vec<(usize, usize)>,
    pub played: FsgMove,
    pub children: Vec<FsgNode>,
}

impl FsgNode {
    /// Closed nodes are exactly the atomic leaves.
    pub fn is_closed(&self) -> bool {
        matches!(self.played, FsgMove::Atomic(_))
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(FsgNode::count).sum::<usize>()
    }

    pub fn formula(&self) -> Formula {
        match &self.played {
            FsgMove::Atomic(p) => Formula::atom(p.clone()),
            FsgMove::Not => Formula::not(self.children[0].formula()),
            FsgMove::Or => Formula::or(self.children[0].formula(), self.children[1].formula()),
            FsgMove::Knows(a) => Formula::knows(a.clone(), self.children[0].formula()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsgTree {
    pub root: FsgNode,
    pub nodes: usize,
}

impl FsgTree {
    /// The separating formula read off the tree; its length is `nodes`.
    pub fn formula(&self) -> Formula {
        self.root.formula()
    }
}

#[derive(Debug, Clone, Copy)]
enum Memo {
    Exact(u32),
    /// No winning tree with at most this many nodes.
    Above(u32),
}

pub struct Fsg<'m> {
    models: Vec<&'m Cegm>,
    reps: Vec<(usize, usize)>,
    props: Vec<String>,
    agents: Vec<String>,
    val: Vec<u64>,
    succ: Vec<Vec<u64>>,
    left: u64,
    right: u64,
    memo: HashMap<(u64, u64), Memo>,
}

impl<'m> Fsg<'m> {
    pub fn new(a: &[PointedModel<'m>], b: &[PointedModel<'m>]) -> Result<Self, SuccinctError> {
        if a.is_empty() || b.is_empty() {
            return Err(SuccinctError::EmptySide);
        }
        let mut models: Vec<&'m Cegm> = Vec::new();
        let mut model_of = |m: &'m Cegm| -> usize {
            match models.iter().position(|x| std::ptr::eq(*x, m)) {
                Some(i) => i,
                None => {
                    models.push(m);
                    models.len() - 1
                }
            }
        };
        let a_idx: Vec<(usize, usize)> = a.iter().map(|p| (model_of(p.model), p.state)).collect();
        let b_idx: Vec<(usize, usize)> = b.iter().map(|p| (model_of(p.model), p.state)).collect();
        for p in a.iter().chain(b) {
            if p.state >= p.model.num_states() {
                return Err(SuccinctError::BadState {
                    state: p.state,
                    states: p.model.num_states(),
                });
            }
        }
        let agents: Vec<String> = models[0].agents().to_vec();
        let mut sorted_agents = agents.clone();
        sorted_agents.sort();
        for m in &models {
            let mut other = m.agents().to_vec();
            other.sort();
            if other != sorted_agents {
                return Err(SuccinctError::AgentMismatch);
            }
        }
        let mut props: Vec<String> = Vec::new();
        for m in &models {
            for p in m.props() {
                if !props.contains(p) {
                    props.push(p.clone());
                }
            }
        }

        // Partition refinement over every state of every model.
        let nodes: Vec<(usize, usize)> = models
            .iter()
            .enumerate()
            .flat_map(|(mi, m)| (0..m.num_states()).map(move |q| (mi, q)))
            .collect();
        let offset: Vec<usize> = models
            .iter()
            .scan(0, |acc, m| {
                let o = *acc;
                *acc += m.num_states();
                Some(o)
            })
            .collect();
        let holds = |(mi, q): (usize, usize), p: &str| {
            models[mi].prop_states(p).is_some_and(|s| s.contains(q))
        };
        let mut id = assign_ids(nodes.iter().map(|&n| props.iter().map(|p| holds(n, p)).collect::<Vec<bool>>()));
        loop {
            let keys = nodes.iter().map(|&(mi, q)| {
                let m = models[mi];
                let mut key = vec![id[offset[mi] + q]];
                for name in &agents {
                    let a = m.agent_index(name).expect("agents checked");
                    let mut succ: Vec<usize> = m.class(a, q).iter().map(|r| id[offset[mi] + r]).collect();
                    succ.sort_unstable();
                    succ.dedup();
                    key.push(usize::MAX);
                    key.extend(succ);
                }
                key
            });
            let next = assign_ids(keys);
            let (before, after) = (count_ids(&id), count_ids(&next));
            id = next;
            if before == after {
                break;
            }
        }
        let classes = count_ids(&id);
        if classes > MAX_CLASSES {
            return Err(SuccinctError::CapExceeded {
                what: "bisimulation quotient",
                size: classes,
                cap: MAX_CLASSES,
            });
        }
        let mut reps = vec![(0, 0); classes];
        for (i, &n) in nodes.iter().enumerate().rev() {
            reps[id[i]] = n;
        }
        let val = props
            .iter()
            .map(|p| (0..classes).filter(|&c| holds(reps[c], p)).fold(0u64, |acc, c| acc | 1 << c))
            .collect();
        let succ = agents
            .iter()
            .map(|name| {
                (0..classes)
                    .map(|c| {
                        let (mi, q) = reps[c];
                        let m = models[mi];
                        let a = m.agent_index(name).expect("agents checked");
                        m.class(a, q).iter().fold(0u64, |acc, r| acc | 1 << id[offset[mi] + r])
                    })
                    .collect()
            })
            .collect();
        let mask = |side: &[(usize, usize)]| side.iter().fold(0u64, |acc, &(mi, q)| acc | 1 << id[offset[mi] + q]);
        Ok(Fsg {
            left: mask(&a_idx),
            right: mask(&b_idx),
            models,
            reps,
            props,
            agents,
            val,
            succ,
            memo: HashMap::new(),
        })
    }

    pub fn models(&self) -> &[&'m Cegm] {
        &self.models
    }

    /// Number of bisimulation classes among all states of all models.
    pub fn classes(&self) -> usize {
        self.reps.len()
    }

    /// Fewest nodes of a winning tree, if at most `kmax`.
    pub fn min_win(&mut self, kmax: usize) -> Option<usize> {
        let kmax = kmax.min(u32::MAX as usize) as u32;
        (1..=kmax)
            .find_map(|k| self.solve(self.left, self.right, k))
            .map(|c| c as usize)
    }

    /// A smallest winning tree, if one has at most `kmax` nodes.
    pub fn winning_tree(&mut self, kmax: usize) -> Option<FsgTree> {
        let cost = self.min_win(kmax)? as u32;
        let root = self.build(self.left, self.right, cost);
        let nodes = root.count();
        debug_assert_eq!(nodes, cost as usize);
        Some(FsgTree { root, nodes })
    }

    fn atom_for(&self, c: u64, d: u64) -> Option<usize> {
        self.val.iter().position(|&v| c & !v == 0 && d & v == 0)
    }

    fn splits(c: u64) -> impl Iterator<Item = (u64, u64)> {
        let low = c & c.wrapping_neg();
        let rest = c ^ low;
        let mut t = rest;
        let mut done = rest == 0;
        std::iter::from_fn(move || {
            while !done {
                let s1 = low | t;
                if t == 0 {
                    done = true;
                } else {
                    t = (t - 1) & rest;
                }
                if s1 != c {
                    return Some((s1, c & !s1));
                }
            }
            None
        })
    }

    /// Right sides reachable by a knows move: one successor class per
    /// distinct successor set, keeping only inclusion-minimal results.
    fn knows_targets(&self, agent: usize, d: u64) -> Vec<u64> {
        let mut groups: Vec<u64> = Vec::new();
        let mut rest = d;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            let s = self.succ[agent][i as usize];
            if !groups.contains(&s) {
                groups.push(s);
            }
        }
        let mut picks: Vec<u64> = vec![0];
        for g in groups {
            let mut next = Vec::with_capacity(picks.len() * g.count_ones() as usize);
            for &p in &picks {
                let mut bits = g;
                if p & g != 0 {
                    next.push(p);
                    continue;
                }
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    bits ^= b;
                    next.push(p | b);
                }
            }
            next.sort_unstable();
            next.dedup();
            picks = next;
        }
        let minimal: Vec<u64> = picks
            .iter()
            .copied()
            .filter(|&p| !picks.iter().any(|&o| o != p && o & !p == 0))
            .collect();
        minimal
    }

    fn successors(&self, agent: usize, c: u64) -> u64 {
        let mut out = 0;
        let mut rest = c;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            out |= self.succ[agent][i as usize];
        }
        out
    }

    /// Exact smallest winning tree size for `⟨c, d⟩` if it is at most `budget`.
    fn solve(&mut self, c: u64, d: u64, budget: u32) -> Option<u32> {
        if budget == 0 || c & d != 0 {
            return None;
        }
        match self.memo.get(&(c, d)) {
            Some(Memo::Exact(v)) => return (*v <= budget).then_some(*v),
            Some(Memo::Above(l)) if budget <= *l => return None,
            _ => {}
        }
        if self.atom_for(c, d).is_some() {
            self.memo.insert((c, d), Memo::Exact(1));
            return Some(1);
        }
        let mut best: Option<u32> = None;
        let mut limit = budget;
        if limit >= 2 {
            if let Some(r) = self.solve(d, c, limit - 1) {
                best = Some(r + 1);
                limit = r;
            }
        }
        if c.count_ones() >= 2 {
            for (s1, s2) in Self::splits(c) {
                if limit < 3 {
                    break;
                }
                if let Some(r1) = self.solve(s1, d, limit - 2) {
                    if let Some(r2) = self.solve(s2, d, limit - 1 - r1) {
                        let total = 1 + r1 + r2;
                        best = Some(total);
                        limit = total - 1;
                    }
                }
            }
        }
        for agent in 0..self.agents.len() {
            if limit < 2 {
                break;
            }
            let c2 = self.successors(agent, c);
            for d2 in self.knows_targets(agent, d) {
                if limit < 2 {
                    break;
                }
                if c2 & d2 != 0 {
                    continue;
                }
                if let Some(r) = self.solve(c2, d2, limit - 1) {
                    best = Some(r + 1);
                    limit = r;
                }
            }
        }
        let entry = match best {
            Some(v) => Memo::Exact(v),
            None => match self.memo.get(&(c, d)) {
                Some(Memo::Above(l)) => Memo::Above((*l).max(budget)),
                _ => Memo::Above(budget),
            },
        };
        self.memo.insert((c, d), entry);
        best
    }

    fn side(&self, mask: u64) -> Vec<(usize, usize)> {
        (0..self.reps.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.reps[i])
            .collect()
    }

    fn node(&self, c: u64, d: u64, played: FsgMove, children: Vec<FsgNode>) -> FsgNode {
        FsgNode {
            left: self.side(c),
            right: self.side(d),
            played,
            children,
        }
    }

    // Rebuilds a tree of exactly `cost` nodes for a node whose optimum is `cost`.
    fn build(&mut self, c: u64, d: u64, cost: u32) -> FsgNode {
        if let Some(p) = self.atom_for(c, d) {
            return self.node(c, d, FsgMove::Atomic(self.props[p].clone()), vec![]);
        }
        if cost >= 2 && self.solve(d, c, cost - 1) == Some(cost - 1) {
            let child = self.build(d, c, cost - 1);
            return self.node(c, d, FsgMove::Not, vec![child]);
        }
        if c.count_ones() >= 2 && cost >= 3 {
            for (s1, s2) in Self::splits(c) {
                if let Some(r1) = self.solve(s1, d, cost - 2) {
                    if self.solve(s2, d, cost - 1 - r1) == Some(cost - 1 - r1) {
                        let left = self.build(s1, d, r1);
                        let right = self.build(s2, d, cost - 1 - r1);
                        return self.node(c, d, FsgMove::Or, vec![left, right]);
                    }
                }
            }
        }
        for agent in 0..self.agents.len() {
            let c2 = self.successors(agent, c);
            for d2 in self.knows_targets(agent, d) {
                if c2 & d2 == 0 && self.solve(c2, d2, cost - 1) == Some(cost - 1) {
                    let child = self.build(c2, d2, cost - 1);
                    let name = self.agents[agent].clone();
                    return self.node(c, d, FsgMove::Knows(name), vec![child]);
                }
            }
        }
        unreachable!("node {c:#x}/{d:#x} has no move of cost {cost}")
    }
}

fn assign_ids<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut map: HashMap<K, usize> = HashMap::new();
    keys.map(|k| {
        let next = map.len();
        *map.entry(k).or_insert(next)
    })
    .collect()
}

fn count_ids(ids: &[usize]) -> usize {
    ids.iter().max().map_or(0, |m| m + 1)
}

/// Fewest moves the spoiler needs to separate `a` from `b`, if at most `kmax`.
pub fn fsg_min_win(a: &[PointedModel], b: &[PointedModel], kmax: usize) -> Result<Option<usize>, SuccinctError> {
    Ok(Fsg::new(a, b)?.min_win(kmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::succinct::{gen_mn, gen_nnj, mel_holds};

    #[test]
    fn atom_separates_in_one_move() {
        let m = gen_mn(1).unwrap();
        let a = [PointedModel::new(&m, 1)];
        let b = [PointedModel::new(&m, 0)];
        assert_eq!(fsg_min_win(&a, &b, 5).unwrap(), Some(1));
        assert_eq!(fsg_min_win(&b, &a, 5).unwrap(), Some(2));
    }

    #[test]
    fn bisimilar_sides_are_unwinnable() {
        let m = gen_mn(1).unwrap();
        let a = [PointedModel::new(&m, 0)];
        assert_eq!(fsg_min_win(&a, &a, 8).unwrap(), None);
    }

    #[test]
    fn n1_tree_matches_formula() {
        let m = gen_mn(1).unwrap();
        let nm = gen_nnj(1, 1).unwrap();
        let a = [PointedModel::new(&m, 0)];
        let b = [PointedModel::new(&nm, 0)];
        let mut game = Fsg::new(&a, &b).unwrap();
        let tree = game.winning_tree(10).unwrap();
        assert_eq!(tree.nodes, 4);
        let f = tree.formula();
        assert_eq!(f.length(), 4);
        assert!(mel_holds(&m, 0, &f));
        assert!(!mel_holds(&nm, 0, &f));
        assert!(!tree.root.is_closed());
    }

    #[test]
    fn splits_cover_every_two_block_partition() {
        let splits: Vec<(u64, u64)> = Fsg::splits(0b1011).collect();
        assert_eq!(splits.len(), 3);
        for (x, y) in &splits {
            assert_eq!(x | y, 0b1011);
            assert_eq!(x & y, 0);
            assert!(*x != 0 && *y != 0);
        }
        assert_eq!(Fsg::splits(0b100).count(), 0);
    }
}
