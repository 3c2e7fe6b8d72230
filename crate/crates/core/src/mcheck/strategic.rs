use rayon::prelude::*;

use crate::cegm::{Cegm, StateSet};

use super::strategy::{Strategy, StrategySpace};
use super::{CheckError, CheckOptions, SuccessScope};

/// Path condition of a strategic operator over already labeled arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemporalGoal {
    Next(StateSet),
    Always(StateSet),
    Until { hold: StateSet, target: StateSet },
    /// Reach a `reach` state from which every reachable state satisfies `stay`.
    EventuallyAlways { reach: StateSet, stay: StateSet },
}

impl TemporalGoal {
    /// Winning region given a controllable predecessor operator.
    fn solve(&self, pre: impl Fn(&StateSet) -> StateSet) -> StateSet {
        match self {
            TemporalGoal::Next(target) => pre(target),
            TemporalGoal::Always(target) => greatest(target, &pre),
            TemporalGoal::Until { hold, target } => least(target, Some(hold), &pre),
            TemporalGoal::EventuallyAlways { reach, stay } => {
                let safe = greatest(stay, &pre);
                least(&reach.intersection(&safe), None, &pre)
            }
        }
    }
}

// νZ. base ∩ pre(Z)
fn greatest(base: &StateSet, pre: &impl Fn(&StateSet) -> StateSet) -> StateSet {
    let mut z = base.clone();
    loop {
        let next = base.intersection(&pre(&z));
        if next == z {
            return z;
        }
        z = next;
    }
}

// μZ. target ∪ (hold ∩ pre(Z)); `None` means hold = everything.
fn least(
    target: &StateSet,
    hold: Option<&StateSet>,
    pre: &impl Fn(&StateSet) -> StateSet,
) -> StateSet {
    let mut z = target.clone();
    loop {
        let mut step = pre(&z);
        if let Some(h) = hold {
            step.intersect_with(h);
        }
        step.union_with(target);
        if step == z {
            return z;
        }
        z = step;
    }
}

/// Successor sets for every joint choice of a coalition at every state.
pub(crate) struct SuccTable {
    coalition: Vec<usize>,
    rows: Vec<Vec<StateSet>>,
}

impl SuccTable {
    pub(crate) fn new(model: &Cegm, coalition: &[usize]) -> Self {
        let n_agents = model.num_agents();
        let rows = (0..model.num_states())
            .map(|q| {
                let radices: Vec<usize> = coalition.iter().map(|&a| model.avail(a, q).len()).collect();
                let total: usize = radices.iter().product();
                (0..total)
                    .map(|joint| {
                        let mut fixed = vec![None; n_agents];
                        let mut rest = joint;
                        for (i, &agent) in coalition.iter().enumerate().rev() {
                            fixed[agent] = Some(model.avail(agent, q)[rest % radices[i]]);
                            rest /= radices[i];
                        }
                        model.successors_fixed(q, &fixed)
                    })
                    .collect()
            })
            .collect();
        SuccTable {
            coalition: coalition.to_vec(),
            rows,
        }
    }

    fn joint_of(&self, model: &Cegm, strategy: &Strategy, q: usize) -> usize {
        let mut joint = 0;
        for &agent in &self.coalition {
            let avail = model.avail(agent, q);
            let act = strategy.action(agent, q).expect("coalition member");
            let pos = avail.iter().position(|&x| x == act).expect("strategy plays available actions");
            joint = joint * avail.len() + pos;
        }
        joint
    }

    fn strategy_from_joints(&self, model: &Cegm, joints: &[usize]) -> Strategy {
        let mut actions = vec![vec![0; model.num_states()]; self.coalition.len()];
        for (q, &joint) in joints.iter().enumerate() {
            let mut rest = joint;
            for (i, &agent) in self.coalition.iter().enumerate().rev() {
                let avail = model.avail(agent, q);
                actions[i][q] = avail[rest % avail.len()];
                rest /= avail.len();
            }
        }
        Strategy::new(self.coalition.clone(), actions)
    }

    /// `{q | succ_s(q) ⊆ z}` for a fixed strategy given as joint choices.
    fn ax(&self, joints: &[usize], z: &StateSet) -> StateSet {
        let mut out = StateSet::empty(z.universe());
        for (q, &j) in joints.iter().enumerate() {
            if self.rows[q][j].is_subset(z) {
                out.insert(q);
            }
        }
        out
    }

    /// `{q | some joint choice keeps every successor in z}`.
    fn cpre(&self, z: &StateSet) -> StateSet {
        let mut out = StateSet::empty(z.universe());
        for (q, row) in self.rows.iter().enumerate() {
            if row.iter().any(|s| s.is_subset(z)) {
                out.insert(q);
            }
        }
        out
    }

    fn first_choice_into(&self, q: usize, z: &StateSet) -> Option<usize> {
        self.rows[q].iter().position(|s| s.is_subset(z))
    }
}

/// Evaluation context shared by the strategic operators of one labeling run.
pub(crate) struct Engine<'m> {
    pub(crate) model: &'m Cegm,
    pub(crate) opts: &'m CheckOptions,
    pub(crate) pool: Option<rayon::ThreadPool>,
}

struct Prepared {
    space: StrategySpace,
    table: SuccTable,
    starts: Vec<StateSet>,
    count: u128,
}

impl<'m> Engine<'m> {
    pub(crate) fn new(model: &'m Cegm, opts: &'m CheckOptions) -> Result<Self, CheckError> {
        let pool = if opts.threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.threads)
                    .build()
                    .map_err(|e| CheckError::ThreadPool(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Engine { model, opts, pool })
    }

    fn prepare(&self, coalition: &[usize]) -> Prepared {
        let space = StrategySpace::new(self.model, coalition, self.opts.strategy_mode);
        let table = SuccTable::new(self.model, space.coalition());
        let n = self.model.num_states();
        let starts = (0..n)
            .map(|q| {
                let mut s = StateSet::singleton(n, q);
                if self.opts.success_scope == SuccessScope::Subjective {
                    for &a in space.coalition() {
                        s.union_with(self.model.class(a, q));
                    }
                }
                s
            })
            .collect();
        let count = space.count().unwrap_or(u128::MAX);
        Prepared {
            space,
            table,
            starts,
            count,
        }
    }

    fn uses_game_solver(&self, p: &Prepared, goal: &TemporalGoal) -> bool {
        !self.opts.force_enumeration
            && p.space.is_unconstrained()
            && !matches!(goal, TemporalGoal::EventuallyAlways { .. })
    }

    fn check_cap(&self, p: &Prepared) -> Result<(), CheckError> {
        if p.space.count().is_none() || p.count > self.opts.strategy_cap {
            return Err(CheckError::StrategySpaceTooLarge {
                coalition: p
                    .space
                    .coalition()
                    .iter()
                    .map(|&a| self.model.agents()[a].clone())
                    .collect(),
                count: p.space.count(),
                cap: self.opts.strategy_cap,
            });
        }
        Ok(())
    }

    // States whose start set lies inside the winning region.
    fn satisfied(p: &Prepared, win: &StateSet) -> StateSet {
        let mut out = StateSet::empty(win.universe());
        for (q, start) in p.starts.iter().enumerate() {
            if start.is_subset(win) {
                out.insert(q);
            }
        }
        out
    }

    fn region_for(&self, p: &Prepared, index: u128, goal: &TemporalGoal) -> (Strategy, StateSet) {
        let s = p.space.decode(index);
        let joints: Vec<usize> = (0..self.model.num_states())
            .map(|q| p.table.joint_of(self.model, &s, q))
            .collect();
        let win = goal.solve(|z| p.table.ax(&joints, z));
        let sat = Self::satisfied(p, &win);
        (s, sat)
    }

    /// States where the coalition has a strategy achieving `goal`.
    pub(crate) fn label(&self, coalition: &[usize], goal: &TemporalGoal) -> Result<StateSet, CheckError> {
        let p = self.prepare(coalition);
        if self.uses_game_solver(&p, goal) {
            let win = goal.solve(|z| p.table.cpre(z));
            return Ok(Self::satisfied(&p, &win));
        }
        self.check_cap(&p)?;
        let n = self.model.num_states();
        match &self.pool {
            Some(pool) if p.count > 1 => {
                let count = p.count as u64;
                Ok(pool.install(|| {
                    (0..count)
                        .into_par_iter()
                        .map(|i| self.region_for(&p, i as u128, goal).1)
                        .reduce(|| StateSet::empty(n), |a, b| a.union(&b))
                }))
            }
            _ => {
                let mut out = StateSet::empty(n);
                for i in 0..p.count {
                    out.union_with(&self.region_for(&p, i, goal).1);
                    if out.is_full() {
                        break;
                    }
                }
                Ok(out)
            }
        }
    }

    /// A strategy witnessing `goal` from `state`, if one exists.
    pub(crate) fn witness(
        &self,
        coalition: &[usize],
        goal: &TemporalGoal,
        state: usize,
    ) -> Result<Option<Strategy>, CheckError> {
        let p = self.prepare(coalition);
        if self.uses_game_solver(&p, goal) {
            let joints = self.positional_choice(&p, goal);
            let s = p.table.strategy_from_joints(self.model, &joints);
            let win = goal.solve(|z| p.table.ax(&joints, z));
            return Ok(Self::satisfied(&p, &win).contains(state).then_some(s));
        }
        self.check_cap(&p)?;
        let found = match &self.pool {
            Some(pool) if p.count > 1 => {
                let count = p.count as u64;
                pool.install(|| {
                    (0..count)
                        .into_par_iter()
                        .map(|i| self.region_for(&p, i as u128, goal))
                        .find_first(|(_, sat)| sat.contains(state))
                        .map(|(s, _)| s)
                })
            }
            _ => (0..p.count)
                .map(|i| self.region_for(&p, i, goal))
                .find(|(_, sat)| sat.contains(state))
                .map(|(s, _)| s),
        };
        Ok(found)
    }

    // Positional strategy that wins from the whole game-solver region.
    fn positional_choice(&self, p: &Prepared, goal: &TemporalGoal) -> Vec<usize> {
        let n = self.model.num_states();
        let mut joints = vec![0usize; n];
        let cpre = |z: &StateSet| p.table.cpre(z);
        match goal {
            TemporalGoal::Next(target) => {
                for (q, j) in joints.iter_mut().enumerate() {
                    *j = p.table.first_choice_into(q, target).unwrap_or(0);
                }
            }
            TemporalGoal::Always(target) => {
                let win = greatest(target, &cpre);
                for (q, j) in joints.iter_mut().enumerate() {
                    *j = p.table.first_choice_into(q, &win).unwrap_or(0);
                }
            }
            TemporalGoal::Until { hold, target } => {
                // Attractor layers: a state entering at layer k+1 moves into layer k.
                let mut z = target.clone();
                loop {
                    let mut step = cpre(&z);
                    step.intersect_with(hold);
                    step.union_with(target);
                    let mut fresh = step.clone();
                    fresh.difference_with(&z);
                    if fresh.is_empty() {
                        break;
                    }
                    for q in fresh.iter() {
                        joints[q] = p.table.first_choice_into(q, &z).unwrap_or(0);
                    }
                    z = step;
                }
            }
            TemporalGoal::EventuallyAlways { .. } => unreachable!("solved by enumeration"),
        }
        joints
    }
}
