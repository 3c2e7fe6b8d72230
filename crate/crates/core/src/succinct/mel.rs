//! Smallest epistemic formula (atoms, `!`, `|`, `K`) separating two sets of
//! pointed models, by enumeration in order of size.
//!
//! Formulas are kept only if their truth vector over all states of the
//! involved models is new, so each size level holds one formula per
//! semantic class.

use crate::cegm::Cegm;
use crate::formula::Formula;

use super::{PointedModel, SuccinctError};

/// Cap on the number of states whose truth vectors are enumerated.
pub const MAX_FINGERPRINT_STATES: usize = 16;

#[derive(Debug, Clone, Copy)]
enum Node {
    Atom(usize),
    Not(usize),
    Or(usize, usize),
    Knows(usize, usize),
}

/// Truth of an epistemic formula at `state`, evaluated directly on the
/// model's partitions.
///
/// Panics on strategic or uncertainty operators.
pub fn mel_holds(model: &Cegm, state: usize, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => model.prop_states(p).is_some_and(|s| s.contains(state)),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !mel_holds(model, state, g),
        Formula::And(a, b) => mel_holds(model, state, a) && mel_holds(model, state, b),
        Formula::Or(a, b) => mel_holds(model, state, a) || mel_holds(model, state, b),
        Formula::Knows(a, g) => {
            let agent = model.agent_index(a).expect("agent of the model");
            model.class(agent, state).iter().all(|r| mel_holds(model, r, g))
        }
        Formula::MutualKnows(c, g) => c
            .iter()
            .all(|a| mel_holds(model, state, &Formula::knows(a, (**g).clone()))),
        other => panic!("not an epistemic formula: {other}"),
    }
}

/// Smallest formula true on `a` and false on `b`, with its size, if some
/// formula of size at most `size_cap` exists.
pub fn min_mel_formula(
    a: &[PointedModel],
    b: &[PointedModel],
    size_cap: usize,
) -> Result<Option<(Formula, usize)>, SuccinctError> {
    if a.is_empty() || b.is_empty() {
        return Err(SuccinctError::EmptySide);
    }
    let mut models: Vec<&Cegm> = Vec::new();
    for p in a.iter().chain(b) {
        if p.state >= p.model.num_states() {
            return Err(SuccinctError::BadState {
                state: p.state,
                states: p.model.num_states(),
            });
        }
        if !models.iter().any(|m| std::ptr::eq(*m, p.model)) {
            models.push(p.model);
        }
    }
    let offsets: Vec<usize> = models
        .iter()
        .scan(0, |acc, m| {
            let o = *acc;
            *acc += m.num_states();
            Some(o)
        })
        .collect();
    let total: usize = models.iter().map(|m| m.num_states()).sum();
    if total > MAX_FINGERPRINT_STATES {
        return Err(SuccinctError::CapExceeded {
            what: "fingerprint universe",
            size: total,
            cap: MAX_FINGERPRINT_STATES,
        });
    }
    let agents: Vec<String> = models[0].agents().to_vec();
    for m in &models {
        let mut x = m.agents().to_vec();
        let mut y = agents.clone();
        x.sort();
        y.sort();
        if x != y {
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
    let index_of = |p: &PointedModel| {
        let mi = models.iter().position(|m| std::ptr::eq(*m, p.model)).expect("collected");
        offsets[mi] + p.state
    };
    let want: u64 = a.iter().fold(0, |acc, p| acc | 1 << index_of(p));
    let avoid: u64 = b.iter().fold(0, |acc, p| acc | 1 << index_of(p));
    if want & avoid != 0 {
        return Ok(None);
    }

    // class[agent][global state] as a mask
    let class: Vec<Vec<u64>> = agents
        .iter()
        .map(|name| {
            let mut v = vec![0u64; total];
            for (mi, m) in models.iter().enumerate() {
                let ag = m.agent_index(name).expect("agents checked");
                for q in 0..m.num_states() {
                    v[offsets[mi] + q] = m.class(ag, q).iter().fold(0, |acc, r| acc | 1 << (offsets[mi] + r));
                }
            }
            v
        })
        .collect();
    let atom_fp: Vec<u64> = props
        .iter()
        .map(|p| {
            let mut fp = 0u64;
            for (mi, m) in models.iter().enumerate() {
                if let Some(s) = m.prop_states(p) {
                    for q in s.iter() {
                        fp |= 1 << (offsets[mi] + q);
                    }
                }
            }
            fp
        })
        .collect();
    let full: u64 = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
    let knows = |agent: usize, fp: u64| -> u64 {
        (0..total)
            .filter(|&s| class[agent][s] & !fp == 0)
            .fold(0, |acc, s| acc | 1 << s)
    };

    let mut seen = vec![false; 1usize << total];
    let mut nodes: Vec<(u64, Node)> = Vec::new();
    // levels[k] = node ids of size k
    let mut levels: Vec<Vec<usize>> = vec![Vec::new()];
    let mut remaining = 1usize << total;

    for size in 1..=size_cap {
        let mut level: Vec<usize> = Vec::new();
        let mut push = |fp: u64, node: Node, nodes: &mut Vec<(u64, Node)>, level: &mut Vec<usize>| -> bool {
            let fp = fp & full;
            if seen[fp as usize] {
                return false;
            }
            seen[fp as usize] = true;
            remaining -= 1;
            nodes.push((fp, node));
            level.push(nodes.len() - 1);
            fp & want == want && fp & avoid == 0
        };
        let mut hit: Option<usize> = None;
        if size == 1 {
            for (p, &fp) in atom_fp.iter().enumerate() {
                if push(fp, Node::Atom(p), &mut nodes, &mut level) && hit.is_none() {
                    hit = Some(nodes.len() - 1);
                }
            }
        } else {
            let prev = levels[size - 1].clone();
            for &i in &prev {
                let fp = nodes[i].0;
                if push(!fp, Node::Not(i), &mut nodes, &mut level) && hit.is_none() {
                    hit = Some(nodes.len() - 1);
                }
                for ag in 0..agents.len() {
                    if push(knows(ag, fp), Node::Knows(ag, i), &mut nodes, &mut level) && hit.is_none() {
                        hit = Some(nodes.len() - 1);
                    }
                }
            }
            for left in 1..size - 1 {
                let right = size - 1 - left;
                if left > right {
                    break;
                }
                let (ls, rs) = (levels[left].clone(), levels[right].clone());
                for (x, &i) in ls.iter().enumerate() {
                    let start = if left == right { x } else { 0 };
                    for &j in &rs[start..] {
                        let fp = nodes[i].0 | nodes[j].0;
                        if push(fp, Node::Or(i, j), &mut nodes, &mut level) && hit.is_none() {
                            hit = Some(nodes.len() - 1);
                        }
                    }
                }
            }
        }
        if let Some(i) = hit {
            return Ok(Some((rebuild(&nodes, i, &props, &agents), size)));
        }
        levels.push(level);
        if remaining == 0 {
            break;
        }
    }
    Ok(None)
}

fn rebuild(nodes: &[(u64, Node)], i: usize, props: &[String], agents: &[String]) -> Formula {
    match nodes[i].1 {
        Node::Atom(p) => Formula::atom(props[p].clone()),
        Node::Not(j) => Formula::not(rebuild(nodes, j, props, agents)),
        Node::Or(j, k) => Formula::or(rebuild(nodes, j, props, agents), rebuild(nodes, k, props, agents)),
        Node::Knows(ag, j) => Formula::knows(agents[ag].clone(), rebuild(nodes, j, props, agents)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::succinct::{gen_mn, gen_nnj};

    #[test]
    fn atom_is_smallest_when_it_separates() {
        let m = gen_mn(1).unwrap();
        let (f, size) = min_mel_formula(&[PointedModel::new(&m, 1)], &[PointedModel::new(&m, 0)], 5)
            .unwrap()
            .unwrap();
        assert_eq!((f.to_string().as_str(), size), ("p_1", 1));
    }

    #[test]
    fn n1_needs_four_symbols() {
        let m = gen_mn(1).unwrap();
        let nm = gen_nnj(1, 1).unwrap();
        let (f, size) = min_mel_formula(&[PointedModel::new(&m, 0)], &[PointedModel::new(&nm, 0)], 10)
            .unwrap()
            .unwrap();
        assert_eq!(size, 4);
        assert_eq!(f.length(), 4);
        assert!(mel_holds(&m, 0, &f) && !mel_holds(&nm, 0, &f));
    }

    #[test]
    fn inseparable_sides_give_none() {
        let m = gen_mn(1).unwrap();
        let p = [PointedModel::new(&m, 0)];
        assert_eq!(min_mel_formula(&p, &p, 6).unwrap(), None);
    }
}
