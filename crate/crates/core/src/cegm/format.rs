//! Line-oriented text format for models.
//!
//! ```text
//! agents: v c
//! states: s0 s1 s2
//! init: s0
//! actions v: voteA voteNA eps
//! avail v s1: eps
//! trans s0 (voteA, eps) -> s1
//! obs c: s1 ~ s2
//! prop Voted: s1 s2
//! ```

use std::fmt::Write;

use super::{Cegm, CegmBuilder, ModelError};

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn tokens(line: usize, text: &str) -> Result<Vec<String>, ModelError> {
    text.split_whitespace()
        .map(|t| {
            if is_token(t) {
                Ok(t.to_string())
            } else {
                Err(parse_err(line, format!("invalid identifier `{t}`")))
            }
        })
        .collect()
}

/// Splits `head: rest` and returns the words of the head.
fn split_header(line: usize, text: &str) -> Result<(Vec<String>, String), ModelError> {
    let (head, rest) = text
        .split_once(':')
        .ok_or_else(|| parse_err(line, "expected `:`"))?;
    Ok((
        head.split_whitespace().map(str::to_string).collect(),
        rest.to_string(),
    ))
}

/// Parses and validates a model.
pub fn load_model(text: &str) -> Result<Cegm, ModelError> {
    let mut b = CegmBuilder::new();
    let mut seen_agents = false;
    let mut seen_states = false;
    let mut seen_init = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let keyword = content.split_whitespace().next().unwrap_or("");
        let keyword = keyword.trim_end_matches(':');
        match keyword {
            "agents" | "states" | "init" => {
                let (head, rest) = split_header(line, content)?;
                if head.len() != 1 {
                    return Err(parse_err(line, format!("malformed `{keyword}` line")));
                }
                let words = tokens(line, &rest)?;
                match keyword {
                    "agents" => {
                        if std::mem::replace(&mut seen_agents, true) {
                            return Err(parse_err(line, "`agents` declared twice"));
                        }
                        for a in &words {
                            b.add_agent(a);
                        }
                    }
                    "states" => {
                        if std::mem::replace(&mut seen_states, true) {
                            return Err(parse_err(line, "`states` declared twice"));
                        }
                        for s in words {
                            b.add_state(s);
                        }
                    }
                    _ => {
                        if std::mem::replace(&mut seen_init, true) {
                            return Err(parse_err(line, "`init` declared twice"));
                        }
                        match words.as_slice() {
                            [s] => b.set_initial(s.clone()),
                            _ => return Err(parse_err(line, "`init` takes exactly one state")),
                        }
                    }
                }
            }
            "actions" => {
                let (head, rest) = split_header(line, content)?;
                match head.as_slice() {
                    [_, agent] => {
                        if b.actions.contains_key(agent) {
                            return Err(parse_err(line, format!("actions for `{agent}` declared twice")));
                        }
                        b.set_actions(agent, &tokens(line, &rest)?)
                    }
                    _ => return Err(parse_err(line, "expected `actions <agent>: ...`")),
                }
            }
            "avail" => {
                let (head, rest) = split_header(line, content)?;
                match head.as_slice() {
                    [_, agent, state] => b.set_avail(agent, state, &tokens(line, &rest)?),
                    _ => return Err(parse_err(line, "expected `avail <agent> <state>: ...`")),
                }
            }
            "obs" => {
                let (head, rest) = split_header(line, content)?;
                let agent = match head.as_slice() {
                    [_, agent] => agent.clone(),
                    _ => return Err(parse_err(line, "expected `obs <agent>: s ~ t`")),
                };
                let parts: Vec<&str> = rest.split('~').map(str::trim).collect();
                if parts.len() != 2 || !parts.iter().all(|p| is_token(p)) {
                    return Err(parse_err(line, "expected `obs <agent>: s ~ t`"));
                }
                b.add_obs(&agent, parts[0], parts[1]);
            }
            "prop" => {
                let (head, rest) = split_header(line, content)?;
                match head.as_slice() {
                    [_, name] if is_token(name) => b.add_prop(name, &tokens(line, &rest)?),
                    _ => return Err(parse_err(line, "expected `prop <name>: ...`")),
                }
            }
            "trans" => {
                let body = content["trans".len()..].trim();
                let (lhs, target) = body
                    .split_once("->")
                    .ok_or_else(|| parse_err(line, "expected `->` in transition"))?;
                let target = target.trim();
                if !is_token(target) {
                    return Err(parse_err(line, format!("invalid target `{target}`")));
                }
                let open = lhs
                    .find('(')
                    .ok_or_else(|| parse_err(line, "expected `(` before the action profile"))?;
                let close = lhs
                    .rfind(')')
                    .filter(|&c| c > open && lhs[c + 1..].trim().is_empty())
                    .ok_or_else(|| parse_err(line, "expected `)` after the action profile"))?;
                let from = lhs[..open].trim();
                if !is_token(from) {
                    return Err(parse_err(line, format!("invalid source state `{from}`")));
                }
                let profile: Vec<String> = lhs[open + 1..close]
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .collect();
                if let Some(bad) = profile.iter().find(|p| !is_token(p)) {
                    return Err(parse_err(line, format!("invalid action `{bad}`")));
                }
                b.add_transition(from, &profile, target);
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    b.build()
}

/// Serializes a model in canonical order. `load_model(save_model(m)) == m`.
pub fn save_model(m: &Cegm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "agents: {}", m.agents.join(" "));
    let _ = writeln!(out, "states: {}", m.states.join(" "));
    let _ = writeln!(out, "init: {}", m.states[m.initial]);
    for (a, agent) in m.agents.iter().enumerate() {
        let _ = writeln!(out, "actions {agent}: {}", m.actions[a].join(" "));
    }
    for (a, agent) in m.agents.iter().enumerate() {
        for (q, state) in m.states.iter().enumerate() {
            let avail = &m.avail[a][q];
            if avail.len() != m.actions[a].len() {
                let names: Vec<&str> = avail.iter().map(|&x| m.actions[a][x].as_str()).collect();
                let _ = writeln!(out, "avail {agent} {state}: {}", names.join(" "));
            }
        }
    }
    for q in 0..m.num_states() {
        for (profile, target) in m.profiles(q) {
            let names: Vec<&str> = profile
                .iter()
                .enumerate()
                .map(|(a, &x)| m.actions[a][x].as_str())
                .collect();
            let _ = writeln!(
                out,
                "trans {} ({}) -> {}",
                m.states[q],
                names.join(", "),
                m.states[target]
            );
        }
    }
    for (a, agent) in m.agents.iter().enumerate() {
        for block in &m.classes[a] {
            let mut members = block.iter();
            let first = members.next().expect("blocks are non-empty");
            for other in members {
                let _ = writeln!(out, "obs {agent}: {} ~ {}", m.states[first], m.states[other]);
            }
        }
    }
    for (p, name) in m.props.iter().enumerate() {
        let states = m.state_names(&m.valuation[p]);
        if states.is_empty() {
            let _ = writeln!(out, "prop {name}:");
        } else {
            let _ = writeln!(out, "prop {name}: {}", states.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
# single-issue referendum
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
    fn loads_fig1() {
        let m = load_model(FIG1).unwrap();
        assert_eq!(m.num_states(), 3);
        assert_eq!(m.state_names(m.epistemic_class("c", "s1").unwrap()), vec!["s1", "s2"]);
        assert_eq!(m.state_names(m.epistemic_class("c", "s0").unwrap()), vec!["s0"]);
        assert_eq!(m.state_names(m.epistemic_class("v", "s1").unwrap()), vec!["s1"]);
        assert_eq!(m.state_names(m.prop_states("Voted").unwrap()), vec!["s1", "s2"]);
    }

    #[test]
    fn save_is_a_fixpoint() {
        let m = load_model(FIG1).unwrap();
        let text = save_model(&m);
        let again = load_model(&text).unwrap();
        assert_eq!(m, again);
        assert_eq!(text, save_model(&again));
    }

    #[test]
    fn missing_transition_is_reported() {
        let text = FIG1.replace("trans s0 (eps, eps) -> s0\n", "");
        let err = load_model(&text).unwrap_err();
        assert!(err.to_string().contains("missing transition"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "agents: v\nstates: s0\nbogus line\n";
        match load_model(text) {
            Err(ModelError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "agents: v\nstates: s0\ninit: s0\nactions v: e\ntrans s0 (e -> s0\n";
        assert!(matches!(load_model(text), Err(ModelError::Parse { line: 5, .. })));
    }

    #[test]
    fn empty_prop_round_trips() {
        let text = "agents: a\nstates: x\ninit: x\nactions a: e\ntrans x (e) -> x\nprop p:\n";
        let m = load_model(text).unwrap();
        assert!(m.prop_states("p").unwrap().is_empty());
        assert_eq!(load_model(&save_model(&m)).unwrap(), m);
    }
}
