//! Model families separating uncertainty from knowledge, the formula size
//! game, and a brute-force minimal epistemic formula search.

mod fsg;
mod mel;

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::cegm::{Cegm, CegmBuilder};
use crate::formula::{Cmp, Coalition, Decimal, Formula, Threshold};
use crate::mcheck::SuccessScope;
use crate::translate::{h_to_k, TranslateOptions};

pub use fsg::{fsg_min_win, Fsg, FsgMove, FsgNode, FsgTree};
pub use mel::{min_mel_formula, mel_holds};

pub const MAX_FAMILY_N: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuccinctError {
    #[error("n = {0} is outside 1..={MAX_FAMILY_N}")]
    NOutOfRange(usize),
    #[error("j = {j} is outside 1..={max}")]
    JOutOfRange { j: usize, max: usize },
    #[error("both sides of the game need at least one pointed model")]
    EmptySide,
    #[error("pointed model refers to state {state} of a model with {states} states")]
    BadState { state: usize, states: usize },
    #[error("{what} has {size} elements, above the cap of {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("formula size game needs models over the same agents")]
    AgentMismatch,
}

/// A model together with a distinguished state.
#[derive(Debug, Clone, Copy)]
pub struct PointedModel<'m> {
    pub model: &'m Cegm,
    pub state: usize,
}

impl<'m> PointedModel<'m> {
    pub fn new(model: &'m Cegm, state: usize) -> Self {
        PointedModel { model, state }
    }
}

fn family(n: usize, removed: Option<usize>) -> Cegm {
    let size = 1usize << n;
    let states: Vec<usize> = (0..size).filter(|&t| Some(t) != removed).collect();
    let names: Vec<String> = states.iter().map(|t| t.to_string()).collect();
    let mut b = CegmBuilder::new().agents(&["a"]);
    for s in &names {
        b.add_state(s.clone());
    }
    b.set_initial("0");
    b.set_actions("a", &["e"]);
    for s in &names {
        b.add_transition(s, &["e"], s);
    }
    for s in names.iter().skip(1) {
        b.add_obs("a", &names[0], s);
    }
    for i in 1..=n {
        let holds: Vec<&str> = states
            .iter()
            .zip(&names)
            .filter(|(t, _)| *t >> (i - 1) & 1 == 1)
            .map(|(_, name)| name.as_str())
            .collect();
        b.add_prop(&format!("p_{i}"), &holds);
    }
    b.build().expect("family models are valid")
}

/// `Mⁿ`: one agent who cannot tell apart the `2ⁿ` states `0..2ⁿ-1`; `p_i`
/// holds where bit `i-1` of the state number is set.
pub fn gen_mn(n: usize) -> Result<Cegm, SuccinctError> {
    if !(1..=MAX_FAMILY_N).contains(&n) {
        return Err(SuccinctError::NOutOfRange(n));
    }
    Ok(family(n, None))
}

/// `Nⁿⱼ`: `Mⁿ` without state `j`.
pub fn gen_nnj(n: usize, j: usize) -> Result<Cegm, SuccinctError> {
    if !(1..=MAX_FAMILY_N).contains(&n) {
        return Err(SuccinctError::NOutOfRange(n));
    }
    let max = (1usize << n) - 1;
    if !(1..=max).contains(&j) {
        return Err(SuccinctError::JOutOfRange { j, max });
    }
    Ok(family(n, Some(j)))
}

/// `φₙ = H[a] = n {p_1, .., p_n}`.
pub fn phi_n(n: usize) -> Formula {
    let beta = (1..=n).map(|i| Formula::atom(format!("p_{i}"))).collect();
    Formula::Hartley("a".into(), Cmp::Eq, Threshold::Real(Decimal::integer(n as u64)), beta)
}

/// Rewrites strategic operators into their meaning on models whose
/// transitions are all self-loops: the path never leaves the start state,
/// so `<A> X φ`, `<A> G φ` and `<A> (ψ U φ)` collapse to `φ` (objective
/// scope) or to `E[A] φ` (subjective scope, non-empty `A`), and
/// `<A> F (φ & G ψ)` to the same applied to `φ & ψ`.
pub fn collapse_reflexive(f: &Formula, scope: SuccessScope) -> Formula {
    let wrap = |c: &Coalition, g: Formula| match scope {
        SuccessScope::Subjective if !c.is_empty() => Formula::mutual_knows(c.clone(), g),
        _ => g,
    };
    let rec = |g: &Formula| collapse_reflexive(g, scope);
    match f {
        Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(g) => Formula::not(rec(g)),
        Formula::And(a, b) => Formula::and(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
        Formula::CoalX(c, g) | Formula::CoalG(c, g) => wrap(c, rec(g)),
        Formula::CoalU(c, _, g) => wrap(c, rec(g)),
        Formula::CoalFG(c, a, b) => wrap(c, Formula::and(rec(a), rec(b))),
        Formula::Knows(a, g) => Formula::knows(a.clone(), rec(g)),
        Formula::MutualKnows(c, g) => Formula::mutual_knows(c.clone(), rec(g)),
        Formula::Hartley(a, cmp, t, beta) => Formula::Hartley(a.clone(), *cmp, *t, beta.iter().map(rec).collect()),
    }
}

/// One row of the succinctness experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccinctnessRow {
    pub n: usize,
    pub len_phi_n: usize,
    /// `None` when the translation exceeded its cap.
    pub len_translated: Option<usize>,
    pub fsg_min: Option<usize>,
    pub mel_min: Option<usize>,
    pub wallclock_ms: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccinctnessConfig {
    pub n_max: usize,
    /// Run the formula size game for `n` up to this bound (0 disables it).
    pub fsg_up_to: usize,
    /// Run the minimal formula search for `n` up to this bound (0 disables it).
    pub mel_up_to: usize,
    pub fsg_kmax: usize,
    pub mel_size_cap: usize,
    pub translate: TranslateOptions,
}

impl Default for SuccinctnessConfig {
    fn default() -> Self {
        SuccinctnessConfig {
            n_max: 4,
            fsg_up_to: 0,
            mel_up_to: 0,
            fsg_kmax: 40,
            mel_size_cap: 40,
            translate: TranslateOptions::default(),
        }
    }
}

/// `(Aₙ, Bₙ)`: `{(Mⁿ, 0)}` against `{(Nⁿⱼ, 0) | 1 ≤ j < 2ⁿ}`.
pub fn separating_family(n: usize) -> Result<(Cegm, Vec<Cegm>), SuccinctError> {
    let m = gen_mn(n)?;
    let ns = (1..(1usize << n)).map(|j| gen_nnj(n, j)).collect::<Result<Vec<_>, _>>()?;
    Ok((m, ns))
}

pub fn run_succinctness(cfg: &SuccinctnessConfig) -> Result<Vec<SuccinctnessRow>, SuccinctError> {
    let mut rows = Vec::new();
    for n in 1..=cfg.n_max {
        let start = Instant::now();
        let phi = phi_n(n);
        let len_translated = h_to_k(&phi, &cfg.translate).ok().map(|g| g.length());
        let (mut fsg_min, mut mel_min) = (None, None);
        if n <= cfg.fsg_up_to || n <= cfg.mel_up_to {
            let (m, ns) = separating_family(n)?;
            let a = [PointedModel::new(&m, 0)];
            let b: Vec<PointedModel> = ns.iter().map(|x| PointedModel::new(x, 0)).collect();
            if n <= cfg.fsg_up_to {
                fsg_min = fsg_min_win(&a, &b, cfg.fsg_kmax)?;
            }
            if n <= cfg.mel_up_to {
                mel_min = min_mel_formula(&a, &b, cfg.mel_size_cap)?.map(|(_, size)| size);
            }
        }
        rows.push(SuccinctnessRow {
            n,
            len_phi_n: phi.length(),
            len_translated,
            fsg_min,
            mel_min,
            wallclock_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

pub const SUCCINCTNESS_HEADER: &str = "n,len_phi_n,len_translated,fsg_min,mel_min,wallclock_ms";

/// CSV with [`SUCCINCTNESS_HEADER`]; capped translations read `capped`,
/// skipped searches are empty.
pub fn succinctness_csv(rows: &[SuccinctnessRow]) -> String {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::new();
    let _ = writeln!(out, "{SUCCINCTNESS_HEADER}");
    for r in rows {
        let translated = r.len_translated.map(|x| x.to_string()).unwrap_or_else(|| "capped".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.len_phi_n,
            translated,
            opt(r.fsg_min),
            opt(r.mel_min),
            r.wallclock_ms
        );
    }
    out
}
