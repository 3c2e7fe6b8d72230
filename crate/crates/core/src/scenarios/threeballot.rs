use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::cegm::{Cegm, CegmBuilder};
use crate::formula::{Cmp, Coalition, Formula, Threshold};
use crate::mcheck::{check, CheckError, CheckOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    Blank,
    Filled,
}

impl Mark {
    fn filled(self) -> bool {
        self == Mark::Filled
    }
}

/// One column of the ThreeBallot card: a mark in the row of each issue.
/// Ordered `BB < FB < BF < FF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ballot {
    pub a: Mark,
    pub b: Mark,
}

impl Ballot {
    pub const ALL: [Ballot; 4] = [
        Ballot { a: Mark::Blank, b: Mark::Blank },
        Ballot { a: Mark::Filled, b: Mark::Blank },
        Ballot { a: Mark::Blank, b: Mark::Filled },
        Ballot { a: Mark::Filled, b: Mark::Filled },
    ];

    fn index(self) -> u8 {
        self.a.filled() as u8 + 2 * self.b.filled() as u8
    }
}

impl PartialOrd for Ballot {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ballot {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |m: Mark| if m.filled() { 'F' } else { 'B' };
        write!(f, "{}{}", c(self.a), c(self.b))
    }
}

/// The three ballots cast by one voter, kept sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallotSet([Ballot; 3]);

impl BallotSet {
    pub fn new(mut ballots: [Ballot; 3]) -> Self {
        ballots.sort();
        BallotSet(ballots)
    }

    pub fn ballots(&self) -> &[Ballot; 3] {
        &self.0
    }

    /// The vote these ballots encode, if the marks per issue are 1 or 2.
    pub fn vote(&self) -> Option<Vote> {
        let count = |m: fn(&Ballot) -> Mark| self.0.iter().filter(|b| m(b).filled()).count();
        let decode = |n| match n {
            2 => Some(true),
            1 => Some(false),
            _ => None,
        };
        Some(Vote {
            for_a: decode(count(|b| b.a))?,
            for_b: decode(count(|b| b.b))?,
        })
    }

    /// Ballots that can be copied as the receipt, without repetition.
    pub fn receipts(&self) -> Vec<Ballot> {
        let mut r = self.0.to_vec();
        r.dedup();
        r
    }

    fn distinct(&self) -> usize {
        self.receipts().len()
    }

    fn code(&self) -> String {
        self.0.iter().map(Ballot::to_string).collect()
    }
}

impl fmt::Display for BallotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// A vote on the two issues. Ordered `ĀB̄ < AB̄ < ĀB < AB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vote {
    pub for_a: bool,
    pub for_b: bool,
}

impl Vote {
    pub const ALL: [Vote; 4] = [
        Vote { for_a: false, for_b: false },
        Vote { for_a: true, for_b: false },
        Vote { for_a: false, for_b: true },
        Vote { for_a: true, for_b: true },
    ];

    fn index(self) -> u8 {
        self.for_a as u8 + 2 * self.for_b as u8
    }

    /// ASCII name used in propositions, actions and CSV: `AB`, `AnB`, `nAB`,
    /// `nAnB`.
    pub fn code(self) -> &'static str {
        match (self.for_a, self.for_b) {
            (true, true) => "AB",
            (true, false) => "AnB",
            (false, true) => "nAB",
            (false, false) => "nAnB",
        }
    }

    pub fn from_code(code: &str) -> Option<Vote> {
        Vote::ALL.into_iter().find(|v| v.code() == code)
    }

    /// `V1_eq_<code>`.
    pub fn prop(self) -> String {
        format!("V1_eq_{}", self.code())
    }
}

impl PartialOrd for Vote {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Vote {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bar = |on: bool| if on { "" } else { "\u{305}" };
        write!(f, "A{}B{}", bar(self.for_a), bar(self.for_b))
    }
}

/// Ballot sets encoding `vote`; those with three distinct ballots first.
pub fn ballot_sets(vote: Vote) -> Vec<BallotSet> {
    let mut out = BTreeSet::new();
    for x in Ballot::ALL {
        for y in Ballot::ALL {
            for z in Ballot::ALL {
                let s = BallotSet::new([x, y, z]);
                if s.vote() == Some(vote) {
                    out.insert(s);
                }
            }
        }
    }
    let mut out: Vec<BallotSet> = out.into_iter().collect();
    out.sort_by_key(|s| (std::cmp::Reverse(s.distinct()), *s));
    out
}

/// One complete run: the voter's vote, ballots and receipt, then the other
/// voter's vote and ballots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThreeBallotWorld {
    pub vote1: Vote,
    pub ballots1: BallotSet,
    pub receipt: Ballot,
    pub vote2: Vote,
    pub ballots2: BallotSet,
}

impl ThreeBallotWorld {
    /// The published bulletin board: all six ballots, unlinked and sorted.
    pub fn board(&self) -> [Ballot; 6] {
        let mut b = [Ballot::ALL[0]; 6];
        b[..3].copy_from_slice(self.ballots1.ballots());
        b[3..].copy_from_slice(self.ballots2.ballots());
        b.sort();
        b
    }

    /// What the coercer sees after the election.
    pub fn coercer_view(&self) -> (Ballot, [Ballot; 6]) {
        (self.receipt, self.board())
    }
}

/// `(vote, ballot set)` pairs in table order.
fn fillings() -> Vec<(Vote, BallotSet)> {
    Vote::ALL
        .into_iter()
        .flat_map(|v| ballot_sets(v).into_iter().map(move |s| (v, s)))
        .collect()
}

/// Every world, grouped by the voter's choices in table order.
pub fn threeballot_worlds() -> Vec<ThreeBallotWorld> {
    let fills = fillings();
    let mut out = Vec::new();
    for &(vote1, ballots1) in &fills {
        for receipt in ballots1.receipts() {
            for &(vote2, ballots2) in &fills {
                out.push(ThreeBallotWorld {
                    vote1,
                    ballots1,
                    receipt,
                    vote2,
                    ballots2,
                });
            }
        }
    }
    out
}

fn fill_name(v: Vote, s: &BallotSet) -> String {
    format!("{}_{}", v.code(), s.code())
}

/// Name of the terminal state reached in `w`.
pub fn terminal_name(w: &ThreeBallotWorld) -> String {
    format!(
        "t_{}_{}_{}",
        fill_name(w.vote1, &w.ballots1),
        w.receipt,
        fill_name(w.vote2, &w.ballots2)
    )
}

/// What the coercer can tell apart among the terminal states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoercerView {
    /// Same receipt and same bulletin board.
    #[default]
    ReceiptBoard,
    /// Nothing: every terminal looks the same.
    FullTerminal,
    /// Everything: every state is distinguished.
    Identity,
}

/// ThreeBallot election with the voter `v`, the coercer `c` and the other
/// voter `w`, in the default coercer view.
pub fn gen_threeballot() -> Cegm {
    gen_threeballot_with(CoercerView::ReceiptBoard)
}

/// From `init`, `v` fills its ballots (`fill_<vote>_<ballots>`), then keeps
/// one as receipt (`keep_<ballot>`), then `w` fills its own. Terminals are
/// absorbing and carry `Voted`, `V_A`, `V_B`, `V1_eq_<vote>` and `V1_eq_V2`.
pub fn gen_threeballot_with(view: CoercerView) -> Cegm {
    let fills = fillings();
    let fill_actions: Vec<String> = fills.iter().map(|(v, s)| format!("fill_{}", fill_name(*v, s))).collect();
    let mut b = CegmBuilder::new().agents(&["v", "c", "w"]);
    let mut v_actions = fill_actions.clone();
    v_actions.extend(Ballot::ALL.iter().map(|x| format!("keep_{x}")));
    v_actions.push("eps".into());
    let mut w_actions = fill_actions.clone();
    w_actions.push("eps".into());
    b.set_actions("v", &v_actions);
    b.set_actions("c", &["eps"]);
    b.set_actions("w", &w_actions);

    b.add_state("init");
    b.set_initial("init");
    b.set_avail("v", "init", &fill_actions);
    b.set_avail("w", "init", &["eps"]);
    let eps3 = ["eps", "eps", "eps"];
    let mut terminals: Vec<(String, ThreeBallotWorld)> = Vec::new();
    for (i, &(vote1, ballots1)) in fills.iter().enumerate() {
        let filled = format!("f_{}", fill_name(vote1, &ballots1));
        b.add_state(filled.clone());
        b.add_transition("init", &[fill_actions[i].as_str(), "eps", "eps"], &filled);
        let keeps: Vec<String> = ballots1.receipts().iter().map(|x| format!("keep_{x}")).collect();
        b.set_avail("v", &filled, &keeps);
        b.set_avail("w", &filled, &["eps"]);
        for receipt in ballots1.receipts() {
            let kept = format!("r_{}_{receipt}", fill_name(vote1, &ballots1));
            b.add_state(kept.clone());
            b.add_transition(&filled, &[format!("keep_{receipt}").as_str(), "eps", "eps"], &kept);
            b.set_avail("v", &kept, &["eps"]);
            b.set_avail("w", &kept, &fill_actions);
            for (j, &(vote2, ballots2)) in fills.iter().enumerate() {
                let w = ThreeBallotWorld {
                    vote1,
                    ballots1,
                    receipt,
                    vote2,
                    ballots2,
                };
                let t = terminal_name(&w);
                b.add_state(t.clone());
                b.add_transition(&kept, &["eps", "eps", fill_actions[j].as_str()], &t);
                b.set_avail("v", &t, &["eps"]);
                b.set_avail("w", &t, &["eps"]);
                b.add_transition(&t, &eps3, &t);
                terminals.push((t, w));
            }
        }
    }

    match view {
        CoercerView::ReceiptBoard => {
            let mut first: BTreeMap<(Ballot, [Ballot; 6]), &str> = BTreeMap::new();
            for (t, w) in &terminals {
                match first.get(&w.coercer_view()) {
                    Some(rep) => b.add_obs("c", rep, t),
                    None => {
                        first.insert(w.coercer_view(), t);
                    }
                }
            }
        }
        CoercerView::FullTerminal => {
            for (t, _) in &terminals[1..] {
                b.add_obs("c", &terminals[0].0, t);
            }
        }
        CoercerView::Identity => {}
    }

    let names = |keep: &dyn Fn(&ThreeBallotWorld) -> bool| -> Vec<&str> {
        terminals.iter().filter(|(_, w)| keep(w)).map(|(t, _)| t.as_str()).collect()
    };
    b.add_prop("Voted", &names(&|_| true));
    b.add_prop("V_A", &names(&|w| w.vote1.for_a));
    b.add_prop("V_B", &names(&|w| w.vote1.for_b));
    for v in Vote::ALL {
        b.add_prop(&v.prop(), &names(&|w| w.vote1 == v));
    }
    b.add_prop("V1_eq_V2", &names(&|w| w.vote1 == w.vote2));
    b.build().expect("ThreeBallot model is valid")
}

/// Coercer information sets reachable after the voter's choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfosetRow {
    pub vote: Vote,
    pub ballots: BallotSet,
    pub receipt: Ballot,
    /// Each set is the projection onto the voter's vote of the coercer's
    /// epistemic class at one terminal of this row.
    pub infosets: BTreeSet<BTreeSet<Vote>>,
}

impl InfosetRow {
    /// Information sets by size, then by content.
    pub fn sorted_infosets(&self) -> Vec<&BTreeSet<Vote>> {
        let mut v: Vec<&BTreeSet<Vote>> = self.infosets.iter().collect();
        v.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfosetTable {
    pub rows: Vec<InfosetRow>,
}

fn set_text(s: &BTreeSet<Vote>, code: bool) -> String {
    let items: Vec<String> = s
        .iter()
        .map(|v| if code { v.code().to_string() } else { v.to_string() })
        .collect();
    if code {
        items.join(" ")
    } else {
        format!("{{{}}}", items.join(", "))
    }
}

impl InfosetTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("vote,ballot_set,receipt,infoset\n");
        for r in &self.rows {
            let bs: Vec<String> = r.ballots.ballots().iter().map(Ballot::to_string).collect();
            for s in r.sorted_infosets() {
                let _ = writeln!(out, "{},{},{},{}", r.vote.code(), bs.join(" "), r.receipt, set_text(s, true));
            }
        }
        out
    }
}

impl fmt::Display for InfosetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Vote and ballot set (BS)       | Receipt | Possible information sets of the coercer")?;
        let mut prev: Option<(Vote, BallotSet)> = None;
        for r in &self.rows {
            let group = (r.vote, r.ballots);
            if prev != Some(group) {
                let rule = if prev.map(|p| p.0) != Some(r.vote) { "=" } else { "-" };
                writeln!(f, "{}", rule.repeat(100))?;
            }
            let head = if prev == Some(group) {
                String::new()
            } else {
                format!("Vote = {}, BS = {}", r.vote, r.ballots)
            };
            prev = Some(group);
            let sets: Vec<String> = r.sorted_infosets().into_iter().map(|s| set_text(s, false)).collect();
            // combining overlines take no column
            let pad = 30 - head.chars().filter(|&c| c != '\u{305}').count().min(30);
            writeln!(f, "{head}{} | {:<7} | {}", " ".repeat(pad), r.receipt.to_string(), sets.join(", "))?;
        }
        write!(f, "{}", "=".repeat(100))
    }
}

fn terminal_vote(model: &Cegm, state: usize) -> Vote {
    let has = |p: &str| model.prop_states(p).is_some_and(|s| s.contains(state));
    Vote {
        for_a: has("V_A"),
        for_b: has("V_B"),
    }
}

/// The coercer information table of a model built by
/// [`gen_threeballot_with`].
pub fn infosets_of(model: &Cegm) -> InfosetTable {
    let c = model.agent_index("c").expect("ThreeBallot model has a coercer");
    let fills = fillings();
    let mut rows = Vec::new();
    for &(vote, ballots) in &fills {
        for receipt in ballots.receipts() {
            let mut infosets = BTreeSet::new();
            for &(vote2, ballots2) in &fills {
                let w = ThreeBallotWorld {
                    vote1: vote,
                    ballots1: ballots,
                    receipt,
                    vote2,
                    ballots2,
                };
                let t = model.state_index(&terminal_name(&w)).expect("terminal of the model");
                infosets.insert(model.class(c, t).iter().map(|q| terminal_vote(model, q)).collect());
            }
            rows.push(InfosetRow {
                vote,
                ballots,
                receipt,
                infosets,
            });
        }
    }
    InfosetTable { rows }
}

/// The coercer information table of the default ThreeBallot model.
pub fn threeballot_infosets() -> InfosetTable {
    infosets_of(&gen_threeballot())
}

/// Which voter pairs the coercion properties quantify over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AntecedentReading {
    /// Only runs where the two voters voted differently count.
    #[default]
    VotesDiffer,
    /// The displayed implication taken literally: `V1_eq_V2 -> ..`.
    VotesEqual,
}

/// How the information-theoretic property is phrased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HartleyReading {
    /// No joint behaviour of the voter, the coercer and the other voter
    /// leaves the coercer below maximal uncertainty:
    /// `!<v, c, w> F (V1_eq_Vi & ante & !H[c] = log(4) {V_A, V_B})`.
    #[default]
    NoLeak,
    /// The displayed shape, mirroring the epistemic property:
    /// `!<v, c> F (V1_eq_Vi & (ante -> H[c] = log(4) {V_A, V_B}))`.
    Displayed,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoercionOptions {
    pub antecedent: AntecedentReading,
    pub hartley: HartleyReading,
    pub check: CheckOptions,
}

fn antecedent(reading: AntecedentReading) -> Formula {
    match reading {
        AntecedentReading::VotesDiffer => Formula::not(Formula::atom("V1_eq_V2")),
        AntecedentReading::VotesEqual => Formula::atom("V1_eq_V2"),
    }
}

fn implies(a: Formula, b: Formula) -> Formula {
    let lhs = match a {
        Formula::Not(x) => *x,
        other => Formula::not(other),
    };
    Formula::or(lhs, b)
}

/// `⋀_Vi !<v, c> F (V1_eq_Vi & (ante -> K[c] V1_eq_Vi))`.
pub fn coercion_epistemic_formula(reading: AntecedentReading) -> Formula {
    let vc = Coalition::new(&["v", "c"]);
    Formula::conjunction(Vote::ALL.map(|v| {
        let target = Formula::atom(v.prop());
        Formula::not(Formula::eventually(
            vc.clone(),
            Formula::and(target.clone(), implies(antecedent(reading), Formula::knows("c", target))),
        ))
    }))
}

/// The information-theoretic property with `H[c] = log(4) {V_A, V_B}`.
pub fn coercion_hartley_formula(hartley: HartleyReading, reading: AntecedentReading) -> Formula {
    let max = Formula::hartley(
        "c",
        Cmp::Eq,
        Threshold::LogOfCount(Vote::ALL.len() as u64),
        vec![Formula::atom("V_A"), Formula::atom("V_B")],
    )
    .expect("distinct members");
    Formula::conjunction(Vote::ALL.map(|v| {
        let target = Formula::atom(v.prop());
        let inner = match hartley {
            HartleyReading::NoLeak => (
                Coalition::new(&["v", "c", "w"]),
                Formula::conjunction([target, antecedent(reading), Formula::not(max.clone())]),
            ),
            HartleyReading::Displayed => (
                Coalition::new(&["v", "c"]),
                Formula::and(target, implies(antecedent(reading), max.clone())),
            ),
        };
        Formula::not(Formula::eventually(inner.0, inner.1))
    }))
}

/// Epistemic coercion resistance at the initial state.
pub fn coercion_epistemic(model: &Cegm, opts: &CoercionOptions) -> Result<bool, CheckError> {
    check(model, model.initial(), &coercion_epistemic_formula(opts.antecedent), &opts.check)
}

/// Information-theoretic coercion resistance at the initial state.
pub fn coercion_hartley(model: &Cegm, opts: &CoercionOptions) -> Result<bool, CheckError> {
    let f = coercion_hartley_formula(opts.hartley, opts.antecedent);
    check(model, model.initial(), &f, &opts.check)
}
