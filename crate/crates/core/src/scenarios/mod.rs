//! Case-study models: single and double referendums with a coercer, and a
//! two-voter ThreeBallot election.

mod threeballot;

use crate::cegm::{Cegm, CegmBuilder};
use crate::formula::{Cmp, Coalition, Decimal, Formula, Threshold};

pub use threeballot::{
    ballot_sets, coercion_epistemic, coercion_epistemic_formula, coercion_hartley,
    coercion_hartley_formula, gen_threeballot, gen_threeballot_with, terminal_name,
    infosets_of, threeballot_infosets, threeballot_worlds, AntecedentReading, Ballot, BallotSet, CoercerView,
    CoercionOptions, HartleyReading, InfosetRow, InfosetTable, Mark, ThreeBallotWorld, Vote,
};

/// Double-referendum variants: in `M1` the coercer can tell `{s1, s2}` from `{s3, s4}`,
/// in `M2` it cannot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoubleVariant {
    M1,
    M2,
}

/// One voter `v`, one passive coercer `c`, one issue: from `s0` the voter
/// votes for (`s1`) or against (`s2`) or waits. `c` cannot tell `s1` from
/// `s2`.
pub fn gen_referendum_single() -> Cegm {
    let mut b = CegmBuilder::new().agents(&["v", "c"]);
    for s in ["s0", "s1", "s2"] {
        b.add_state(s);
    }
    b.set_initial("s0");
    b.set_actions("v", &["voteA", "voteNA", "eps"]);
    b.set_actions("c", &["eps"]);
    b.set_avail("v", "s1", &["eps"]);
    b.set_avail("v", "s2", &["eps"]);
    b.add_transition("s0", &["voteA", "eps"], "s1");
    b.add_transition("s0", &["voteNA", "eps"], "s2");
    b.add_transition("s0", &["eps", "eps"], "s0");
    b.add_transition("s1", &["eps", "eps"], "s1");
    b.add_transition("s2", &["eps", "eps"], "s2");
    b.add_obs("c", "s1", "s2");
    b.add_prop("Voted", &["s1", "s2"]);
    b.add_prop("V_A", &["s1"]);
    b.build().expect("referendum model is valid")
}

/// Two issues on one ballot. `s1 = A B̄`, `s2 = Ā B`, `s3 = A B`,
/// `s4 = Ā B̄`.
pub fn gen_referendum_double(variant: DoubleVariant) -> Cegm {
    let mut b = CegmBuilder::new().agents(&["v", "c"]);
    for s in ["s0", "s1", "s2", "s3", "s4"] {
        b.add_state(s);
    }
    b.set_initial("s0");
    b.set_actions("v", &["voteANB", "voteNAB", "voteAB", "voteNANB", "eps"]);
    b.set_actions("c", &["eps"]);
    let targets = [("voteANB", "s1"), ("voteNAB", "s2"), ("voteAB", "s3"), ("voteNANB", "s4")];
    for (action, to) in targets {
        b.add_transition("s0", &[action, "eps"], to);
        b.set_avail("v", to, &["eps"]);
        b.add_transition(to, &["eps", "eps"], to);
    }
    b.add_transition("s0", &["eps", "eps"], "s0");
    b.add_obs("c", "s1", "s2");
    b.add_obs("c", "s3", "s4");
    if variant == DoubleVariant::M2 {
        b.add_obs("c", "s1", "s3");
    }
    b.add_prop("Voted", &["s1", "s2", "s3", "s4"]);
    b.add_prop("V_A", &["s1", "s3"]);
    b.add_prop("V_B", &["s2", "s3"]);
    b.build().expect("referendum model is valid")
}

fn unknown_to(coercer: &str, props: &[&str]) -> Formula {
    let known = props.iter().flat_map(|p| {
        [
            Formula::knows(coercer, Formula::atom(*p)),
            Formula::knows(coercer, Formula::not(Formula::atom(*p))),
        ]
    });
    Formula::not(Formula::disjunction(known))
}

fn literal(p: &str, positive: bool) -> Formula {
    if positive {
        Formula::atom(p)
    } else {
        Formula::not(Formula::atom(p))
    }
}

/// `<v> F (Voted & V_A & G !(K[c] V_A | K[c] !V_A)) & <v> F (Voted & !V_A & G ..)`.
pub fn referendum_single_formula() -> Formula {
    let v = Coalition::new(&["v"]);
    Formula::conjunction([true, false].map(|for_a| {
        Formula::eventually_always(
            v.clone(),
            Formula::and(Formula::atom("Voted"), literal("V_A", for_a)),
            unknown_to("c", &["V_A"]),
        )
    }))
}

/// The single-issue property extended to every combination of the two
/// votes: four conjuncts, each asking that `c` never knows either vote.
pub fn referendum_double_formula() -> Formula {
    let v = Coalition::new(&["v"]);
    let combos = [(true, true), (true, false), (false, true), (false, false)];
    Formula::conjunction(combos.map(|(a, b)| {
        Formula::eventually_always(
            v.clone(),
            Formula::conjunction([Formula::atom("Voted"), literal("V_A", a), literal("V_B", b)]),
            unknown_to("c", &["V_A", "V_B"]),
        )
    }))
}

/// `H[c] >= 2 {V_A, V_B}`.
pub fn referendum_uncertainty() -> Formula {
    Formula::hartley(
        "c",
        Cmp::Ge,
        Threshold::Real(Decimal::integer(2)),
        vec![Formula::atom("V_A"), Formula::atom("V_B")],
    )
    .expect("distinct members")
}

/// `<v> F (Voted & H[c] >= 2 {V_A, V_B})`.
pub fn referendum_hartley_formula() -> Formula {
    Formula::eventually(
        Coalition::new(&["v"]),
        Formula::and(Formula::atom("Voted"), referendum_uncertainty()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcheck::{check_at, CheckOptions};

    #[test]
    fn single_referendum_shape() {
        let m = gen_referendum_single();
        assert_eq!(m.num_states(), 3);
        assert_eq!(m.state_names(m.epistemic_class("c", "s1").unwrap()), vec!["s1", "s2"]);
        let opts = CheckOptions::default();
        assert!(check_at(&m, "s0", &referendum_single_formula(), &opts).unwrap());
        let f = crate::formula::parse_formula("<v> F (Voted & K[c] V_A)").unwrap();
        assert!(!check_at(&m, "s0", &f, &opts).unwrap());
    }

    #[test]
    fn double_referendum_formulas() {
        let opts = CheckOptions::default();
        let m1 = gen_referendum_double(DoubleVariant::M1);
        let m2 = gen_referendum_double(DoubleVariant::M2);
        for m in [&m1, &m2] {
            assert!(check_at(m, "s0", &referendum_double_formula(), &opts).unwrap());
        }
        assert!(check_at(&m2, "s0", &referendum_hartley_formula(), &opts).unwrap());
        assert!(!check_at(&m1, "s0", &referendum_hartley_formula(), &opts).unwrap());
        assert_eq!(
            referendum_hartley_formula().to_string(),
            "<v> F (Voted & H[c] >= 2 {V_A, V_B})"
        );
    }
}
