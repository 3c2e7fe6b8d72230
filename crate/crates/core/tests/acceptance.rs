//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Built without the test harness so every line is printed; exits non-zero
//! if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use atlh::cegm::StateSet;
use atlh::formula::{Cmp, Coalition, Decimal, Formula, Threshold};
use atlh::mcheck::{
    check, check_at, hartley_classes, label, strategic_holds, CheckOptions, StrategyMode, SuccessScope, TemporalGoal,
};
use atlh::sample::{random_formula, FormulaParams, ModelParams};
use atlh::scenarios::{
    coercion_epistemic, coercion_hartley, gen_referendum_double, gen_referendum_single, gen_threeballot,
    referendum_double_formula, referendum_hartley_formula, referendum_single_formula, referendum_uncertainty,
    threeballot_infosets, CoercionOptions, DoubleVariant, HartleyReading,
};
use atlh::succinct::{collapse_reflexive, fsg_min_win, gen_mn, gen_nnj, min_mel_formula, phi_n, separating_family, PointedModel};
use atlh::translate::{check_translation_equivalence, h_to_k, EquivalenceConfig, TranslateOptions};
use rand::seq::SliceRandom;
use rand::Rng;

const FIG1_LIMIT: Duration = Duration::from_secs(1);
const REFERENDUM_LIMIT: Duration = Duration::from_secs(1);
const TABLE_LIMIT: Duration = Duration::from_secs(10);
const THREEBALLOT_LIMIT: Duration = Duration::from_secs(60);
const EQUIVALENCE_LIMIT: Duration = Duration::from_secs(300);
const FSG_LIMIT: Duration = Duration::from_secs(600);
const PROPERTY_LIMIT: Duration = Duration::from_secs(300);

const EQUIVALENCE_SAMPLES: usize = 1000;
const EQUIVALENCE_SEED: u64 = 7;
const PROPERTY_MODELS: usize = 500;
const ORACLE_MODELS: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    let within = took < limit;
    o.detail = format!("{}; {} ms (limit {} ms)", o.detail, took.as_millis(), limit.as_millis());
    o.pass &= within;
    o
}

fn fig1_check() -> Outcome {
    timed(FIG1_LIMIT, || {
        let m = gen_referendum_single();
        let holds = check_at(&m, "s0", &referendum_single_formula(), &CheckOptions::default()).unwrap();
        outcome(holds, format!("single-issue property at s0 = {holds}"))
    })
}

fn referendum_atlk() -> Outcome {
    timed(REFERENDUM_LIMIT, || {
        let f = referendum_double_formula();
        let opts = CheckOptions::default();
        let r: Vec<bool> = [DoubleVariant::M1, DoubleVariant::M2]
            .into_iter()
            .map(|v| check_at(&gen_referendum_double(v), "s0", &f, &opts).unwrap())
            .collect();
        outcome(r == [true, true], format!("M1 = {}, M2 = {}", r[0], r[1]))
    })
}

fn referendum_atlh() -> Outcome {
    timed(REFERENDUM_LIMIT, || {
        let opts = CheckOptions::default();
        let (m1, m2) = (gen_referendum_double(DoubleVariant::M1), gen_referendum_double(DoubleVariant::M2));
        let f = referendum_hartley_formula();
        let h = referendum_uncertainty();
        let got = [
            check_at(&m2, "s0", &f, &opts).unwrap(),
            check_at(&m1, "s0", &f, &opts).unwrap(),
            check_at(&m2, "s1", &h, &opts).unwrap(),
            check_at(&m1, "s1", &h, &opts).unwrap(),
        ];
        outcome(
            got == [true, false, true, false],
            format!("M2@s0 = {}, M1@s0 = {}, H at M2@s1 = {}, H at M1@s1 = {}", got[0], got[1], got[2], got[3]),
        )
    })
}

fn hartley_counts() -> Outcome {
    let count = |v| {
        let m = gen_referendum_double(v);
        let labels: Vec<StateSet> = ["V_A", "V_B"].iter().map(|p| m.prop_states(p).unwrap().clone()).collect();
        hartley_classes(&m, m.agent_index("c").unwrap(), m.state_index("s1").unwrap(), &labels)
    };
    let (m2, m1) = (count(DoubleVariant::M2), count(DoubleVariant::M1));
    outcome(m2 == 4 && m1 == 2, format!("M2 = {m2}, M1 = {m1}"))
}

fn printed_table() -> Outcome {
    timed(TABLE_LIMIT, || {
        let got = common::plain_rows(&threeballot_infosets());
        let want = common::printed_table();
        let groups: std::collections::BTreeSet<_> = got.iter().map(|r| (r.0.clone(), r.1.clone())).collect();
        let differing = got.iter().zip(&want).filter(|(a, b)| a != b).count();
        outcome(
            got == want,
            format!(
                "{} groups, {} receipt rows, {} rows differ from the printed table",
                groups.len(),
                got.len(),
                differing + got.len().abs_diff(want.len())
            ),
        )
    })
}

fn threeballot_gap() -> Outcome {
    timed(THREEBALLOT_LIMIT, || {
        let m = gen_threeballot();
        let enumerate = CoercionOptions {
            check: CheckOptions {
                force_enumeration: true,
                ..CheckOptions::default()
            },
            ..CoercionOptions::default()
        };
        let fixpoint = CoercionOptions::default();
        let epistemic = coercion_epistemic(&m, &enumerate).unwrap();
        let epistemic_fixpoint = coercion_epistemic(&m, &fixpoint).unwrap();
        let hartley = coercion_hartley(&m, &fixpoint).unwrap();
        let displayed = coercion_hartley(
            &m,
            &CoercionOptions {
                hartley: HartleyReading::Displayed,
                ..enumerate.clone()
            },
        )
        .unwrap();
        outcome(
            epistemic && epistemic_fixpoint && !hartley,
            format!(
                "epistemic = {epistemic} (enumerated), {epistemic_fixpoint} (game fixpoint); \
                 information-theoretic = {hartley}; displayed-shape variant = {displayed}"
            ),
        )
    })
}

fn translation_equivalence() -> Outcome {
    timed(EQUIVALENCE_LIMIT, || {
        let cfg = EquivalenceConfig {
            samples: EQUIVALENCE_SAMPLES,
            root_seed: EQUIVALENCE_SEED,
            ..EquivalenceConfig::default()
        };
        let reports = check_translation_equivalence(&cfg);
        let bad: Vec<String> = reports.iter().filter(|r| !r.is_ok()).map(|r| r.to_string()).collect();
        let detail = match bad.first() {
            None => format!("{} samples, 0 mismatches", reports.len()),
            Some(first) => format!("{} samples, {} failures, first: {first}", reports.len(), bad.len()),
        };
        outcome(reports.len() == EQUIVALENCE_SAMPLES && bad.is_empty(), detail)
    })
}

fn succinctness_shape() -> Outcome {
    let mut ok = true;
    let mut cells = Vec::new();
    for n in 1..=4usize {
        let phi = phi_n(n);
        let translated = h_to_k(&phi, &TranslateOptions::default()).unwrap().length();
        ok &= phi.length() == n + 1 && translated >= 1 << n;
        cells.push(format!("n={n}: {} -> {translated}", phi.length()));
    }
    outcome(ok, cells.join(", "))
}

fn family_sanity() -> Outcome {
    let opts = CheckOptions::default();
    let mut bad = 0;
    let mut checked = 0;
    for n in 1..=6 {
        let phi = phi_n(n);
        bad += usize::from(!check(&gen_mn(n).unwrap(), 0, &phi, &opts).unwrap());
        checked += 1;
        for j in 1..(1usize << n) {
            bad += usize::from(check(&gen_nnj(n, j).unwrap(), 0, &phi, &opts).unwrap());
            checked += 1;
        }
    }
    outcome(bad == 0, format!("{checked} pointed models, {bad} wrong verdicts"))
}

fn fsg_bound() -> Outcome {
    timed(FSG_LIMIT, || {
        let mut ok = true;
        let mut cells = Vec::new();
        for n in 1..=2usize {
            let (m, ns) = separating_family(n).unwrap();
            let a = [PointedModel::new(&m, 0)];
            let b: Vec<PointedModel> = ns.iter().map(|x| PointedModel::new(x, 0)).collect();
            let fsg = fsg_min_win(&a, &b, 40).unwrap();
            let mel = min_mel_formula(&a, &b, 40).unwrap().map(|(_, s)| s);
            ok &= fsg.is_some_and(|k| k >= 1 << n) && fsg == mel;
            cells.push(format!("n={n}: game {fsg:?}, search {mel:?}, 2^n = {}", 1 << n));
        }
        outcome(ok, cells.join(", "))
    })
}

fn thresholds() -> Vec<Threshold> {
    let mut t: Vec<Threshold> = (1..=5).map(Threshold::LogOfCount).collect();
    t.extend([0u64, 5, 10, 15, 20, 25].map(|x| Threshold::Real(Decimal::new(x, 1))));
    t
}

fn hartley(agent: &str, cmp: Cmp, t: Threshold, beta: &[Formula]) -> Formula {
    Formula::hartley(agent, cmp, t, beta.to_vec()).unwrap()
}

/// Random β with distinct members, over atoms and epistemic operators.
fn random_beta<R: Rng>(rng: &mut R, model: &atlh::cegm::Cegm, size: usize) -> Vec<Formula> {
    let params = FormulaParams {
        max_depth: 2,
        strategic: false,
        hartley: false,
        ..FormulaParams::default()
    };
    let mut beta: Vec<Formula> = Vec::new();
    let mut tries = 0;
    while beta.len() < size && tries < 50 {
        let f = random_formula(rng, model, &params);
        if !beta.contains(&f) {
            beta.push(f);
        }
        tries += 1;
    }
    beta
}

fn property_suites() -> Outcome {
    timed(PROPERTY_LIMIT, || {
        let opts = CheckOptions::default();
        let params = ModelParams::default();
        let sets = |m: &atlh::cegm::Cegm, f: &Formula| label(m, f, &opts).unwrap().root().clone();
        let (mut v1, mut v2, mut v2_literal, mut bound, mut bound_strict, mut bridge, mut collapse) =
            (0usize, 0usize, 0usize, 0usize, 0usize, 0usize, 0usize);

        for (seed, m) in common::models(11, PROPERTY_MODELS, &params) {
            let mut rng = common::rng(seed ^ 0x5eed);
            let agent = m.agents().choose(&mut rng).unwrap().clone();
            let big = random_beta(&mut rng, &m, 3);
            let small: Vec<Formula> = big.iter().take(rng.gen_range(1..=big.len())).cloned().collect();
            let t = *thresholds().choose(&mut rng).unwrap();
            // β ⊆ β': `=, >=, >` on β give `>=, >=, >` on β'
            for (c, c2) in [(Cmp::Eq, Cmp::Ge), (Cmp::Ge, Cmp::Ge), (Cmp::Gt, Cmp::Gt)] {
                let lhs = sets(&m, &hartley(&agent, c, t, &small));
                let rhs = sets(&m, &hartley(&agent, c2, t, &big));
                v1 += usize::from(!lhs.is_subset(&rhs));
            }
            // `<, <=, =` on the larger set give `<, <=, <=` on any subset
            for (c, c2) in [(Cmp::Lt, Cmp::Lt), (Cmp::Le, Cmp::Le), (Cmp::Eq, Cmp::Le)] {
                let on_big = sets(&m, &hartley(&agent, c, t, &big));
                let on_small = sets(&m, &hartley(&agent, c2, t, &small));
                v2 += usize::from(!on_big.is_subset(&on_small));
                let literal = sets(&m, &hartley(&agent, c, t, &small));
                v2_literal += usize::from(!literal.is_subset(&sets(&m, &hartley(&agent, c2, t, &big))));
            }
            let labels: Vec<StateSet> = big.iter().map(|b| sets(&m, b)).collect();
            let ag = m.agent_index(&agent).unwrap();
            let cap = (1usize << big.len()).min(m.num_states());
            for q in 0..m.num_states() {
                let count = hartley_classes(&m, ag, q, &labels);
                bound += usize::from(count > cap);
                bound_strict += usize::from(cap > 1 && count >= cap);
            }

            let phi = random_formula(
                &mut rng,
                &m,
                &FormulaParams {
                    max_depth: 2,
                    ..FormulaParams::default()
                },
            );
            let k = Formula::knows(agent.clone(), phi.clone());
            let h0 = Formula::and(phi.clone(), hartley(&agent, Cmp::Eq, Threshold::Real(Decimal::integer(0)), &[phi]));
            bridge += usize::from(sets(&m, &k) != sets(&m, &h0));
        }

        let reflexive = ModelParams {
            reflexive_only: true,
            ..ModelParams::default()
        };
        let subjective = CheckOptions {
            success_scope: SuccessScope::Subjective,
            ..CheckOptions::default()
        };
        for (seed, m) in common::models(12, PROPERTY_MODELS, &reflexive) {
            let mut rng = common::rng(seed);
            let fp = FormulaParams {
                max_depth: 2,
                strategic: false,
                ..FormulaParams::default()
            };
            let phi = random_formula(&mut rng, &m, &fp);
            let psi = random_formula(&mut rng, &m, &fp);
            let size = rng.gen_range(1..=m.num_agents());
            let members: Vec<&String> = m.agents().choose_multiple(&mut rng, size).collect();
            let a = Coalition::new(&members);
            let e = label(&m, &Formula::mutual_knows(a.clone(), phi.clone()), &subjective).unwrap().root().clone();
            for f in [
                Formula::next(a.clone(), phi.clone()),
                Formula::always(a.clone(), phi.clone()),
                Formula::until(a.clone(), psi.clone(), phi.clone()),
            ] {
                let got = label(&m, &f, &subjective).unwrap().root().clone();
                collapse += usize::from(got != e);
                for scope in [SuccessScope::Objective, SuccessScope::Subjective] {
                    let o = CheckOptions {
                        success_scope: scope,
                        ..CheckOptions::default()
                    };
                    let lhs = label(&m, &f, &o).unwrap().root().clone();
                    let rhs = label(&m, &collapse_reflexive(&f, scope), &o).unwrap().root().clone();
                    collapse += usize::from(lhs != rhs);
                }
            }
        }
        let ok = v1 == 0 && v2 == 0 && bound == 0 && bridge == 0 && collapse == 0;
        outcome(
            ok,
            format!(
                "{PROPERTY_MODELS} models per suite; violations: validity 1 = {v1}, validity 2 = {v2}, \
                 bound = {bound}, K bridge = {bridge}, reflexive collapse = {collapse} \
                 (literal validity 2 fails {v2_literal} times, strict bound fails {bound_strict} times)"
            ),
        )
    })
}

fn random_goal<R: Rng>(rng: &mut R, n: usize, kind: usize) -> TemporalGoal {
    let mut s = || common::random_set(rng, n);
    match kind {
        0 => TemporalGoal::Next(s()),
        1 => TemporalGoal::Always(s()),
        2 => TemporalGoal::Until { hold: s(), target: s() },
        _ => TemporalGoal::EventuallyAlways { reach: s(), stay: s() },
    }
}

fn oracle_equivalence() -> Outcome {
    let params = ModelParams::default();
    let mut disagreements = 0;
    let mut queries = 0;
    let mut first = String::new();
    for (seed, m) in common::models(13, ORACLE_MODELS, &params) {
        let mut rng = common::rng(seed);
        let n = m.num_states();
        let size = rng.gen_range(0..=m.num_agents().min(2));
        let mut coalition: Vec<usize> = (0..m.num_agents()).collect();
        coalition.shuffle(&mut rng);
        coalition.truncate(size);
        coalition.sort_unstable();
        let kind = rng.gen_range(0..4);
        let goal = random_goal(&mut rng, n, kind);
        for mode in [StrategyMode::Uniform, StrategyMode::NonUniform] {
            for scope in [SuccessScope::Objective, SuccessScope::Subjective] {
                for force in [false, true] {
                    let opts = CheckOptions {
                        strategy_mode: mode,
                        success_scope: scope,
                        force_enumeration: force,
                        ..CheckOptions::default()
                    };
                    for q in 0..n {
                        let got = strategic_holds(&m, q, &coalition, &goal, &opts).unwrap();
                        let want = common::lasso_holds(&m, &coalition, &goal, q, mode, scope);
                        queries += 1;
                        if got != want {
                            disagreements += 1;
                            if first.is_empty() {
                                first = format!(" (first: seed {seed}, state {q}, {mode}, {scope:?}, goal kind {kind})");
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("{ORACLE_MODELS} models, {queries} queries, {disagreements} disagreements{first}"),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("single-issue referendum property", fig1_check),
        ("double referendum ATLK property holds on M1 and M2", referendum_atlk),
        ("double referendum ATLH formula separates M1 from M2", referendum_atlh),
        ("coercer uncertainty counts on M1 and M2", hartley_counts),
        ("ThreeBallot information-set table", printed_table),
        ("ThreeBallot epistemic vs information-theoretic verdicts", threeballot_gap),
        ("translation equivalence on random models", translation_equivalence),
        ("succinctness blow-up of the translation", succinctness_shape),
        ("separating model families", family_sanity),
        ("formula size game lower bound", fsg_bound),
        ("property suites", property_suites),
        ("strategic checking against lasso-path oracle", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
