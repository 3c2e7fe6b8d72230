use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::formula::Formula;
use crate::mcheck::{label, CheckOptions};
use crate::sample::{random_epistemic_formula, random_model, FormulaParams, ModelParams};

use super::{h_to_k, k_to_h, TranslateOptions};

#[derive(Debug, Clone)]
pub struct EquivalenceConfig {
    pub samples: usize,
    pub root_seed: u64,
    pub model: ModelParams,
    pub formula: FormulaParams,
    pub check: CheckOptions,
    pub translate: TranslateOptions,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            samples: 1000,
            root_seed: 7,
            model: ModelParams::default(),
            formula: FormulaParams::default(),
            check: CheckOptions::default(),
            translate: TranslateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// First state where a translation disagrees with the original.
    Mismatch { state: String, direction: &'static str },
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleReport {
    pub seed: u64,
    pub states: usize,
    pub formula: String,
    pub verdict: Verdict,
}

impl SampleReport {
    pub fn is_ok(&self) -> bool {
        self.verdict == Verdict::Ok
    }
}

impl fmt::Display for SampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed={} states={} formula={} verdict=", self.seed, self.states, self.formula)?;
        match &self.verdict {
            Verdict::Ok => write!(f, "ok"),
            Verdict::Mismatch { state, .. } => write!(f, "mismatch@{state}"),
            Verdict::Error(e) => write!(f, "error({e})"),
        }
    }
}

/// Draws random models and formulas and compares each formula with both of
/// its translations at every state. Per-sample seeds come from `root_seed`,
/// so reports are reproducible and independent of thread count.
pub fn check_translation_equivalence(cfg: &EquivalenceConfig) -> Vec<SampleReport> {
    let mut root = ChaCha8Rng::seed_from_u64(cfg.root_seed);
    let seeds: Vec<u64> = (0..cfg.samples).map(|_| root.next_u64()).collect();
    seeds.par_iter().map(|&seed| run_sample(cfg, seed)).collect()
}

fn run_sample(cfg: &EquivalenceConfig, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = random_model(&mut rng, &cfg.model);
    let f = random_epistemic_formula(&mut rng, &model, &cfg.formula);
    let verdict = compare(cfg, &model, &f);
    SampleReport {
        seed,
        states: model.num_states(),
        formula: f.to_string(),
        verdict,
    }
}

fn compare(cfg: &EquivalenceConfig, model: &crate::cegm::Cegm, f: &Formula) -> Verdict {
    let direct = match label(model, f, &cfg.check) {
        Ok(l) => l.root().clone(),
        Err(e) => return Verdict::Error(e.to_string()),
    };
    let h2k = match h_to_k(f, &cfg.translate) {
        Ok(g) => g,
        Err(e) => return Verdict::Error(e.to_string()),
    };
    let candidates = [("h2k", h2k), ("k2h", k_to_h(f))];
    for (direction, g) in candidates {
        let other = match label(model, &g, &cfg.check) {
            Ok(l) => l.root().clone(),
            Err(e) => return Verdict::Error(e.to_string()),
        };
        if other != direct {
            let q = (0..model.num_states())
                .find(|&q| other.contains(q) != direct.contains(q))
                .expect("sets differ");
            return Verdict::Mismatch {
                state: model.states()[q].clone(),
                direction,
            };
        }
    }
    Verdict::Ok
}
