use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;

use crate::cegm::{Cegm, StateSet};
use crate::formula::{Cmp, Threshold};

/// Number of distinct β-valuation vectors inside `[q]` of `agent`, i.e.
/// `|R_{a,q}(β)|`.
pub fn hartley_classes(model: &Cegm, agent: usize, state: usize, beta_labels: &[StateSet]) -> usize {
    count_vectors(model.class(agent, state), beta_labels)
}

pub(crate) fn count_vectors(class: &StateSet, beta_labels: &[StateSet]) -> usize {
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    for q in class.iter() {
        seen.insert(beta_labels.iter().map(|l| l.contains(q)).collect());
    }
    seen.len()
}

/// Exact ordering of `log2(count)` against a threshold.
pub fn log_ordering(count: u64, threshold: Threshold) -> Ordering {
    match threshold {
        Threshold::LogOfCount(k) => count.cmp(&k),
        Threshold::Real(r) => {
            if count == 0 {
                return Ordering::Less;
            }
            // log2(count) vs p/q  <=>  count^q vs 2^p
            let (p, q) = r.as_fraction();
            let lhs = q as f64 * (count as f64).log2();
            let rhs = p as f64;
            if lhs + 0.5 < rhs {
                return Ordering::Less;
            }
            if lhs > rhs + 0.5 {
                return Ordering::Greater;
            }
            let big_lhs = BigUint::from(count).pow(q as u32);
            let big_rhs = BigUint::one() << (p as usize);
            big_lhs.cmp(&big_rhs)
        }
    }
}

/// Evaluates `log2(count) ⊗ t` exactly.
pub fn compare_log(count: u64, cmp: Cmp, threshold: Threshold) -> bool {
    cmp.holds(log_ordering(count, threshold))
}
