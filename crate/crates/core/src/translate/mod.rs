//! Translations between knowledge and uncertainty operators.
//!
//! `K_a ψ` is rewritten as `ψ & H[a] = log(1) {ψ}`. In the other direction an
//! uncertainty node over `β = {φ_1, .., φ_n}` becomes a disjunction of
//! formulas `P_m`, each stating that exactly `m` of the `2^n` valuation
//! patterns of β are possible for the agent.

mod equivalence;

use thiserror::Error;

use crate::formula::{Cmp, Formula, Threshold};
use crate::mcheck::compare_log;

pub use equivalence::{check_translation_equivalence, EquivalenceConfig, SampleReport, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("uncertainty set of size {size} exceeds the cap of {cap} in `{node}`")]
    BetaTooLarge { size: usize, cap: usize, node: String },
    #[error("translation of `{node}` would have length {predicted}, above the cap of {cap}")]
    TooLarge {
        predicted: u128,
        cap: usize,
        node: String,
    },
    #[error("count {m} is outside 1..={max}")]
    CountOutOfRange { m: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    pub max_beta: usize,
    /// Largest formula length a single translation may produce.
    pub max_length: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            max_beta: 4,
            max_length: 1_000_000,
        }
    }
}

/// Replaces `K` and `E` by uncertainty operators, innermost first.
pub fn k_to_h(f: &Formula) -> Formula {
    match f {
        Formula::Knows(a, g) => knows_as_h(a, k_to_h(g)),
        Formula::MutualKnows(c, g) => {
            let inner = k_to_h(g);
            Formula::conjunction(c.iter().map(|a| knows_as_h(a, inner.clone())))
        }
        _ => map_children(f, &mut |g| Ok::<_, TranslateError>(k_to_h(g))).expect("infallible"),
    }
}

fn knows_as_h(agent: &str, g: Formula) -> Formula {
    let h = Formula::Hartley(agent.to_string(), Cmp::Eq, Threshold::LogOfCount(1), vec![g.clone()]);
    Formula::and(g, h)
}

fn map_children<E>(
    f: &Formula,
    rec: &mut impl FnMut(&Formula) -> Result<Formula, E>,
) -> Result<Formula, E> {
    let b = |g: Formula| Box::new(g);
    Ok(match f {
        Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(g) => Formula::Not(b(rec(g)?)),
        Formula::And(x, y) => Formula::And(b(rec(x)?), b(rec(y)?)),
        Formula::Or(x, y) => Formula::Or(b(rec(x)?), b(rec(y)?)),
        Formula::CoalX(c, g) => Formula::CoalX(c.clone(), b(rec(g)?)),
        Formula::CoalG(c, g) => Formula::CoalG(c.clone(), b(rec(g)?)),
        Formula::CoalU(c, x, y) => Formula::CoalU(c.clone(), b(rec(x)?), b(rec(y)?)),
        Formula::CoalFG(c, x, y) => Formula::CoalFG(c.clone(), b(rec(x)?), b(rec(y)?)),
        Formula::Knows(a, g) => Formula::Knows(a.clone(), b(rec(g)?)),
        Formula::MutualKnows(c, g) => Formula::MutualKnows(c.clone(), b(rec(g)?)),
        Formula::Hartley(a, cmp, t, beta) => Formula::Hartley(
            a.clone(),
            *cmp,
            *t,
            beta.iter().map(|g| rec(g)).collect::<Result<_, _>>()?,
        ),
    })
}

fn literal(f: &Formula, positive: bool) -> Formula {
    if positive {
        f.clone()
    } else {
        Formula::not(f.clone())
    }
}

/// The `2^n` valuation patterns of β as conjunctions, all-positive first.
pub fn phi_beta(beta: &[Formula], opts: &TranslateOptions) -> Result<Vec<Formula>, TranslateError> {
    let n = beta.len();
    if n == 0 || n > opts.max_beta {
        return Err(TranslateError::BetaTooLarge {
            size: n,
            cap: opts.max_beta,
            node: beta_text(beta),
        });
    }
    Ok((0..1usize << n)
        .map(|idx| {
            Formula::conjunction(
                beta.iter()
                    .enumerate()
                    .map(|(j, f)| literal(f, idx >> (n - 1 - j) & 1 == 0)),
            )
        })
        .collect())
}

fn beta_text(beta: &[Formula]) -> String {
    let parts: Vec<String> = beta.iter().map(Formula::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// All 0/1 tuples of length `2^n` with exactly `m` zeros, ascending.
pub fn t_nm(n: usize, m: usize) -> Result<Vec<Vec<u8>>, TranslateError> {
    let len = 1usize << n;
    if m < 1 || m > len {
        return Err(TranslateError::CountOutOfRange { m, max: len });
    }
    fn fill(len: usize, zeros: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let left = len - cur.len();
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for bit in [0u8, 1] {
            let z = if bit == 0 { zeros.checked_sub(1) } else { Some(zeros) };
            if let Some(z) = z {
                if z <= left - 1 {
                    cur.push(bit);
                    fill(len, z, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    fill(len, m, &mut Vec::with_capacity(len), &mut out);
    Ok(out)
}

/// `P_m`: exactly `m` valuation patterns of β are possible for `agent`.
///
/// A zero at position `j` reads "pattern `j` is possible" (`!K[a] !α_j`), a
/// one reads "pattern `j` is ruled out" (`K[a] !α_j`). Disjuncts follow the
/// tuples in descending order.
pub fn h_eq_to_k(agent: &str, beta: &[Formula], m: usize, opts: &TranslateOptions) -> Result<Formula, TranslateError> {
    let alphas = phi_beta(beta, opts)?;
    let tuples = t_nm(beta.len(), m)?;
    let ruled_out: Vec<Formula> = alphas
        .iter()
        .map(|a| Formula::knows(agent, Formula::not(a.clone())))
        .collect();
    Ok(Formula::disjunction(tuples.iter().rev().map(|t| {
        Formula::conjunction(
            t.iter()
                .zip(&ruled_out)
                .map(|(&bit, k)| literal(k, bit == 1)),
        )
    })))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact length of `h_eq_to_k(_, beta, m)` without building it.
pub fn predicted_p_length(beta: &[Formula], m: usize) -> u128 {
    let n = beta.len();
    let width = 1u128 << n;
    let sum_beta: u128 = beta.iter().map(|f| f.length() as u128).sum();
    // |α_j| = Σ|β_i| + (n - 1) + negations in pattern j; negations total n·2^(n-1)
    let alphas_total = width * (sum_beta + n as u128 - 1) + n as u128 * (width / 2);
    // K[a] !α adds 2 per literal, each zero adds a leading `!`, plus 2^n - 1 ands
    let disjunct = alphas_total + 2 * width + m as u128 + width - 1;
    let count = binomial(width, m as u128);
    count * disjunct + count - 1
}

/// Counts `c ∈ 1..=2^n` with `log c ⊗ t`.
pub fn admissible_counts(n: usize, cmp: Cmp, t: Threshold) -> Vec<usize> {
    (1..=1usize << n)
        .filter(|&c| compare_log(c as u64, cmp, t))
        .collect()
}

/// Replaces every uncertainty operator by knowledge operators, innermost first.
pub fn h_to_k(f: &Formula, opts: &TranslateOptions) -> Result<Formula, TranslateError> {
    let out = h_to_k_inner(f, opts)?;
    let len = out.length();
    if len > opts.max_length {
        return Err(TranslateError::TooLarge {
            predicted: len as u128,
            cap: opts.max_length,
            node: f.to_string(),
        });
    }
    Ok(out)
}

fn h_to_k_inner(f: &Formula, opts: &TranslateOptions) -> Result<Formula, TranslateError> {
    match f {
        Formula::Hartley(agent, cmp, t, beta) => {
            let beta = beta
                .iter()
                .map(|g| h_to_k_inner(g, opts))
                .collect::<Result<Vec<_>, _>>()?;
            let n = beta.len();
            if n > opts.max_beta {
                return Err(TranslateError::BetaTooLarge {
                    size: n,
                    cap: opts.max_beta,
                    node: f.to_string(),
                });
            }
            let counts = admissible_counts(n, *cmp, *t);
            if counts.is_empty() {
                return Ok(Formula::False);
            }
            if counts.len() == 1 << n {
                return Ok(Formula::True);
            }
            let predicted: u128 = counts.iter().map(|&c| predicted_p_length(&beta, c)).sum::<u128>()
                + counts.len() as u128
                - 1;
            if predicted > opts.max_length as u128 {
                return Err(TranslateError::TooLarge {
                    predicted,
                    cap: opts.max_length,
                    node: f.to_string(),
                });
            }
            let parts = counts
                .iter()
                .map(|&c| h_eq_to_k(agent, &beta, c, opts))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::disjunction(parts))
        }
        _ => map_children(f, &mut |g| h_to_k_inner(g, opts)),
    }
}
