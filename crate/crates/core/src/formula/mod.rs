//! ATLH/ATLK formulas: syntax tree, concrete syntax, and the length metric.

mod parse;
mod print;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

pub use parse::parse_formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("uncertainty operator needs a non-empty formula set")]
    EmptyBeta,
    #[error("formula `{0}` appears twice in an uncertainty set")]
    DuplicateBeta(String),
    #[error("agent `{0}` appears twice in a coalition")]
    DuplicateAgent(String),
}

/// Comparison operator of the uncertainty modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Cmp {
    pub const ALL: [Cmp; 5] = [Cmp::Lt, Cmp::Le, Cmp::Gt, Cmp::Ge, Cmp::Eq];

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        }
    }

    /// Applies the comparison to an already computed ordering of `lhs` vs `rhs`.
    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Cmp::Lt => ord == Less,
            Cmp::Le => ord != Greater,
            Cmp::Gt => ord == Greater,
            Cmp::Ge => ord != Less,
            Cmp::Eq => ord == Equal,
        }
    }
}

/// Non-negative decimal `mantissa / 10^scale`, normalized so that the
/// mantissa has no trailing zero digits when `scale > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decimal {
    mantissa: u64,
    scale: u32,
}

impl Decimal {
    pub const MAX_SCALE: u32 = 6;

    pub fn new(mantissa: u64, scale: u32) -> Self {
        let (mut mantissa, mut scale) = (mantissa, scale);
        while scale > 0 && mantissa % 10 == 0 {
            mantissa /= 10;
            scale -= 1;
        }
        Decimal { mantissa, scale }
    }

    pub fn integer(value: u64) -> Self {
        Decimal::new(value, 0)
    }

    pub fn mantissa(&self) -> u64 {
        self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// The value as a reduced fraction `(numerator, denominator)`.
    pub fn as_fraction(&self) -> (u64, u64) {
        let den = 10u64.pow(self.scale);
        let g = gcd(self.mantissa, den);
        (self.mantissa / g, den / g)
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 / 10f64.powi(self.scale as i32)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.mantissa);
        }
        let den = 10u64.pow(self.scale);
        write!(
            f,
            "{}.{:0width$}",
            self.mantissa / den,
            self.mantissa % den,
            width = self.scale as usize
        )
    }
}

/// Right-hand side `m` of `log|R| ⊗ m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threshold {
    /// `log(k)`, compared exactly against the class count.
    LogOfCount(u64),
    Real(Decimal),
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::LogOfCount(k) => write!(f, "log({k})"),
            Threshold::Real(d) => write!(f, "{d}"),
        }
    }
}

/// A set of agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Coalition(BTreeSet<String>);

impl Coalition {
    pub fn new<S: AsRef<str>>(agents: &[S]) -> Self {
        Coalition(agents.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn empty() -> Self {
        Coalition::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, agent: &str) -> bool {
        self.0.contains(agent)
    }
}

impl<S: Into<String>> FromIterator<S> for Coalition {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Coalition(iter.into_iter().map(Into::into).collect())
    }
}

/// ATLH formula with knowledge operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    CoalX(Coalition, Box<Formula>),
    CoalG(Coalition, Box<Formula>),
    /// `<A> (φ U ψ)`; `<A> F ψ` is `CoalU(A, True, ψ)`.
    CoalU(Coalition, Box<Formula>, Box<Formula>),
    /// `<A> F (φ & G ψ)`: eventually reach φ from where ψ holds forever.
    CoalFG(Coalition, Box<Formula>, Box<Formula>),
    Knows(String, Box<Formula>),
    MutualKnows(Coalition, Box<Formula>),
    /// `H[a] ⊗ m {β}`; β is non-empty and duplicate-free.
    Hartley(String, Cmp, Threshold, Vec<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn knows(agent: impl Into<String>, f: Formula) -> Self {
        Formula::Knows(agent.into(), Box::new(f))
    }

    pub fn mutual_knows(coalition: Coalition, f: Formula) -> Self {
        Formula::MutualKnows(coalition, Box::new(f))
    }

    pub fn next(coalition: Coalition, f: Formula) -> Self {
        Formula::CoalX(coalition, Box::new(f))
    }

    pub fn always(coalition: Coalition, f: Formula) -> Self {
        Formula::CoalG(coalition, Box::new(f))
    }

    pub fn until(coalition: Coalition, a: Formula, b: Formula) -> Self {
        Formula::CoalU(coalition, Box::new(a), Box::new(b))
    }

    pub fn eventually(coalition: Coalition, f: Formula) -> Self {
        Formula::until(coalition, Formula::True, f)
    }

    pub fn eventually_always(coalition: Coalition, reach: Formula, stay: Formula) -> Self {
        Formula::CoalFG(coalition, Box::new(reach), Box::new(stay))
    }

    /// Builds `H[agent] cmp threshold {beta}`, rejecting empty or repeated β.
    pub fn hartley(
        agent: impl Into<String>,
        cmp: Cmp,
        threshold: Threshold,
        beta: Vec<Formula>,
    ) -> Result<Self, FormulaError> {
        if beta.is_empty() {
            return Err(FormulaError::EmptyBeta);
        }
        let mut seen = HashSet::new();
        for f in &beta {
            if !seen.insert(f) {
                return Err(FormulaError::DuplicateBeta(f.to_string()));
            }
        }
        Ok(Formula::Hartley(agent.into(), cmp, threshold, beta))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Immediate subformulas, β members included.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => vec![],
            Formula::Not(f)
            | Formula::CoalX(_, f)
            | Formula::CoalG(_, f)
            | Formula::Knows(_, f)
            | Formula::MutualKnows(_, f) => vec![f],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::CoalU(_, a, b)
            | Formula::CoalFG(_, a, b) => vec![a, b],
            Formula::Hartley(_, _, _, beta) => beta.iter().collect(),
        }
    }

    /// Formula length: atoms and constants count 1, `¬`/`X`/`G`/`K` add 1,
    /// binary connectives and `U` add 1, a coalition adds its size, and
    /// `H` adds 1 on top of its β members.
    pub fn length(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => 1,
            Formula::Not(f) | Formula::Knows(_, f) => 1 + f.length(),
            Formula::And(a, b) | Formula::Or(a, b) => a.length() + b.length() + 1,
            Formula::CoalX(c, f) | Formula::CoalG(c, f) => c.len() + 1 + f.length(),
            Formula::CoalU(c, a, b) => c.len() + a.length() + b.length() + 1,
            // |A| + |⊤ U (φ ∧ G ψ)|
            Formula::CoalFG(c, a, b) => c.len() + 1 + (a.length() + (1 + b.length()) + 1) + 1,
            Formula::MutualKnows(c, f) => c.len() + f.length(),
            Formula::Hartley(_, _, _, beta) => 1 + beta.iter().map(Formula::length).sum::<usize>(),
        }
    }

    /// Nesting depth; atoms and constants have height 1.
    pub fn height(&self) -> usize {
        1 + self.children().iter().map(|c| c.height()).max().unwrap_or(0)
    }

    /// All distinct subformulas ordered by length, ties broken by height and
    /// then printed text. Every proper subformula precedes its parents (the
    /// height key matters only for `E[]`, whose length equals its body's);
    /// `self` is last.
    pub fn subformulas_by_length(&self) -> Vec<Formula> {
        let mut seen: HashSet<&Formula> = HashSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f) {
                stack.extend(f.children());
            }
        }
        let mut keyed: Vec<(usize, usize, String, &Formula)> = seen
            .into_iter()
            .map(|f| (f.length(), f.height(), f.to_string(), f))
            .collect();
        keyed.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
        keyed.into_iter().map(|(_, _, _, f)| f.clone()).collect()
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.as_str());
            }
        });
        out
    }

    /// Agents mentioned anywhere in the formula.
    pub fn agents(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Knows(a, _) | Formula::Hartley(a, _, _, _) => {
                out.insert(a.as_str());
            }
            Formula::CoalX(c, _)
            | Formula::CoalG(c, _)
            | Formula::CoalU(c, _, _)
            | Formula::CoalFG(c, _, _)
            | Formula::MutualKnows(c, _) => out.extend(c.iter()),
            _ => {}
        });
        out
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for child in self.children() {
            child.visit(f);
        }
    }

    /// True if the formula contains a strategic operator.
    pub fn is_strategic(&self) -> bool {
        matches!(
            self,
            Formula::CoalX(..) | Formula::CoalG(..) | Formula::CoalU(..) | Formula::CoalFG(..)
        )
    }

    pub fn has_hartley(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Hartley(..)));
        found
    }

    pub fn has_knowledge(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Knows(..) | Formula::MutualKnows(..)));
        found
    }
}
