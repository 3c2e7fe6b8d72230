use std::fmt;

use super::{Coalition, Formula};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Disj,
    Conj,
    Unary,
}

fn level_of(f: &Formula) -> Level {
    match f {
        Formula::Or(..) => Level::Disj,
        Formula::And(..) => Level::Conj,
        _ => Level::Unary,
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().collect();
        write!(f, "{}", names.join(", "))
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, ctx: Level) -> fmt::Result {
    if level_of(f) < ctx {
        write!(out, "(")?;
        write_formula(out, f)?;
        write!(out, ")")
    } else {
        write_formula(out, f)
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::Atom(p) => write!(out, "{p}"),
        Formula::True => write!(out, "true"),
        Formula::False => write!(out, "false"),
        Formula::Not(g) => {
            write!(out, "!")?;
            write_at(out, g, Level::Unary)
        }
        Formula::And(a, b) => {
            write_at(out, a, Level::Conj)?;
            write!(out, " & ")?;
            write_at(out, b, Level::Unary)
        }
        Formula::Or(a, b) => {
            write_at(out, a, Level::Disj)?;
            write!(out, " | ")?;
            write_at(out, b, Level::Conj)
        }
        Formula::CoalX(c, g) => {
            write!(out, "<{c}> X ")?;
            write_at(out, g, Level::Unary)
        }
        Formula::CoalG(c, g) => {
            write!(out, "<{c}> G ")?;
            write_at(out, g, Level::Unary)
        }
        Formula::CoalU(c, a, b) if **a == Formula::True => {
            write!(out, "<{c}> F ")?;
            write_at(out, b, Level::Unary)
        }
        Formula::CoalU(c, a, b) => {
            write!(out, "<{c}> (")?;
            write_formula(out, a)?;
            write!(out, " U ")?;
            write_formula(out, b)?;
            write!(out, ")")
        }
        Formula::CoalFG(c, reach, stay) => {
            write!(out, "<{c}> F (")?;
            write_at(out, reach, Level::Conj)?;
            write!(out, " & G ")?;
            write_at(out, stay, Level::Unary)?;
            write!(out, ")")
        }
        Formula::Knows(a, g) => {
            write!(out, "K[{a}] ")?;
            write_at(out, g, Level::Unary)
        }
        Formula::MutualKnows(c, g) => {
            write!(out, "E[{c}] ")?;
            write_at(out, g, Level::Unary)
        }
        Formula::Hartley(a, cmp, t, beta) => {
            write!(out, "H[{a}] {} {t} {{", cmp.symbol())?;
            for (i, g) in beta.iter().enumerate() {
                if i > 0 {
                    write!(out, ", ")?;
                }
                write_formula(out, g)?;
            }
            write!(out, "}}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}
