use std::collections::BTreeSet;

use super::{Cmp, Coalition, Decimal, Formula, FormulaError, Threshold};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Comma,
    Bang,
    Amp,
    Pipe,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Comma => ",",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Ident(_) | Tok::Number(_) | Tok::End => "",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i);
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(1, &mut i);
            }
            Tok::Number(chars[start..i].iter().collect())
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, n) = match (c, next) {
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('=', _) => (Tok::Eq, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                ('!', _) => (Tok::Bang, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Pipe, 1),
                _ => return Err(syntax(line, col, format!("unexpected character `{c}`"))),
            };
            advance(n, &mut i);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

/// Parses the ASCII concrete syntax.
///
/// `F φ` becomes `(true U φ)`; `<A> F (φ & G ψ)` becomes [`Formula::CoalFG`].
/// The letters `K`, `E` and `H` act as operators only when followed by `[`.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.disj()?;
    match p.peek() {
        Tok::End => Ok(f),
        other => Err(p.error(format!("unexpected {}", other.describe()))),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        let s = &self.toks[self.pos];
        syntax(s.line, s.column, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected `{}`, found {}",
                tok.symbol(),
                self.peek().describe()
            )))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.disj()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Lt => {
                self.bump();
                let coalition = self.agent_list(Tok::Gt)?;
                self.temporal(coalition)
            }
            Tok::Ident(name) => {
                let bracket = *self.peek_at(1) == Tok::LBracket;
                match name.as_str() {
                    "true" => {
                        self.bump();
                        Ok(Formula::True)
                    }
                    "false" => {
                        self.bump();
                        Ok(Formula::False)
                    }
                    "K" if bracket => {
                        self.bump();
                        self.bump();
                        let agent = self.ident("agent name")?;
                        self.expect(Tok::RBracket)?;
                        Ok(Formula::knows(agent, self.unary()?))
                    }
                    "E" if bracket => {
                        self.bump();
                        self.bump();
                        let coalition = self.agent_list(Tok::RBracket)?;
                        Ok(Formula::mutual_knows(coalition, self.unary()?))
                    }
                    "H" if bracket => {
                        self.bump();
                        self.hartley()
                    }
                    _ => {
                        self.bump();
                        Ok(Formula::Atom(name))
                    }
                }
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    /// Comma-separated, possibly empty, agent list closed by `close`.
    fn agent_list(&mut self, close: Tok) -> Result<Coalition, FormulaError> {
        let mut agents = BTreeSet::new();
        if *self.peek() == close {
            self.bump();
            return Ok(Coalition(agents));
        }
        loop {
            let a = self.ident("agent name")?;
            if !agents.insert(a.clone()) {
                return Err(FormulaError::DuplicateAgent(a));
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                self.expect(close)?;
                return Ok(Coalition(agents));
            }
        }
    }

    fn temporal(&mut self, coalition: Coalition) -> Result<Formula, FormulaError> {
        if self.is_keyword("X") {
            self.bump();
            return Ok(Formula::next(coalition, self.unary()?));
        }
        if self.is_keyword("G") {
            self.bump();
            return Ok(Formula::always(coalition, self.unary()?));
        }
        if self.is_keyword("F") {
            self.bump();
            if *self.peek() == Tok::LParen {
                return self.eventually_body(coalition);
            }
            return Ok(Formula::eventually(coalition, self.unary()?));
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let lhs = self.disj()?;
            if !self.is_keyword("U") {
                return Err(self.error(format!(
                    "expected `U`, found {}",
                    self.peek().describe()
                )));
            }
            self.bump();
            let rhs = self.disj()?;
            self.expect(Tok::RParen)?;
            return Ok(Formula::until(coalition, lhs, rhs));
        }
        Err(self.error(format!(
            "expected `X`, `G`, `F` or `(` after a coalition, found {}",
            self.peek().describe()
        )))
    }

    /// Path `G` that opens a conjunct: the letter followed by something that
    /// starts a formula.
    fn at_path_g(&self) -> bool {
        self.is_keyword("G")
            && matches!(
                self.peek_at(1),
                Tok::Ident(_) | Tok::Bang | Tok::LParen | Tok::Lt
            )
    }

    /// Parenthesized argument of `<A> F`, which may carry one `G ψ` conjunct.
    fn eventually_body(&mut self, coalition: Coalition) -> Result<Formula, FormulaError> {
        self.expect(Tok::LParen)?;
        let mut conjuncts = Vec::new();
        let mut stay: Option<Formula> = None;
        loop {
            if self.at_path_g() {
                if stay.is_some() {
                    return Err(self.error("only one `G` conjunct is allowed under `F`"));
                }
                self.bump();
                stay = Some(self.unary()?);
            } else {
                conjuncts.push(self.unary()?);
            }
            if *self.peek() == Tok::Amp {
                self.bump();
            } else {
                break;
            }
        }
        match stay {
            Some(stay) => {
                if *self.peek() == Tok::Pipe {
                    return Err(self.error("a `G` conjunct under `F` cannot be part of a disjunction"));
                }
                self.expect(Tok::RParen)?;
                Ok(Formula::eventually_always(
                    coalition,
                    Formula::conjunction(conjuncts),
                    stay,
                ))
            }
            None => {
                let mut f = Formula::conjunction(conjuncts);
                while *self.peek() == Tok::Pipe {
                    self.bump();
                    f = Formula::or(f, self.conj()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Formula::eventually(coalition, f))
            }
        }
    }

    fn hartley(&mut self) -> Result<Formula, FormulaError> {
        self.expect(Tok::LBracket)?;
        let agent = self.ident("agent name")?;
        self.expect(Tok::RBracket)?;
        let cmp = match self.peek() {
            Tok::Lt => Cmp::Lt,
            Tok::Le => Cmp::Le,
            Tok::Gt => Cmp::Gt,
            Tok::Ge => Cmp::Ge,
            Tok::Eq => Cmp::Eq,
            other => {
                return Err(self.error(format!("unknown comparison {}", other.describe())));
            }
        };
        self.bump();
        if *self.peek() == Tok::Eq {
            return Err(self.error("unknown comparison; use one of <, <=, >, >=, ="));
        }
        let threshold = self.threshold()?;
        self.expect(Tok::LBrace)?;
        let mut beta = Vec::new();
        if *self.peek() == Tok::RBrace {
            return Err(FormulaError::EmptyBeta);
        }
        loop {
            beta.push(self.disj()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                self.expect(Tok::RBrace)?;
                break;
            }
        }
        Formula::hartley(agent, cmp, threshold, beta)
    }

    fn threshold(&mut self) -> Result<Threshold, FormulaError> {
        match self.peek().clone() {
            Tok::Number(text) => {
                let t = parse_decimal(&text).map_err(|m| self.error(m))?;
                self.bump();
                Ok(Threshold::Real(t))
            }
            Tok::Ident(s) if s == "log" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let k = match self.peek().clone() {
                    Tok::Number(text) if text.chars().all(|c| c.is_ascii_digit()) => text
                        .parse::<u64>()
                        .ok()
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| self.error("`log` needs a positive integer argument"))?,
                    other => {
                        return Err(self.error(format!(
                            "`log` needs a positive integer argument, found {}",
                            other.describe()
                        )))
                    }
                };
                self.bump();
                self.expect(Tok::RParen)?;
                Ok(Threshold::LogOfCount(k))
            }
            other => Err(self.error(format!(
                "expected a threshold (decimal or `log(k)`), found {}",
                other.describe()
            ))),
        }
    }
}

fn parse_decimal(text: &str) -> Result<Decimal, String> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty()
        || (text.contains('.') && frac.is_empty())
        || frac.contains('.')
        || !int.chars().all(|c| c.is_ascii_digit())
        || !frac.chars().all(|c| c.is_ascii_digit())
    {
        return Err(format!("malformed number `{text}`"));
    }
    if frac.len() > Decimal::MAX_SCALE as usize {
        return Err(format!(
            "number `{text}` has more than {} fractional digits",
            Decimal::MAX_SCALE
        ));
    }
    let digits = format!("{int}{frac}");
    let mantissa = digits
        .parse::<u64>()
        .map_err(|_| format!("number `{text}` is too large"))?;
    Ok(Decimal::new(mantissa, frac.len() as u32))
}
