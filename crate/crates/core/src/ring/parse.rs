//! Expression grammar for bivector tables and its canonical printer.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' ['-'] integer)?
//! atom  := integer | family '[' index (',' index)? ']' | '(' expr ')'
//! index := sum of `k` and signed integers, e.g. `k`, `k+2`, `k-1`, `3`
//! ```
//!
//! `k` is the free cyclic index. A parsed [`Template`] is instantiated at a
//! concrete `k` and reduced modulo the period, if one is declared.

use std::collections::BTreeSet;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::Poly;
use super::rat::{format_rat, Rat};
use super::rf::RationalFunction;
use super::var::{Family, VarRef};
use super::RingError;

/// Index of the form `k_coeff * k + offset` with `k_coeff ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexExpr {
    pub uses_k: bool,
    pub offset: i64,
}

impl IndexExpr {
    pub fn at(&self, k: i64) -> i64 {
        if self.uses_k {
            k + self.offset
        } else {
            self.offset
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Int(BigInt),
    Var { family: Family, first: IndexExpr, second: Option<IndexExpr> },
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i64),
}

/// A parsed expression with a free index `k`.
#[derive(Clone, Debug)]
pub struct Template {
    root: Node,
}

impl Template {
    pub fn instantiate(&self, k: i64, period: Option<i64>) -> Result<RationalFunction, RingError> {
        eval_node(&self.root, k, period)
    }

    /// Families referenced by the expression.
    pub fn families(&self) -> BTreeSet<Family> {
        let mut out = BTreeSet::new();
        walk(&self.root, &mut |n| {
            if let Node::Var { family, .. } = n {
                out.insert(*family);
            }
        });
        out
    }

    /// Smallest and largest `k`-relative offset among single-index variables.
    pub fn offset_span(&self) -> Option<(i64, i64)> {
        let mut span: Option<(i64, i64)> = None;
        walk(&self.root, &mut |n| {
            if let Node::Var { first, second: None, .. } = n {
                if first.uses_k {
                    let o = first.offset;
                    span = Some(span.map_or((o, o), |(lo, hi)| (lo.min(o), hi.max(o))));
                }
            }
        });
        span
    }
}

fn walk(node: &Node, f: &mut impl FnMut(&Node)) {
    f(node);
    match node {
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            walk(a, f);
            walk(b, f);
        }
        Node::Neg(a) | Node::Pow(a, _) => walk(a, f),
        Node::Int(_) | Node::Var { .. } => {}
    }
}

fn eval_node(node: &Node, k: i64, period: Option<i64>) -> Result<RationalFunction, RingError> {
    Ok(match node {
        Node::Int(n) => RationalFunction::constant(Rat::from_integer(n.clone())),
        Node::Var { family, first, second } => {
            let v = match second {
                Some(s) => VarRef { family: *family, index: first.at(k), second: Some(s.at(k)) },
                None => VarRef::new(*family, first.at(k)).normalized(period),
            };
            RationalFunction::var(v)
        }
        Node::Add(a, b) => &eval_node(a, k, period)? + &eval_node(b, k, period)?,
        Node::Sub(a, b) => &eval_node(a, k, period)? - &eval_node(b, k, period)?,
        Node::Mul(a, b) => &eval_node(a, k, period)? * &eval_node(b, k, period)?,
        Node::Div(a, b) => eval_node(a, k, period)?.checked_div(&eval_node(b, k, period)?)?,
        Node::Neg(a) => -&eval_node(a, k, period)?,
        Node::Pow(a, e) => eval_node(a, k, period)?.pow(*e)?,
    })
}

/// Families the parser accepts.
#[derive(Clone, Debug)]
pub struct ParseContext {
    families: BTreeSet<Family>,
}

impl Default for ParseContext {
    fn default() -> Self {
        let families = ["B", "X", "Y", "v", "pair", "lam"].iter().map(|n| Family::of(n)).collect();
        ParseContext { families }
    }
}

impl ParseContext {
    /// Accepts exactly the given families.
    pub fn only(families: impl IntoIterator<Item = Family>) -> Self {
        ParseContext { families: families.into_iter().collect() }
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.families.insert(family);
        self
    }

    pub fn knows(&self, family: &Family) -> bool {
        self.families.contains(family)
    }

    pub fn parse(&self, text: &str) -> Result<Template, RingError> {
        let chars: Vec<char> = text.chars().collect();
        let mut p = Parser { chars: &chars, pos: 0, ctx: self };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < chars.len() {
            return Err(p.error(format!("unexpected `{}`", chars[p.pos])));
        }
        Ok(Template { root })
    }
}

/// Parses with the default families and instantiates at `k = 1`.
pub fn parse_expr(text: &str, period: Option<i64>) -> Result<RationalFunction, RingError> {
    ParseContext::default().parse(text)?.instantiate(1, period)
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    ctx: &'a ParseContext,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> RingError {
        RingError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), RingError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.error(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Node, RingError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, RingError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, RingError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, RingError> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let start = {
            self.skip_ws();
            self.pos
        };
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let digits = self.digits();
        let followed_by_fraction = self.chars.get(self.pos) == Some(&'.');
        if digits.is_empty() || followed_by_fraction {
            return Err(RingError::NonIntegerExponent { pos: start });
        }
        let e: i64 = digits.parse().map_err(|_| RingError::NonIntegerExponent { pos: start })?;
        Ok(Node::Pow(Box::new(base), if negative { -e } else { e }))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn atom(&mut self) -> Result<Node, RingError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                if self.chars.get(self.pos) == Some(&'.') {
                    return Err(self.error("decimal literals are not supported; use a/b"));
                }
                Ok(Node::Int(digits.parse().expect("ascii digits")))
            }
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<Node, RingError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let unknown = || RingError::UnknownFamily { name: name.clone(), pos: start };
        let family = Family::new(&name).map_err(|_| unknown())?;
        if !self.ctx.knows(&family) {
            return Err(unknown());
        }
        self.expect('[')?;
        let first = self.index()?;
        let second = if self.peek() == Some(',') {
            self.pos += 1;
            Some(self.index()?)
        } else {
            None
        };
        self.expect(']')?;
        Ok(Node::Var { family, first, second })
    }

    fn index(&mut self) -> Result<IndexExpr, RingError> {
        let start = self.peek().map(|_| self.pos).unwrap_or(self.pos);
        let mut k_count = 0i64;
        let mut offset = 0i64;
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            match self.peek() {
                Some('k') => {
                    self.pos += 1;
                    k_count += sign;
                }
                Some(c) if c.is_ascii_digit() => {
                    let d: i64 = self.digits().parse().map_err(|_| self.error("index literal too large"))?;
                    offset += sign * d;
                }
                Some(c) => return Err(self.error(format!("unexpected `{c}` in index"))),
                None => return Err(self.error("unexpected end of input")),
            }
        }
        match k_count {
            0 => Ok(IndexExpr { uses_k: false, offset }),
            1 => Ok(IndexExpr { uses_k: true, offset }),
            _ => Err(RingError::Syntax { pos: start, msg: "index must be k + c or c".into() }),
        }
    }
}

fn format_monomial_body(m: &super::poly::Monomial) -> String {
    let mut s = String::new();
    for (i, (v, e)) in m.factors().iter().enumerate() {
        if i > 0 {
            s.push('*');
        }
        write!(s, "{v}").unwrap();
        if *e > 1 {
            write!(s, "^{e}").unwrap();
        }
    }
    s
}

/// Prints a polynomial, leading term first, in the parser's grammar.
pub fn format_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let negative = c.is_negative();
        let mag = c.abs();
        match (i, negative) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if m.is_one() {
            s.push_str(&format_rat(&mag));
        } else {
            if !mag.is_one() {
                write!(s, "{}*", format_rat(&mag)).unwrap();
            }
            s.push_str(&format_monomial_body(m));
        }
    }
    s
}

/// Prints a rational function as `num`, `num/den` or `(num)/(den)`.
pub fn format_rf(f: &RationalFunction) -> String {
    let num = format_poly(f.numerator());
    if f.is_polynomial() {
        return num;
    }
    let (mono, factors) = f.denominator_factors();
    let mut parts: Vec<String> = Vec::new();
    if !mono.is_one() {
        parts.extend(mono.factors().iter().map(|(v, e)| if *e > 1 { format!("{v}^{e}") } else { v.to_string() }));
    }
    for (g, e) in factors {
        let body = format!("({})", format_poly(g));
        parts.push(if *e > 1 { format!("{body}^{e}") } else { body });
    }
    let den = if parts.len() == 1 { parts.remove(0) } else { format!("({})", parts.join("*")) };
    let num = if f.numerator().len() > 1 { format!("({num})") } else { num };
    format!("{num}/{den}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: i64) -> RationalFunction {
        RationalFunction::var(VarRef::named("B", i))
    }

    #[test]
    fn table_entries_parse() {
        let t = ParseContext::default().parse("B[k]*B[k+1] - B[k] - B[k+1]").unwrap();
        let f = t.instantiate(5, Some(5)).unwrap();
        assert_eq!(f, &(&(&b(5) * &b(1)) - &b(5)) - &b(1));
        let g = ParseContext::default().parse("-B[k]*B[k+2]/B[k+1]").unwrap();
        let expected = -&(&b(1) * &b(3)).checked_div(&b(2)).unwrap();
        assert_eq!(g.instantiate(1, Some(7)).unwrap(), expected);
        assert_eq!(g.offset_span(), Some((0, 2)));
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_expr("B[k]*(", None) {
            Err(RingError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("Q[k]", None), Err(RingError::UnknownFamily { pos: 0, .. })));
        assert!(matches!(parse_expr("B[k]^x", None), Err(RingError::NonIntegerExponent { pos: 5 })));
        assert!(matches!(parse_expr("B[k]^1.5", None), Err(RingError::NonIntegerExponent { .. })));
        assert!(matches!(parse_expr("B[2k]", None), Err(RingError::Syntax { .. })));
        assert!(matches!(parse_expr("B[k+k]", None), Err(RingError::Syntax { .. })));
    }

    #[test]
    fn pairs_and_powers() {
        let f = parse_expr("pair[1, 3]^2 / pair[3,1]^-1", None).unwrap();
        let p = RationalFunction::var(VarRef::pair(1, 3));
        let q = RationalFunction::var(VarRef::pair(3, 1));
        assert_eq!(f, &(&p * &p) * &q);
    }

    #[test]
    fn printer_examples() {
        let f = parse_expr("3/2*B[1]^2 - B[2] + 5", None).unwrap();
        assert_eq!(f.to_string(), "3/2*B[1]^2 - B[2] + 5");
        let g = parse_expr("-B[k]*B[k+2]/B[k+1]", Some(7)).unwrap();
        assert_eq!(g.to_string(), "-B[1]*B[3]/B[2]");
        let h = parse_expr("(B[1] + 1)/(B[2]*(B[2] - B[3])^2)", None).unwrap();
        assert_eq!(parse_expr(&h.to_string(), None).unwrap(), h);
    }
}
