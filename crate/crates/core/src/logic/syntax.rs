//! Abstract syntax, parser and printer for the second-order language.
//!
//! ```text
//! formula := quant | impl
//! quant   := ("all" | "ex") var "." formula
//! impl    := disj (("->" | "<->") impl)?
//! disj    := conj ("|" conj)*
//! conj    := neg ("&" neg)*
//! neg     := "~" neg | quant | atom | "(" formula ")"
//! atom    := predvar "(" var ("," var)* ")" | var "=" var
//! var     := "x" digits
//! predvar := "A" digits "#" digits
//! ```
//!
//! A quantifier in operand position is accepted and extends maximally to the
//! right; the printer always parenthesizes it there.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Individual variable `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// Predicate variable `A_i^n`; index and arity together identify it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredVar {
    pub index: u32,
    pub arity: u32,
}

impl PredVar {
    pub fn new(index: u32, arity: u32) -> Self {
        PredVar { index, arity }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for PredVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}#{}", self.index, self.arity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Binder {
    Ind(Var),
    Pred(PredVar),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    All,
    Ex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Var, Var),
    Atom(PredVar, Vec<Var>),
    Not(Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Binder, Box<Formula>),
}

impl Formula {
    pub fn eq(a: u32, b: u32) -> Self {
        Formula::Eq(Var(a), Var(b))
    }

    /// `A_index^{args.len()}(x_args...)`.
    pub fn atom(index: u32, args: &[u32]) -> Self {
        Formula::Atom(PredVar::new(index, args.len() as u32), args.iter().map(|&a| Var(a)).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::Bin(BinOp::And, Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Bin(BinOp::Or, Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Bin(BinOp::Implies, Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Self {
        Formula::Bin(BinOp::Iff, Box::new(self), Box::new(other))
    }

    pub fn all(v: u32, body: Formula) -> Self {
        Formula::Quant(Quantifier::All, Binder::Ind(Var(v)), Box::new(body))
    }

    pub fn ex(v: u32, body: Formula) -> Self {
        Formula::Quant(Quantifier::Ex, Binder::Ind(Var(v)), Box::new(body))
    }

    pub fn all_pred(p: PredVar, body: Formula) -> Self {
        Formula::Quant(Quantifier::All, Binder::Pred(p), Box::new(body))
    }

    pub fn ex_pred(p: PredVar, body: Formula) -> Self {
        Formula::Quant(Quantifier::Ex, Binder::Pred(p), Box::new(body))
    }

    /// Conjunction of a non-empty list, associated to the left.
    pub fn conj(parts: Vec<Formula>) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("empty conjunction");
        it.fold(first, Formula::and)
    }

    /// Connective and quantifier nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Atom(..) => 0,
            Formula::Not(a) | Formula::Quant(_, _, a) => 1 + a.depth(),
            Formula::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn free_individuals(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut out, &mut BTreeSet::new());
        out
    }

    pub fn free_predicates(&self) -> BTreeSet<PredVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(
        &self,
        bound_i: &mut Vec<Var>,
        bound_p: &mut Vec<PredVar>,
        inds: &mut BTreeSet<Var>,
        preds: &mut BTreeSet<PredVar>,
    ) {
        match self {
            Formula::Eq(a, b) => {
                for v in [a, b] {
                    if !bound_i.contains(v) {
                        inds.insert(*v);
                    }
                }
            }
            Formula::Atom(p, args) => {
                if !bound_p.contains(p) {
                    preds.insert(*p);
                }
                for v in args {
                    if !bound_i.contains(v) {
                        inds.insert(*v);
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound_i, bound_p, inds, preds),
            Formula::Bin(_, a, b) => {
                a.collect_free(bound_i, bound_p, inds, preds);
                b.collect_free(bound_i, bound_p, inds, preds);
            }
            Formula::Quant(_, Binder::Ind(v), body) => {
                bound_i.push(*v);
                body.collect_free(bound_i, bound_p, inds, preds);
                bound_i.pop();
            }
            Formula::Quant(_, Binder::Pred(p), body) => {
                bound_p.push(*p);
                body.collect_free(bound_i, bound_p, inds, preds);
                bound_p.pop();
            }
        }
    }

    /// Largest arity among quantified predicate variables, if any.
    pub fn max_quantified_arity(&self) -> Option<u32> {
        match self {
            Formula::Eq(..) | Formula::Atom(..) => None,
            Formula::Not(a) => a.max_quantified_arity(),
            Formula::Bin(_, a, b) => a.max_quantified_arity().max(b.max_quantified_arity()),
            Formula::Quant(_, Binder::Pred(p), a) => Some(p.arity).max(a.max_quantified_arity()),
            Formula::Quant(_, Binder::Ind(_), a) => a.max_quantified_arity(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Quant(..) => 0,
            Formula::Bin(BinOp::Implies | BinOp::Iff, ..) => 1,
            Formula::Bin(BinOp::Or, ..) => 2,
            Formula::Bin(BinOp::And, ..) => 3,
            _ => 4,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}")?,
            Formula::Atom(p, args) => {
                write!(f, "{p}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")?;
            }
            Formula::Not(a) => {
                f.write_str("~")?;
                a.write(f, 4)?;
            }
            Formula::Bin(op, a, b) => {
                let (sym, l, r) = match op {
                    BinOp::And => ("&", 3, 4),
                    BinOp::Or => ("|", 2, 3),
                    BinOp::Implies => ("->", 2, 1),
                    BinOp::Iff => ("<->", 2, 1),
                };
                a.write(f, l)?;
                write!(f, " {sym} ")?;
                b.write(f, r)?;
            }
            Formula::Quant(q, b, body) => {
                let kw = match q {
                    Quantifier::All => "all",
                    Quantifier::Ex => "ex",
                };
                match b {
                    Binder::Ind(v) => write!(f, "{kw} {v}. ")?,
                    Binder::Pred(p) => write!(f, "{kw} {p}. ")?,
                }
                body.write(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    All,
    Ex,
    Var(u32),
    Pred(u32, u32),
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Not,
    And,
    Or,
    Implies,
    Iff,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| -> (usize, Option<u32>) {
        let start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        (j, text[start..j].parse().ok())
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'.' => Some(Tok::Dot),
            b'=' => Some(Tok::Equals),
            b'~' => Some(Tok::Not),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
            continue;
        }
        if text[i..].starts_with("->") {
            out.push((start, Tok::Implies));
            i += 2;
        } else if text[i..].starts_with("<->") {
            out.push((start, Tok::Iff));
            i += 3;
        } else if c == b'x' {
            let (j, n) = digits(i + 1);
            let n = n.ok_or_else(|| syntax(start, "expected digits after `x`"))?;
            out.push((start, Tok::Var(n)));
            i = j;
        } else if c == b'A' {
            let (j, n) = digits(i + 1);
            let n = n.ok_or_else(|| syntax(start, "expected digits after `A`"))?;
            if bytes.get(j) != Some(&b'#') {
                return Err(syntax(j, "expected `#` and an arity"));
            }
            let (k, a) = digits(j + 1);
            let a = a.ok_or_else(|| syntax(j + 1, "expected arity digits"))?;
            if a == 0 {
                return Err(syntax(j + 1, "predicate arity must be at least 1"));
            }
            out.push((start, Tok::Pred(n, a)));
            i = k;
        } else if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_alphanumeric() {
                j += 1;
            }
            match &text[i..j] {
                "all" => out.push((start, Tok::All)),
                "ex" => out.push((start, Tok::Ex)),
                w => return Err(syntax(start, format!("unknown word `{w}`"))),
            }
            i = j;
        } else {
            return Err(syntax(start, format!("unexpected character `{}`", text[i..].chars().next().unwrap())));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(at, format!("expected {what}"))),
        }
    }

    fn var(&mut self) -> Result<Var> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Var(n)) => Ok(Var(n)),
            _ => Err(syntax(at, "expected an individual variable")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::All | Tok::Ex) => self.quant(),
            _ => self.implication(),
        }
    }

    fn quant(&mut self) -> Result<Formula> {
        let q = match self.bump() {
            Some(Tok::All) => Quantifier::All,
            _ => Quantifier::Ex,
        };
        let at = self.here();
        let binder = match self.bump() {
            Some(Tok::Var(n)) => Binder::Ind(Var(n)),
            Some(Tok::Pred(i, a)) => Binder::Pred(PredVar::new(i, a)),
            _ => return Err(syntax(at, "expected a variable after the quantifier")),
        };
        self.expect(Tok::Dot, "`.` after the bound variable")?;
        let body = self.formula()?;
        Ok(Formula::Quant(q, binder, Box::new(body)))
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        let op = match self.peek() {
            Some(Tok::Implies) => BinOp::Implies,
            Some(Tok::Iff) => BinOp::Iff,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = match self.peek() {
            Some(Tok::All | Tok::Ex) => self.quant()?,
            _ => self.implication()?,
        };
        Ok(Formula::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.negation()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.negation()?;
            lhs = Formula::Bin(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Formula> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Formula::Not(Box::new(self.negation()?)))
            }
            Some(Tok::All | Tok::Ex) => self.quant(),
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Var(_)) => {
                let a = self.var()?;
                self.expect(Tok::Equals, "`=` after an individual variable")?;
                let b = self.var()?;
                Ok(Formula::Eq(a, b))
            }
            Some(Tok::Pred(i, a)) => {
                let p = PredVar::new(*i, *a);
                self.bump();
                self.expect(Tok::LParen, "`(` after a predicate variable")?;
                let mut args = vec![self.var()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    args.push(self.var()?);
                }
                self.expect(Tok::RParen, "`)` closing the argument list")?;
                if args.len() != p.arity as usize {
                    return Err(Error::ArityClash { index: p.index, arity: p.arity, found: args.len() });
                }
                Ok(Formula::Atom(p, args))
            }
            _ => Err(syntax(at, "expected a formula")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.here(), "unexpected trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let f = parse_formula("all x1. A1#1(x1)").unwrap();
        assert_eq!(f, Formula::all(1, Formula::atom(1, &[1])));
        let g = parse_formula("ex A1#2. A1#2(x1,x2) & ~(x1 = x2)").unwrap();
        assert_eq!(g, Formula::ex_pred(PredVar::new(1, 2), Formula::atom(1, &[1, 2]).and(Formula::eq(1, 2).not())));
        assert_eq!(parse_formula("A1#1(x1,x2)"), Err(Error::ArityClash { index: 1, arity: 1, found: 2 }));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("~x1 = x2 & x2 = x3 | x1 = x3 -> x1 = x1 <-> x2 = x2").unwrap();
        let expected = Formula::eq(1, 2)
            .not()
            .and(Formula::eq(2, 3))
            .or(Formula::eq(1, 3))
            .implies(Formula::eq(1, 1).iff(Formula::eq(2, 2)));
        assert_eq!(f, expected);
        let g = parse_formula("x1 = x1 | x2 = x2 | x3 = x3").unwrap();
        assert_eq!(g, Formula::eq(1, 1).or(Formula::eq(2, 2)).or(Formula::eq(3, 3)));
    }

    #[test]
    fn quantifier_scope_is_maximal() {
        let f = parse_formula("all x1. x1 = x2 -> x2 = x1").unwrap();
        assert_eq!(f, Formula::all(1, Formula::eq(1, 2).implies(Formula::eq(2, 1))));
        let g = parse_formula("x1 = x1 & ex x2. x2 = x1 | x2 = x2").unwrap();
        assert_eq!(g, Formula::eq(1, 1).and(Formula::ex(2, Formula::eq(2, 1).or(Formula::eq(2, 2)))));
    }

    #[test]
    fn round_trips() {
        for s in [
            "all x1. A1#1(x1)",
            "ex A1#2. A1#2(x1,x2) & ~x1 = x2",
            "(x1 = x2 -> x2 = x3) -> x1 = x3",
            "x1 = x1 & (ex x2. x2 = x1) & A3#3(x1,x2,x3)",
            "~(all A2#1. A2#1(x1)) <-> ~~x1 = x1",
            "x1 = x2 | (x2 = x3 | x3 = x1)",
        ] {
            let f = parse_formula(s).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{s} printed as {printed}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_formula("x1 = "),
            Err(Error::Syntax { pos: 5, msg: "expected an individual variable".into() })
        );
        assert!(matches!(parse_formula("x1 = x2 )"), Err(Error::Syntax { pos: 8, .. })));
        assert!(matches!(parse_formula("A1(x1)"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_formula("forall x1. x1 = x1"), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn free_variables() {
        let f = parse_formula("all x1. A1#2(x1,x2) & ex A1#2. A1#2(x3,x1)").unwrap();
        assert_eq!(f.free_individuals(), [Var(2), Var(3)].into());
        assert_eq!(f.free_predicates(), [PredVar::new(1, 2)].into());
        assert_eq!(f.depth(), 3);
    }
}
