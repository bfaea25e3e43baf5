use super::{Atom, BasicCausalFormula, BasicFormula, CausalFormula, Modality};
use crate::error::{Error, Result};
use crate::signature::{Intervention, Signature};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Value(String),
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    Arrow,
    Eq,
    Comma,
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Value(s) => format!("value `{s}`"),
        Tok::End => "end of input".to_string(),
        other => format!("`{}`", symbol(other)),
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::LAngle => "<",
        Tok::RAngle => ">",
        Tok::Arrow => "<-",
        Tok::Eq => "=",
        Tok::Comma => ",",
        Tok::Bang => "!",
        Tok::Amp => "&",
        Tok::Pipe => "|",
        Tok::LParen => "(",
        Tok::RParen => ")",
        _ => "",
    }
}

const RESERVED: &str = "()[]<>,&|!=\"";

fn is_value_char(c: char) -> bool {
    !c.is_whitespace() && !RESERVED.contains(c)
}

/// Whether `token` can be written without quotes.
pub(crate) fn is_plain_value(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_value_char)
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut want_value = false;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if want_value {
            want_value = false;
            if c == '"' {
                let mut s = String::new();
                i += 1;
                loop {
                    let Some(&(_, d)) = chars.get(i) else {
                        return Err(parse_err(pos, "unterminated quoted value"));
                    };
                    i += 1;
                    match d {
                        '"' => break,
                        '\\' => {
                            let Some(&(_, e)) = chars.get(i) else {
                                return Err(parse_err(pos, "unterminated quoted value"));
                            };
                            s.push(e);
                            i += 1;
                        }
                        _ => s.push(d),
                    }
                }
                out.push((pos, Tok::Value(s)));
                continue;
            }
            if is_value_char(c) {
                let start = i;
                while i < chars.len() && is_value_char(chars[i].1) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, ch)| ch).collect();
                out.push((pos, Tok::Value(s)));
                continue;
            }
            return Err(parse_err(pos, format!("expected a value, found `{c}`")));
        }
        let tok = match c {
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '>' => Tok::RAngle,
            ',' => Tok::Comma,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => {
                want_value = true;
                Tok::Eq
            }
            '<' if chars.get(i + 1).map(|p| p.1) == Some('-') => {
                i += 1;
                want_value = true;
                Tok::Arrow
            }
            '<' => Tok::LAngle,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, ch)| ch).collect();
                out.push((pos, Tok::Ident(s)));
                continue;
            }
            other => return Err(parse_err(pos, format!("unexpected character `{other}`"))),
        };
        out.push((pos, tok));
        i += 1;
    }
    if want_value {
        return Err(parse_err(text.len(), "expected a value, found end of input"));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// Parse tree before modality-free parts are collapsed.
enum Expr {
    Atom(Atom),
    Modal(BasicCausalFormula),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn has_modal(&self) -> bool {
        match self {
            Expr::Atom(_) => false,
            Expr::Modal(_) => true,
            Expr::Not(e) => e.has_modal(),
            Expr::And(a, b) | Expr::Or(a, b) => a.has_modal() || b.has_modal(),
        }
    }

    fn into_basic(self) -> BasicFormula {
        match self {
            Expr::Atom(a) => BasicFormula::Atom(a),
            Expr::Not(e) => e.into_basic().not(),
            Expr::And(a, b) => a.into_basic().and(b.into_basic()),
            Expr::Or(a, b) => a.into_basic().or(b.into_basic()),
            Expr::Modal(_) => unreachable!("checked by has_modal"),
        }
    }

    fn into_causal(self) -> CausalFormula {
        if !self.has_modal() {
            return CausalFormula::basic(self.into_basic());
        }
        match self {
            Expr::Modal(m) => CausalFormula::Basic(m),
            Expr::Not(e) => e.into_causal().not(),
            Expr::And(a, b) => a.into_causal().and(b.into_causal()),
            Expr::Or(a, b) => a.into_causal().or(b.into_causal()),
            Expr::Atom(_) => unreachable!("atoms have no modality"),
        }
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(sig: &'a Signature, text: &str) -> Result<Self> {
        Ok(Parser { sig, toks: lex(text)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(parse_err(self.pos(), format!("expected `{}`, found {}", symbol(&want), describe(self.peek()))))
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(parse_err(self.pos(), format!("unexpected {}", describe(t)))),
        }
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) => Ok((pos, s)),
            t => Err(parse_err(pos, format!("expected a variable name, found {}", describe(&t)))),
        }
    }

    fn value(&mut self) -> Result<(usize, String)> {
        let pos = self.pos();
        match self.bump() {
            Tok::Value(s) => Ok((pos, s)),
            t => Err(parse_err(pos, format!("expected a value, found {}", describe(&t)))),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let (_, name) = self.ident()?;
        let var = self.sig.lookup_endogenous(&name)?;
        self.expect(Tok::Eq)?;
        let (_, value) = self.value()?;
        let value = self.sig.value_index(var, &value)?;
        Ok(Atom { var, value })
    }

    // causal := cand { "|" cand }
    fn causal(&mut self) -> Result<Expr> {
        let mut lhs = self.causal_and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.causal_and()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn causal_and(&mut self) -> Result<Expr> {
        let mut lhs = self.cterm()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.cterm()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cterm(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::Not(Box::new(self.cterm()?)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.causal()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrack | Tok::LAngle => Ok(Expr::Modal(self.modal()?)),
            _ => Ok(Expr::Atom(self.atom()?)),
        }
    }

    fn modal(&mut self) -> Result<BasicCausalFormula> {
        let (modality, close) = match self.bump() {
            Tok::LBrack => (Modality::Box, Tok::RBrack),
            Tok::LAngle => (Modality::Diamond, Tok::RAngle),
            _ => unreachable!("caller checked the opening bracket"),
        };
        let mut pairs = Vec::new();
        if *self.peek() != close {
            loop {
                let (_, name) = self.ident()?;
                let var = self.sig.lookup_endogenous(&name)?;
                self.expect(Tok::Arrow)?;
                let (_, value) = self.value()?;
                pairs.push((var, self.sig.value_index(var, &value)?));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(close)?;
        let intervention = Intervention::new(self.sig, pairs)?;
        let body = self.bexpr(true)?;
        Ok(BasicCausalFormula { intervention, modality, body })
    }

    /// Whether the operand starting at the current token is free of modalities. Used by
    /// modality bodies to decide whether a following `&`/`|` still belongs to them.
    fn operand_is_basic(&self, from: usize) -> bool {
        let mut i = from;
        while self.toks[i].1 == Tok::Bang {
            i += 1;
        }
        match self.toks[i].1 {
            Tok::LBrack | Tok::LAngle => false,
            Tok::LParen => {
                let mut depth = 0usize;
                for (_, t) in &self.toks[i..] {
                    match t {
                        Tok::LParen => depth += 1,
                        Tok::RParen => {
                            depth -= 1;
                            if depth == 0 {
                                return true;
                            }
                        }
                        Tok::LBrack | Tok::LAngle => return false,
                        _ => {}
                    }
                }
                true
            }
            _ => true,
        }
    }

    /// `bexpr`. In a modality body (`in_body`), stops before an operator whose right operand
    /// contains a modality.
    fn bexpr(&mut self, in_body: bool) -> Result<BasicFormula> {
        let mut lhs = self.band(in_body)?;
        while *self.peek() == Tok::Pipe && (!in_body || self.operand_is_basic(self.at + 1)) {
            self.bump();
            lhs = lhs.or(self.band(in_body)?);
        }
        Ok(lhs)
    }

    fn band(&mut self, in_body: bool) -> Result<BasicFormula> {
        let mut lhs = self.bterm()?;
        while *self.peek() == Tok::Amp && (!in_body || self.operand_is_basic(self.at + 1)) {
            self.bump();
            lhs = lhs.and(self.bterm()?);
        }
        Ok(lhs)
    }

    fn bterm(&mut self) -> Result<BasicFormula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(self.bterm()?.not())
            }
            Tok::LParen => {
                self.bump();
                let e = self.bexpr(false)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrack | Tok::LAngle => {
                Err(parse_err(self.pos(), "nested modality: a modality body must be a basic formula"))
            }
            _ => Ok(BasicFormula::Atom(self.atom()?)),
        }
    }
}

/// Parses a causal formula over `sig`. Variables must be endogenous.
pub fn parse_formula(sig: &Signature, text: &str) -> Result<CausalFormula> {
    let mut p = Parser::new(sig, text)?;
    let e = p.causal()?;
    p.finish()?;
    Ok(e.into_causal())
}

/// Parses a modality-free formula over `sig`.
pub fn parse_basic(sig: &Signature, text: &str) -> Result<BasicFormula> {
    let mut p = Parser::new(sig, text)?;
    let f = p.bexpr(false)?;
    p.finish()?;
    Ok(f)
}
