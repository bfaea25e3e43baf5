//! Causal formulas: Boolean combinations of `[Y←y]φ` / `⟨Y←y⟩φ`, where `φ` is a Boolean
//! combination of atoms `X=x`.
//!
//! Concrete syntax:
//!
//! ```text
//! causal   := cterm { ("|"|"&") cterm }
//! cterm    := ["!"] ( "(" causal ")" | modal | basic )
//! modal    := ("[" ints "]" | "<" ints ">") bexpr
//! ints     := [ ident "<-" value { "," ident "<-" value } ]
//! bexpr    := bterm { ("|"|"&") bterm }
//! bterm    := ["!"] ( "(" bexpr ")" | ident "=" value )
//! ```
//!
//! `&` binds tighter than `|`. A modality-free part of a causal formula is read as a single
//! basic formula under the empty box, so `X=1 | Y=1` means `[](X=1 | Y=1)`. The body of a
//! modality extends over following `&`/`|` operands as long as they contain no modality.

mod eval;
mod parse;

use std::fmt;

use serde_json::{json, Value as Json};

use crate::signature::{Intervention, Signature, VarId};

pub use eval::{eval_basic, eval_full, eval_model, eval_partial, evaluate, Setting};
pub use parse::{parse_basic, parse_formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub var: VarId,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasicFormula {
    Atom(Atom),
    Not(Box<BasicFormula>),
    And(Box<BasicFormula>, Box<BasicFormula>),
    Or(Box<BasicFormula>, Box<BasicFormula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    /// `[Y←y]φ`: φ holds in every resulting state.
    Box,
    /// `⟨Y←y⟩φ`, shorthand for `¬[Y←y]¬φ`: φ holds in some resulting state.
    Diamond,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasicCausalFormula {
    pub intervention: Intervention,
    pub modality: Modality,
    pub body: BasicFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CausalFormula {
    Basic(BasicCausalFormula),
    Not(Box<CausalFormula>),
    And(Box<CausalFormula>, Box<CausalFormula>),
    Or(Box<CausalFormula>, Box<CausalFormula>),
}

impl BasicFormula {
    pub fn atom(var: VarId, value: usize) -> Self {
        BasicFormula::Atom(Atom { var, value })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        BasicFormula::Not(Box::new(self))
    }

    pub fn and(self, other: BasicFormula) -> Self {
        BasicFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: BasicFormula) -> Self {
        BasicFormula::Or(Box::new(self), Box::new(other))
    }

    /// Truth under an assignment given as a lookup from variable to value.
    pub fn holds(&self, value_of: &impl Fn(VarId) -> usize) -> bool {
        match self {
            BasicFormula::Atom(a) => value_of(a.var) == a.value,
            BasicFormula::Not(f) => !f.holds(value_of),
            BasicFormula::And(a, b) => a.holds(value_of) && b.holds(value_of),
            BasicFormula::Or(a, b) => a.holds(value_of) || b.holds(value_of),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        Printer { sig, node: Node::Basic(self) }
    }

    pub fn to_json(&self, sig: &Signature) -> Json {
        match self {
            BasicFormula::Atom(a) => json!({
                "node": "atom",
                "var": sig.name(a.var),
                "value": sig.value_name(a.var, a.value),
            }),
            BasicFormula::Not(f) => json!({"node": "not", "arg": f.to_json(sig)}),
            BasicFormula::And(a, b) => json!({"node": "and", "left": a.to_json(sig), "right": b.to_json(sig)}),
            BasicFormula::Or(a, b) => json!({"node": "or", "left": a.to_json(sig), "right": b.to_json(sig)}),
        }
    }
}

impl CausalFormula {
    /// `[i]φ`
    pub fn boxed(intervention: Intervention, body: BasicFormula) -> Self {
        CausalFormula::Basic(BasicCausalFormula { intervention, modality: Modality::Box, body })
    }

    /// `⟨i⟩φ`
    pub fn diamond(intervention: Intervention, body: BasicFormula) -> Self {
        CausalFormula::Basic(BasicCausalFormula { intervention, modality: Modality::Diamond, body })
    }

    /// The basic formula `φ` read as `[]φ`.
    pub fn basic(body: BasicFormula) -> Self {
        Self::boxed(Intervention::empty(), body)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CausalFormula::Not(Box::new(self))
    }

    pub fn and(self, other: CausalFormula) -> Self {
        CausalFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: CausalFormula) -> Self {
        CausalFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        Printer { sig, node: Node::Causal(self) }
    }

    pub fn to_json(&self, sig: &Signature) -> Json {
        match self {
            CausalFormula::Basic(b) => json!({
                "node": match b.modality { Modality::Box => "box", Modality::Diamond => "diamond" },
                "intervention": sig.intervention_json(&b.intervention),
                "body": b.body.to_json(sig),
            }),
            CausalFormula::Not(f) => json!({"node": "not", "arg": f.to_json(sig)}),
            CausalFormula::And(a, b) => json!({"node": "and", "left": a.to_json(sig), "right": b.to_json(sig)}),
            CausalFormula::Or(a, b) => json!({"node": "or", "left": a.to_json(sig), "right": b.to_json(sig)}),
        }
    }
}

enum Node<'a> {
    Basic(&'a BasicFormula),
    Causal(&'a CausalFormula),
}

struct Printer<'a> {
    sig: &'a Signature,
    node: Node<'a>,
}

// Precedence levels: `|` < `&` < prefix/atoms.
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Node::Basic(b) => write_basic(f, self.sig, b, OR),
            Node::Causal(CausalFormula::Basic(b)) if b.modality == Modality::Box && b.intervention.is_empty() => {
                write_basic(f, self.sig, &b.body, OR)
            }
            Node::Causal(c) => write_causal(f, self.sig, c, OR),
        }
    }
}

fn write_value(f: &mut fmt::Formatter<'_>, token: &str) -> fmt::Result {
    if parse::is_plain_value(token) {
        f.write_str(token)
    } else {
        f.write_str("\"")?;
        for c in token.chars() {
            if c == '"' || c == '\\' {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("\"")
    }
}

fn write_basic(f: &mut fmt::Formatter<'_>, sig: &Signature, node: &BasicFormula, min: u8) -> fmt::Result {
    let (prec, op) = match node {
        BasicFormula::Atom(a) => {
            write!(f, "{}=", sig.name(a.var))?;
            return write_value(f, sig.value_name(a.var, a.value));
        }
        BasicFormula::Not(inner) => {
            f.write_str("!")?;
            return write_basic(f, sig, inner, UNARY);
        }
        BasicFormula::And(..) => (AND, " & "),
        BasicFormula::Or(..) => (OR, " | "),
    };
    let (BasicFormula::And(a, b) | BasicFormula::Or(a, b)) = node else { unreachable!() };
    let paren = prec < min;
    if paren {
        f.write_str("(")?;
    }
    write_basic(f, sig, a, prec)?;
    f.write_str(op)?;
    write_basic(f, sig, b, prec + 1)?;
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

fn write_causal(f: &mut fmt::Formatter<'_>, sig: &Signature, node: &CausalFormula, min: u8) -> fmt::Result {
    let (prec, op) = match node {
        CausalFormula::Basic(b) => {
            let (open, close) = match b.modality {
                Modality::Box => ("[", "]"),
                Modality::Diamond => ("<", ">"),
            };
            f.write_str(open)?;
            for (i, &(v, x)) in b.intervention.pairs().iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}<-", sig.name(v))?;
                write_value(f, sig.value_name(v, x))?;
            }
            f.write_str(close)?;
            f.write_str(" ")?;
            // Binary bodies are always parenthesised so the body cannot absorb neighbours.
            return write_basic(f, sig, &b.body, UNARY);
        }
        CausalFormula::Not(inner) => {
            f.write_str("!")?;
            return write_causal(f, sig, inner, UNARY);
        }
        CausalFormula::And(..) => (AND, " & "),
        CausalFormula::Or(..) => (OR, " | "),
    };
    let (CausalFormula::And(a, b) | CausalFormula::Or(a, b)) = node else { unreachable!() };
    let paren = prec < min;
    if paren {
        f.write_str("(")?;
    }
    write_causal(f, sig, a, prec)?;
    f.write_str(op)?;
    write_causal(f, sig, b, prec + 1)?;
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}
