//! Variables, their ranges, and total or partial assignments over them.
//!
//! Variables are addressed by [`VarId`], their position in declaration order with all
//! exogenous variables first. Values are addressed by their position within the
//! variable's declared range; the string tokens only appear at the edges (parsing,
//! printing, JSON).

use std::collections::HashMap;
use std::fmt;

use serde_json::{Map, Value as Json};

use crate::error::{Error, Result};
use crate::value_set::MAX_RANGE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub range: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Signature {
    vars: Vec<Variable>,
    n_exo: usize,
    index: HashMap<String, VarId>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.n_exo == other.n_exo && self.vars == other.vars
    }
}

impl Eq for Signature {}

impl Signature {
    /// Builds a signature from `(name, range)` declarations.
    pub fn new<S: Into<String>>(
        exogenous: impl IntoIterator<Item = (S, Vec<S>)>,
        endogenous: impl IntoIterator<Item = (S, Vec<S>)>,
    ) -> Result<Self> {
        let mut vars = Vec::new();
        for (name, range) in exogenous {
            vars.push(Variable {
                name: name.into(),
                kind: VarKind::Exogenous,
                range: range.into_iter().map(Into::into).collect(),
            });
        }
        let n_exo = vars.len();
        for (name, range) in endogenous {
            vars.push(Variable {
                name: name.into(),
                kind: VarKind::Endogenous,
                range: range.into_iter().map(Into::into).collect(),
            });
        }
        let problems = Self::check(&vars);
        if let Some(p) = problems.into_iter().next() {
            return Err(Error::semantic(p));
        }
        let index = vars.iter().enumerate().map(|(i, v)| (v.name.clone(), VarId(i))).collect();
        Ok(Signature { vars, n_exo, index })
    }

    pub(crate) fn check(vars: &[Variable]) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        for v in vars {
            if seen.insert(v.name.as_str(), ()).is_some() {
                out.push(format!("variable `{}` is declared twice", v.name));
            }
            if !is_identifier(&v.name) {
                out.push(format!("`{}` is not a valid variable name", v.name));
            }
            if v.range.is_empty() {
                out.push(format!("variable `{}` has an empty range", v.name));
            }
            if v.range.len() > MAX_RANGE {
                out.push(format!(
                    "variable `{}` has {} values; at most {MAX_RANGE} are supported",
                    v.name,
                    v.range.len()
                ));
            }
            let mut tokens = HashMap::new();
            for t in &v.range {
                if tokens.insert(t.as_str(), ()).is_some() {
                    out.push(format!("value `{t}` appears twice in the range of `{}`", v.name));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn n_exogenous(&self) -> usize {
        self.n_exo
    }

    pub fn n_endogenous(&self) -> usize {
        self.vars.len() - self.n_exo
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len()).map(VarId)
    }

    pub fn exogenous(&self) -> impl Iterator<Item = VarId> {
        (0..self.n_exo).map(VarId)
    }

    pub fn endogenous(&self) -> impl Iterator<Item = VarId> {
        (self.n_exo..self.vars.len()).map(VarId)
    }

    pub fn variable(&self, v: VarId) -> &Variable {
        &self.vars[v.0]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.0].name
    }

    pub fn range_len(&self, v: VarId) -> usize {
        self.vars[v.0].range.len()
    }

    pub fn value_name(&self, v: VarId, value: usize) -> &str {
        &self.vars[v.0].range[value]
    }

    pub fn is_exogenous(&self, v: VarId) -> bool {
        v.0 < self.n_exo
    }

    pub fn is_endogenous(&self, v: VarId) -> bool {
        v.0 >= self.n_exo && v.0 < self.vars.len()
    }

    pub fn lookup(&self, name: &str) -> Result<VarId> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn lookup_endogenous(&self, name: &str) -> Result<VarId> {
        let v = self.lookup(name)?;
        if self.is_exogenous(v) {
            return Err(Error::NotEndogenous(name.to_string()));
        }
        Ok(v)
    }

    pub fn value_index(&self, v: VarId, token: &str) -> Result<usize> {
        self.vars[v.0]
            .range
            .iter()
            .position(|t| t == token)
            .ok_or_else(|| Error::ValueOutOfRange { var: self.name(v).to_string(), value: token.to_string() })
    }

    /// Parses `A=1,B=0` (whitespace tolerated, empty string allowed) into resolved pairs.
    pub fn parse_pairs(&self, text: &str) -> Result<Vec<(VarId, usize)>> {
        let mut out: Vec<(VarId, usize)> = Vec::new();
        for (offset, item) in split_items(text) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse { pos: offset, msg: format!("expected `NAME=VALUE`, found `{item}`") })?;
            let var = self.lookup(name.trim())?;
            let val = self.value_index(var, value.trim())?;
            if out.iter().any(|(w, _)| *w == var) {
                return Err(Error::semantic(format!("variable `{}` is assigned twice", self.name(var))));
            }
            out.push((var, val));
        }
        Ok(out)
    }

    /// Resolves a total assignment to the exogenous variables.
    pub fn context_from_pairs(&self, pairs: &[(VarId, usize)]) -> Result<Context> {
        let vals = self.total_over(pairs, self.exogenous(), "context")?;
        Ok(Context(vals))
    }

    /// Resolves a total assignment to the endogenous variables.
    pub fn state_from_pairs(&self, pairs: &[(VarId, usize)]) -> Result<State> {
        let vals = self.total_over(pairs, self.endogenous(), "state")?;
        Ok(State(vals))
    }

    pub fn parse_context(&self, text: &str) -> Result<Context> {
        self.context_from_pairs(&self.parse_pairs(text)?)
    }

    pub fn parse_state(&self, text: &str) -> Result<State> {
        self.state_from_pairs(&self.parse_pairs(text)?)
    }

    pub fn parse_intervention(&self, text: &str) -> Result<Intervention> {
        Intervention::new(self, self.parse_pairs(text)?)
    }

    fn total_over(
        &self,
        pairs: &[(VarId, usize)],
        domain: impl Iterator<Item = VarId>,
        what: &str,
    ) -> Result<Vec<usize>> {
        let domain: Vec<VarId> = domain.collect();
        for (v, _) in pairs {
            if !domain.contains(v) {
                return Err(Error::semantic(format!("`{}` cannot appear in a {what}", self.name(*v))));
            }
        }
        domain
            .iter()
            .map(|d| {
                pairs
                    .iter()
                    .find(|(v, _)| v == d)
                    .map(|(_, x)| *x)
                    .ok_or_else(|| Error::semantic(format!("{what} does not assign `{}`", self.name(*d))))
            })
            .collect()
    }

    /// Number of contexts, i.e. the size of the product of exogenous ranges.
    pub fn context_count(&self) -> usize {
        self.exogenous().map(|v| self.range_len(v)).product()
    }

    /// All contexts in lexicographic order.
    pub fn contexts(&self) -> impl Iterator<Item = Context> + '_ {
        Odometer::new(self.exogenous().map(|v| self.range_len(v)).collect()).map(Context)
    }

    /// All states in lexicographic order.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        Odometer::new(self.endogenous().map(|v| self.range_len(v)).collect()).map(State)
    }

    pub fn fmt_pairs(&self, pairs: impl IntoIterator<Item = (VarId, usize)>) -> String {
        pairs
            .into_iter()
            .map(|(v, x)| format!("{}={}", self.name(v), self.value_name(v, x)))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn fmt_context(&self, c: &Context) -> String {
        self.fmt_pairs(self.exogenous().zip(c.0.iter().copied()))
    }

    pub fn fmt_state(&self, s: &State) -> String {
        self.fmt_pairs(self.endogenous().zip(s.0.iter().copied()))
    }

    pub fn fmt_world(&self, w: &World) -> String {
        self.fmt_pairs(self.vars().zip(w.values().iter().copied()))
    }

    pub(crate) fn pairs_json(&self, pairs: impl IntoIterator<Item = (VarId, usize)>) -> Json {
        let mut m = Map::new();
        for (v, x) in pairs {
            m.insert(self.name(v).to_string(), Json::String(self.value_name(v, x).to_string()));
        }
        Json::Object(m)
    }

    /// Flat `name → value` JSON object.
    pub fn context_json(&self, c: &Context) -> Json {
        self.pairs_json(self.exogenous().zip(c.0.iter().copied()))
    }

    pub fn state_json(&self, s: &State) -> Json {
        self.pairs_json(self.endogenous().zip(s.0.iter().copied()))
    }

    pub fn intervention_json(&self, i: &Intervention) -> Json {
        self.pairs_json(i.pairs().iter().copied())
    }

    /// Reads a flat `name → value` JSON object.
    pub fn pairs_from_json(&self, json: &Json) -> Result<Vec<(VarId, usize)>> {
        let obj = json.as_object().ok_or_else(|| Error::semantic("expected a JSON object of name/value pairs"))?;
        obj.iter()
            .map(|(k, v)| {
                let var = self.lookup(k)?;
                let tok =
                    v.as_str().ok_or_else(|| Error::semantic(format!("value of `{k}` must be a string token")))?;
                Ok((var, self.value_index(var, tok)?))
            })
            .collect()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn split_items(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split(',').filter_map(move |item| {
        let here = offset;
        offset += item.len() + 1;
        let trimmed = item.trim();
        (!trimmed.is_empty()).then_some((here, trimmed))
    })
}

/// Values of the exogenous variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context(pub Vec<usize>);

/// Values of the endogenous variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub Vec<usize>);

impl State {
    pub fn get(&self, sig: &Signature, v: VarId) -> usize {
        self.0[v.0 - sig.n_exogenous()]
    }
}

/// A total assignment to every variable: a context followed by a state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World {
    values: Vec<usize>,
    n_exo: usize,
}

impl World {
    pub fn new(context: &Context, state: &State) -> Self {
        let mut values = context.0.clone();
        values.extend_from_slice(&state.0);
        World { values, n_exo: context.0.len() }
    }

    /// Resolves and range-checks a world against `sig`.
    pub fn checked(sig: &Signature, context: Context, state: State) -> Result<Self> {
        if context.0.len() != sig.n_exogenous() || state.0.len() != sig.n_endogenous() {
            return Err(Error::semantic("world is not total over the signature"));
        }
        let w = World::new(&context, &state);
        for v in sig.vars() {
            if w.get(v) >= sig.range_len(v) {
                return Err(Error::ValueOutOfRange { var: sig.name(v).to_string(), value: format!("#{}", w.get(v)) });
            }
        }
        Ok(w)
    }

    pub fn get(&self, v: VarId) -> usize {
        self.values[v.0]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn context(&self) -> Context {
        Context(self.values[..self.n_exo].to_vec())
    }

    pub fn state(&self) -> State {
        State(self.values[self.n_exo..].to_vec())
    }
}

/// `Y1←y1, …, Yk←yk` over distinct endogenous variables, kept sorted by variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Intervention(Vec<(VarId, usize)>);

impl Intervention {
    pub fn empty() -> Self {
        Intervention(Vec::new())
    }

    pub fn new(sig: &Signature, mut pairs: Vec<(VarId, usize)>) -> Result<Self> {
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::semantic(format!("variable `{}` is intervened on twice", sig.name(w[0].0))));
            }
        }
        for &(v, x) in &pairs {
            if v.0 >= sig.len() {
                return Err(Error::UnknownVariable(format!("#{}", v.0)));
            }
            if !sig.is_endogenous(v) {
                return Err(Error::NotEndogenous(sig.name(v).to_string()));
            }
            if x >= sig.range_len(v) {
                return Err(Error::ValueOutOfRange { var: sig.name(v).to_string(), value: format!("#{x}") });
            }
        }
        Ok(Intervention(pairs))
    }

    /// Builds from pairs already known to be valid and distinct.
    pub(crate) fn from_sorted(pairs: Vec<(VarId, usize)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Intervention(pairs)
    }

    pub fn pairs(&self) -> &[(VarId, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: VarId) -> Option<usize> {
        self.0.iter().find(|(w, _)| *w == v).map(|(_, x)| *x)
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.get(v).is_some()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    /// Combines two interventions over disjoint variables.
    pub fn merged(&self, other: &Intervention) -> Result<Intervention> {
        if let Some(v) = other.vars().find(|v| self.contains(*v)) {
            return Err(Error::semantic(format!("interventions overlap on variable #{}", v.0)));
        }
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&other.0);
        pairs.sort();
        Ok(Intervention(pairs))
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        DisplayIntervention { int: self, sig }
    }
}

struct DisplayIntervention<'a> {
    int: &'a Intervention,
    sig: &'a Signature,
}

impl fmt::Display for DisplayIntervention<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(v, x)) in self.int.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}<-{}", self.sig.name(v), self.sig.value_name(v, x))?;
        }
        Ok(())
    }
}

/// Every assignment to the given variables, ordered by size of the intervened set and then
/// lexicographically by variables and values.
pub fn interventions_over(sig: &Signature, vars: &[VarId]) -> Vec<Intervention> {
    let mut vars = vars.to_vec();
    vars.sort();
    let mut out = Vec::new();
    for k in 0..=vars.len() {
        for subset in combinations(&vars, k) {
            let radices: Vec<usize> = subset.iter().map(|v| sig.range_len(*v)).collect();
            for vals in Odometer::new(radices) {
                out.push(Intervention::from_sorted(subset.iter().copied().zip(vals).collect()));
            }
        }
    }
    out
}

/// All k-element subsets of `items`, in lexicographic order of positions.
pub(crate) fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Mixed-radix counter; yields every tuple with `t[i] < radices[i]`, last position fastest.
/// An empty radix list yields a single empty tuple.
#[derive(Debug, Clone)]
pub struct Odometer {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Odometer {
    pub fn new(radices: Vec<usize>) -> Self {
        let next = if radices.contains(&0) { None } else { Some(vec![0; radices.len()]) };
        Odometer { radices, next }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(cur)
    }
}
