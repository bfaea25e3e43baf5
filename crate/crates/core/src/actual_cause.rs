//! Actual causation: counterfactual dependence in some structural simplification of the
//! actual setting, decided by enumerating graph simplifications.

use std::fmt::Write as _;

use serde_json::{json, Value as Json};

use crate::dependence::{cf_depends_star_with, DependenceWitness};
use crate::error::{Error, Result};
use crate::formula::Atom;
use crate::graph::{fmt_edge_list, Edge};
use crate::model::Nscm;
use crate::signature::{State, World};
use crate::simplification::{
    enumerate_graph_simplifications, is_setting_simplification, structural_simplify, GraphSimplification,
};

/// Is `cause` an actual cause of `effect` in `(model, world)`?
#[derive(Debug, Clone)]
pub struct CauseQuery {
    pub model: Nscm,
    pub world: World,
    pub cause: Atom,
    pub effect: Atom,
}

impl CauseQuery {
    /// Checks that cause and effect are distinct endogenous atoms true in `world`, and that
    /// `world` solves `model`.
    pub fn new(model: Nscm, world: World, cause: Atom, effect: Atom) -> Result<Self> {
        let sig = model.signature();
        for a in [cause, effect] {
            if a.var.0 >= sig.len() {
                return Err(Error::UnknownVariable(format!("#{}", a.var.0)));
            }
            if !sig.is_endogenous(a.var) {
                return Err(Error::NotEndogenous(sig.name(a.var).to_string()));
            }
            if a.value >= sig.range_len(a.var) {
                return Err(Error::ValueOutOfRange {
                    var: sig.name(a.var).to_string(),
                    value: format!("#{}", a.value),
                });
            }
        }
        if cause.var == effect.var {
            return Err(Error::semantic("cause and effect must be different variables"));
        }
        model.require_solution(&world)?;
        for a in [cause, effect] {
            if world.get(a.var) != a.value {
                return Err(Error::semantic(format!(
                    "`{}={}` is false in the actual world",
                    sig.name(a.var),
                    sig.value_name(a.var, a.value)
                )));
            }
        }
        Ok(CauseQuery { model, world, cause, effect })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CauseOptions {
    /// Skip simplifications in which the cause is no longer an ancestor of the effect.
    pub prune: bool,
    /// Only try alternative cause values different from the actual one.
    pub require_distinct: bool,
}

impl Default for CauseOptions {
    fn default() -> Self {
        CauseOptions { prune: true, require_distinct: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseWitness {
    pub removed_edges: Vec<Edge>,
    pub simplified_model: Nscm,
    pub x_alt: usize,
    pub counterfactual_solution: State,
}

/// All witnesses, fewest removed edges first. The verdict is true iff the list is nonempty.
pub fn actual_cause(q: &CauseQuery, opts: CauseOptions) -> Result<Vec<CauseWitness>> {
    let (x, y) = (q.cause, q.effect);
    let mut out = Vec::new();
    for gs in enumerate_graph_simplifications(q.model.graph())? {
        if opts.prune && !gs.result_graph.is_ancestor(x.var, y.var) {
            continue;
        }
        let m3 = structural_simplify(&q.model, &gs)?;
        if !is_setting_simplification(&q.model, &m3, &q.world)? {
            continue;
        }
        if let Some(wit) = cf_depends_star_with(&m3, &q.world, x.var, x.value, y.var, y.value, opts.require_distinct)? {
            out.push(CauseWitness {
                removed_edges: gs.removed_edges,
                simplified_model: m3,
                x_alt: wit.x_alt,
                counterfactual_solution: wit.counterfactual_solution.expect("counterfactual notions carry one"),
            });
        }
    }
    Ok(out)
}

/// Every graph simplification whose structural simplification is a setting simplification
/// at `w`, with the simplified model.
pub fn list_setting_simplifications(m: &Nscm, w: &World) -> Result<Vec<(GraphSimplification, Nscm)>> {
    m.require_solution(w)?;
    let mut out = Vec::new();
    for gs in enumerate_graph_simplifications(m.graph())? {
        let m2 = structural_simplify(m, &gs)?;
        if is_setting_simplification(m, &m2, w)? {
            out.push((gs, m2));
        }
    }
    Ok(out)
}

/// Verdict, plain counterfactual dependence, and witnesses for a query.
#[derive(Debug, Clone)]
pub struct CauseReport {
    pub verdict: bool,
    pub plain_dependence: Option<DependenceWitness>,
    pub witnesses: Vec<CauseWitness>,
}

pub fn explain(q: &CauseQuery, opts: CauseOptions) -> Result<CauseReport> {
    let (x, y) = (q.cause, q.effect);
    let plain = cf_depends_star_with(&q.model, &q.world, x.var, x.value, y.var, y.value, opts.require_distinct)?;
    let witnesses = actual_cause(q, opts)?;
    Ok(CauseReport { verdict: !witnesses.is_empty(), plain_dependence: plain, witnesses })
}

impl CauseReport {
    pub fn to_json(&self, q: &CauseQuery) -> Json {
        let sig = q.model.signature();
        let witnesses: Vec<Json> = self
            .witnesses
            .iter()
            .map(|w| {
                let removed: Vec<Json> =
                    w.removed_edges.iter().map(|&(p, c)| json!([sig.name(p), sig.name(c)])).collect();
                json!({
                    "removed_edges": removed,
                    "x_alt": sig.value_name(q.cause.var, w.x_alt),
                    "counterfactual_solution": sig.state_json(&w.counterfactual_solution),
                    "simplified_model": serde_json::to_value(w.simplified_model.to_doc()).expect("plain data"),
                })
            })
            .collect();
        json!({
            "verdict": self.verdict,
            "plain_dependence": self.plain_dependence.as_ref().map(|d| d.to_json(sig)),
            "witnesses": witnesses,
        })
    }

    pub fn render(&self, q: &CauseQuery, show_witnesses: bool) -> String {
        let sig = q.model.signature();
        let atom = |a: Atom| format!("{}={}", sig.name(a.var), sig.value_name(a.var, a.value));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} is {}an actual cause of {}",
            atom(q.cause),
            if self.verdict { "" } else { "not " },
            atom(q.effect)
        );
        match &self.plain_dependence {
            Some(d) => {
                let _ = writeln!(s, "plain counterfactual dependence: {}", d.describe(sig));
            }
            None => {
                let _ = writeln!(s, "no plain counterfactual dependence");
            }
        }
        let _ = writeln!(s, "witnesses: {}", self.witnesses.len());
        if show_witnesses {
            for w in &self.witnesses {
                let removed = if w.removed_edges.is_empty() {
                    "nothing".to_string()
                } else {
                    fmt_edge_list(sig, &w.removed_edges)
                };
                let _ = writeln!(
                    s,
                    "  remove {removed}: {}<-{} admits ({})",
                    sig.name(q.cause.var),
                    sig.value_name(q.cause.var, w.x_alt),
                    sig.fmt_state(&w.counterfactual_solution)
                );
            }
        }
        s
    }
}
