//! Graph simplifications, generalized functions, structural simplification of models and of
//! settings, and interventional extensions.

use std::collections::BTreeSet;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::graph::{Dag, Edge};
use crate::model::{MultiFunction, Nscm};
use crate::signature::{combinations, interventions_over, Context, Intervention, Signature, State, VarId, World};
use crate::value_set::ValueSet;

/// Graphs with more edges than this are not enumerated.
pub const MAX_ENUMERATED_EDGES: usize = 24;

/// A removal of edges whose every removed pair stops being ancestor/descendant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSimplification {
    pub base_graph: Dag,
    pub removed_edges: Vec<Edge>,
    pub result_graph: Dag,
}

impl GraphSimplification {
    /// Checks `removed` against `base` and builds the simplification.
    pub fn new(base: &Dag, removed: &[Edge]) -> Result<Self> {
        let mut removed = removed.to_vec();
        removed.sort();
        removed.dedup();
        if let Some(&(p, c)) = removed.iter().find(|&&(p, c)| !base.has_edge(p, c)) {
            return Err(Error::semantic(format!("edge #{}->#{} is not in the graph", p.0, c.0)));
        }
        let result = base.without_edges(&removed);
        if !removal_is_legal(&result, &removed) {
            return Err(Error::semantic("removal leaves a removed pair ancestrally connected"));
        }
        Ok(GraphSimplification { base_graph: base.clone(), removed_edges: removed, result_graph: result })
    }

    pub fn to_json(&self, sig: &Signature) -> Json {
        let edges: Vec<Json> = self.removed_edges.iter().map(|&(p, c)| json!([sig.name(p), sig.name(c)])).collect();
        json!({ "removed_edges": edges })
    }
}

fn removal_is_legal(result: &Dag, removed: &[Edge]) -> bool {
    removed.iter().all(|&(p, c)| !result.is_ancestor(p, c))
}

/// Whether `g2` is a structural simplification of `g1`: a subgraph in which no removed edge's
/// endpoints remain ancestor and descendant.
pub fn is_graph_simplification(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.node_count() != g2.node_count() {
        return Err(Error::semantic("graphs have different node sets"));
    }
    if !g2.is_subgraph_of(g1) {
        return Ok(false);
    }
    let removed: Vec<Edge> = g1.edges().into_iter().filter(|&(p, c)| !g2.has_edge(p, c)).collect();
    let anc2 = g2.ancestor_pairs();
    debug_assert!(anc2.is_subset(&g1.ancestor_pairs()));
    Ok(removed.iter().all(|e| !anc2.contains(e)))
}

/// All graph simplifications of `g`, ordered by number of removed edges and then
/// lexicographically by removed edge list.
pub fn enumerate_graph_simplifications(g: &Dag) -> Result<Vec<GraphSimplification>> {
    let edges = g.edges();
    if edges.len() > MAX_ENUMERATED_EDGES {
        return Err(Error::TooLarge(format!(
            "{} edges give 2^{} candidate removals (limit {MAX_ENUMERATED_EDGES} edges)",
            edges.len(),
            edges.len()
        )));
    }
    let mut out = Vec::new();
    for k in 0..=edges.len() {
        for removed in combinations(&edges, k) {
            let result = g.without_edges(&removed);
            if removal_is_legal(&result, &removed) {
                out.push(GraphSimplification { base_graph: g.clone(), removed_edges: removed, result_graph: result });
            }
        }
    }
    Ok(out)
}

/// Union of `f` over every completion of a partial assignment to its parents.
pub fn generalized_apply(f: &MultiFunction, partial: &[(VarId, usize)]) -> Result<ValueSet> {
    let mut fixed = Vec::with_capacity(partial.len());
    for &(v, x) in partial {
        let Some(k) = f.parents().iter().position(|p| *p == v) else {
            return Err(Error::semantic(format!("#{} is not a parent of the equation", v.0)));
        };
        fixed.push((k, x));
    }
    Ok(f.rows()
        .filter(|(vals, _)| fixed.iter().all(|&(k, x)| vals[k] == x))
        .fold(ValueSet::empty(), |acc, (_, out)| acc.union(out)))
}

/// The generalized form of `f` over the parent subset `keep` (sorted).
fn generalize(sig: &Signature, f: &MultiFunction, keep: &[VarId]) -> MultiFunction {
    let positions: Vec<usize> =
        keep.iter().map(|v| f.parents().iter().position(|p| p == v).expect("kept parents are parents")).collect();
    let rows: usize = keep.iter().map(|&v| sig.range_len(v)).product();
    let mut table = vec![ValueSet::empty(); rows];
    let mut projected = MultiFunction::new(sig, f.child(), keep.to_vec(), vec![ValueSet::singleton(0); rows])
        .expect("projection of a valid equation");
    for (vals, out) in f.rows() {
        let sub: Vec<usize> = positions.iter().map(|&k| vals[k]).collect();
        let r = projected.row_index(&sub);
        table[r] = table[r].union(out);
    }
    for (r, out) in table.into_iter().enumerate() {
        projected.set_row(r, out);
    }
    projected
}

/// Replaces each equation by its generalized form over the parents left in `gs.result_graph`.
pub fn structural_simplify(m: &Nscm, gs: &GraphSimplification) -> Result<Nscm> {
    if &gs.base_graph != m.graph() {
        return Err(Error::semantic("simplification was computed for a different graph"));
    }
    let sig = m.signature();
    let equations = m.equations().iter().map(|f| generalize(sig, f, gs.result_graph.parents(f.child()))).collect();
    Nscm::new(m.signature_arc().clone(), equations)
}

fn same_signature(m1: &Nscm, m2: &Nscm) -> Result<()> {
    if m1.signature() != m2.signature() {
        return Err(Error::semantic("models have different signatures"));
    }
    Ok(())
}

/// Whether `m2`'s graph simplifies `m1`'s and each of its equations is the generalized form
/// of `m1`'s.
pub fn is_structural_simplification(m1: &Nscm, m2: &Nscm) -> Result<bool> {
    same_signature(m1, m2)?;
    if !is_graph_simplification(m1.graph(), m2.graph())? {
        return Ok(false);
    }
    let sig = m1.signature();
    Ok(m1.equations().iter().zip(m2.equations()).all(|(f1, f2)| generalize(sig, f1, f2.parents()) == *f2))
}

/// Whether `(m2, w)` simplifies `(m1, w)`: the refinements at `w` are structural
/// simplifications. `w` must solve both models.
pub fn is_setting_simplification(m1: &Nscm, m2: &Nscm, w: &World) -> Result<bool> {
    same_signature(m1, m2)?;
    is_structural_simplification(&m1.refine(w)?, &m2.refine(w)?)
}

/// A context, intervention and state solving `m1` but not `m2` under that intervention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionViolation {
    pub context: Context,
    pub intervention: Intervention,
    pub state: State,
}

impl ExtensionViolation {
    pub fn to_json(&self, sig: &Signature) -> Json {
        json!({
            "context": sig.context_json(&self.context),
            "do": sig.intervention_json(&self.intervention),
            "state": sig.state_json(&self.state),
        })
    }
}

/// Number of (context, intervention) pairs an extension check visits.
pub fn intervention_space(sig: &Signature) -> u128 {
    let interventions: u128 = sig.endogenous().map(|v| sig.range_len(v) as u128 + 1).product();
    interventions * sig.context_count() as u128
}

/// First (context, intervention) in canonical order where `m1` has a solution `m2` lacks.
pub fn extension_violation(m1: &Nscm, m2: &Nscm) -> Result<Option<ExtensionViolation>> {
    same_signature(m1, m2)?;
    let sig = m1.signature();
    let endo: Vec<VarId> = sig.endogenous().collect();
    for intervention in interventions_over(sig, &endo) {
        let (a, b) = (m1.intervene(&intervention), m2.intervene(&intervention));
        for u in sig.contexts() {
            let wider: BTreeSet<State> = b.solutions(&u).into_iter().collect();
            if let Some(state) = a.solutions(&u).into_iter().find(|s| !wider.contains(s)) {
                return Ok(Some(ExtensionViolation { context: u, intervention, state }));
            }
        }
    }
    Ok(None)
}

/// Whether every interventionist possibility of `m1` is one of `m2`: solution sets are
/// included for every context and every intervention.
pub fn is_interventional_extension(m1: &Nscm, m2: &Nscm) -> Result<bool> {
    Ok(extension_violation(m1, m2)?.is_none())
}
