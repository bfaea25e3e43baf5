//! Nondeterministic structural causal models with tabular multi-valued equations.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::signature::{Context, Intervention, Odometer, Signature, State, VarId, World};
use crate::value_set::ValueSet;

/// Set-valued equation for one endogenous variable, stored as a dense table indexed by
/// parent assignments in lexicographic order (last parent fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiFunction {
    child: VarId,
    parents: Vec<VarId>,
    radices: Vec<usize>,
    strides: Vec<usize>,
    table: Vec<ValueSet>,
}

impl MultiFunction {
    /// `parents` must be sorted and distinct; `table` must have one nonempty entry per
    /// parent assignment, each a subset of the child's range.
    pub fn new(sig: &Signature, child: VarId, parents: Vec<VarId>, table: Vec<ValueSet>) -> Result<Self> {
        if !sig.is_endogenous(child) {
            return Err(Error::NotEndogenous(sig.name(child).to_string()));
        }
        if parents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::semantic(format!(
                "parents of `{}` must be distinct and in declaration order",
                sig.name(child)
            )));
        }
        if parents.contains(&child) {
            return Err(Error::semantic(format!("`{}` lists itself as a parent", sig.name(child))));
        }
        let radices: Vec<usize> = parents.iter().map(|p| sig.range_len(*p)).collect();
        let rows: usize = radices.iter().product();
        if table.len() != rows {
            return Err(Error::semantic(format!(
                "equation for `{}` has {} rows, expected {rows}",
                sig.name(child),
                table.len()
            )));
        }
        let full = ValueSet::full(sig.range_len(child));
        if let Some(i) = table.iter().position(|s| s.is_empty() || !s.is_subset(full)) {
            return Err(Error::semantic(format!(
                "equation for `{}` has an empty or out-of-range output at row {i}",
                sig.name(child)
            )));
        }
        Ok(Self::from_parts(child, parents, radices, table))
    }

    fn from_parts(child: VarId, parents: Vec<VarId>, radices: Vec<usize>, table: Vec<ValueSet>) -> Self {
        let mut strides = vec![1; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        MultiFunction { child, parents, radices, strides, table }
    }

    /// Parentless equation with a fixed output set.
    pub fn constant(child: VarId, out: ValueSet) -> Self {
        Self::from_parts(child, Vec::new(), Vec::new(), vec![out])
    }

    pub fn child(&self) -> VarId {
        self.child
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn table(&self) -> &[ValueSet] {
        &self.table
    }

    pub fn row_count(&self) -> usize {
        self.table.len()
    }

    /// Row index of a tuple of parent values (in `parents()` order).
    pub fn row_index(&self, parent_values: &[usize]) -> usize {
        parent_values.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    /// Row index selected by a full world, given as values indexed by variable.
    pub fn row_of(&self, values: &[usize]) -> usize {
        self.parents.iter().zip(&self.strides).map(|(p, s)| values[p.0] * s).sum()
    }

    pub fn row_values(&self, row: usize) -> Vec<usize> {
        self.strides.iter().zip(&self.radices).map(|(s, r)| (row / s) % r).collect()
    }

    /// Output set for the parent values found in `values` (indexed by variable).
    pub fn apply(&self, values: &[usize]) -> ValueSet {
        self.table[self.row_of(values)]
    }

    pub fn output(&self, parent_values: &[usize]) -> ValueSet {
        self.table[self.row_index(parent_values)]
    }

    /// Rows as (parent values, output), in lexicographic order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<usize>, ValueSet)> + '_ {
        Odometer::new(self.radices.clone()).zip(self.table.iter().copied())
    }

    pub fn is_deterministic(&self) -> bool {
        self.table.iter().all(|s| s.is_singleton())
    }

    pub(crate) fn set_row(&mut self, row: usize, out: ValueSet) {
        self.table[row] = out;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    /// The offending edge for edge-relevance lints.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<(String, String)>,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), edge: None }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => write!(f, "error: {}", self.message),
            Severity::Warning => write!(f, "warning: {}", self.message),
        }
    }
}

/// A nondeterministic structural causal model over a finite signature.
///
/// The graph is always the one induced by the equations' parent lists. Models are
/// immutable; [`Nscm::intervene`] and [`Nscm::refine`] return new models.
#[derive(Debug, Clone)]
pub struct Nscm {
    sig: Arc<Signature>,
    graph: Dag,
    equations: Vec<MultiFunction>,
    order: Vec<VarId>,
}

impl PartialEq for Nscm {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig && self.graph == other.graph && self.equations == other.equations
    }
}

impl Eq for Nscm {}

impl Nscm {
    /// Builds a model from one equation per endogenous variable, in any order.
    pub fn new(sig: Arc<Signature>, equations: Vec<MultiFunction>) -> Result<Self> {
        let n_exo = sig.n_exogenous();
        let mut slots: Vec<Option<MultiFunction>> = vec![None; sig.n_endogenous()];
        for eq in equations {
            let child = eq.child;
            if !sig.is_endogenous(child) {
                return Err(Error::NotEndogenous(sig.name(child).to_string()));
            }
            let slot = &mut slots[child.0 - n_exo];
            if slot.is_some() {
                return Err(Error::semantic(format!("`{}` has more than one equation", sig.name(child))));
            }
            *slot = Some(eq);
        }
        let equations = slots
            .into_iter()
            .enumerate()
            .map(|(i, eq)| {
                eq.ok_or_else(|| Error::semantic(format!("`{}` has no equation", sig.name(VarId(i + n_exo)))))
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = equations.iter().flat_map(|eq| eq.parents.iter().map(move |p| (*p, eq.child)));
        let graph = Dag::new(&sig, edges)?;
        Ok(Self::assemble(sig, graph, equations))
    }

    /// Builds a model whose equations must agree with an explicitly given graph.
    pub fn with_graph(sig: Arc<Signature>, graph: Dag, equations: Vec<MultiFunction>) -> Result<Self> {
        let m = Self::new(sig, equations)?;
        if m.graph != graph {
            return Err(Error::semantic("equation parents do not match the graph"));
        }
        Ok(m)
    }

    fn assemble(sig: Arc<Signature>, graph: Dag, equations: Vec<MultiFunction>) -> Self {
        let order = graph.topological_order().into_iter().filter(|v| sig.is_endogenous(*v)).collect();
        Nscm { sig, graph, equations, order }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn equation(&self, v: VarId) -> &MultiFunction {
        &self.equations[v.0 - self.sig.n_exogenous()]
    }

    pub fn equations(&self) -> &[MultiFunction] {
        &self.equations
    }

    pub fn is_deterministic(&self) -> bool {
        self.equations.iter().all(MultiFunction::is_deterministic)
    }

    fn check_world(&self, w: &World) -> Result<()> {
        if w.values().len() != self.sig.len() {
            return Err(Error::semantic("world is not total over the signature"));
        }
        for v in self.sig.vars() {
            if w.get(v) >= self.sig.range_len(v) {
                return Err(Error::ValueOutOfRange {
                    var: self.sig.name(v).to_string(),
                    value: format!("#{}", w.get(v)),
                });
            }
        }
        Ok(())
    }

    /// True iff every endogenous value lies in its equation's output at the world's parents.
    pub fn is_solution(&self, w: &World) -> Result<bool> {
        self.check_world(w)?;
        Ok(self.equations.iter().all(|eq| eq.apply(w.values()).contains(w.get(eq.child))))
    }

    pub(crate) fn require_solution(&self, w: &World) -> Result<()> {
        if self.is_solution(w)? {
            Ok(())
        } else {
            Err(Error::NotASolution)
        }
    }

    /// All states solving the model in context `u`, in lexicographic order.
    ///
    /// Enumerates in topological order, branching on every value of each output set.
    pub fn solutions(&self, u: &Context) -> Vec<State> {
        let n_exo = self.sig.n_exogenous();
        assert_eq!(u.0.len(), n_exo, "context is not total over the exogenous variables");
        let mut buf = vec![0; self.sig.len()];
        buf[..n_exo].copy_from_slice(&u.0);
        let mut out = Vec::new();
        self.branch(0, &mut buf, &mut out);
        out.sort();
        out
    }

    fn branch(&self, k: usize, buf: &mut Vec<usize>, out: &mut Vec<State>) {
        let Some(&v) = self.order.get(k) else {
            out.push(State(buf[self.sig.n_exogenous()..].to_vec()));
            return;
        };
        for x in self.equation(v).apply(buf).iter() {
            buf[v.0] = x;
            self.branch(k + 1, buf, out);
        }
    }

    /// Every solution world over every context, contexts in lexicographic order.
    pub fn all_solutions(&self) -> Vec<World> {
        self.sig
            .contexts()
            .flat_map(|u| self.solutions(&u).into_iter().map(move |s| World::new(&u, &s)).collect::<Vec<_>>())
            .collect()
    }

    /// `M_{Y←y}`: intervened variables get constant equations and lose their incoming edges.
    pub fn intervene(&self, i: &Intervention) -> Nscm {
        if i.is_empty() {
            return self.clone();
        }
        let equations: Vec<MultiFunction> = self
            .equations
            .iter()
            .map(|eq| match i.get(eq.child) {
                Some(x) => MultiFunction::constant(eq.child, ValueSet::singleton(x)),
                None => eq.clone(),
            })
            .collect();
        let edges = equations.iter().flat_map(|eq| eq.parents.iter().map(move |p| (*p, eq.child)));
        let graph = Dag::new(&self.sig, edges).expect("removing edges preserves acyclicity");
        Self::assemble(self.sig.clone(), graph, equations)
    }

    /// Actualized refinement: each equation's output at the world's own parent values is
    /// pinned to the world's value. Only defined at solutions.
    pub fn refine(&self, w: &World) -> Result<Nscm> {
        self.require_solution(w)?;
        let mut m = self.clone();
        for eq in &mut m.equations {
            let row = eq.row_of(w.values());
            eq.set_row(row, ValueSet::singleton(w.get(eq.child)));
        }
        Ok(m)
    }

    /// Edge-relevance lint. An edge `P→X` is reported when `P` can never change the output
    /// set of `f_X` and `f_X` is single-valued everywhere, or when `P` has a single value.
    pub fn lint(&self) -> Vec<Diagnostic> {
        let sig = &*self.sig;
        let mut out = Vec::new();
        for eq in &self.equations {
            let deterministic = eq.is_deterministic();
            for (k, &p) in eq.parents.iter().enumerate() {
                let why = if sig.range_len(p) == 1 {
                    Some("the parent has a single value")
                } else if deterministic && !varies_with(eq, k) {
                    Some("the equation never varies with this parent")
                } else {
                    None
                };
                if let Some(why) = why {
                    out.push(Diagnostic {
                        severity: crate::model::Severity::Warning,
                        message: format!("edge {}->{} is irrelevant: {why}", sig.name(p), sig.name(eq.child)),
                        edge: Some((sig.name(p).to_string(), sig.name(eq.child).to_string())),
                    });
                }
            }
        }
        out
    }
}

/// Whether some co-assignment of the other parents gives different output sets for two
/// values of parent number `k`.
fn varies_with(eq: &MultiFunction, k: usize) -> bool {
    let stride = eq.strides[k];
    let radix = eq.radices[k];
    (0..eq.table.len()).any(|row| {
        let base = row - ((row / stride) % radix) * stride;
        (0..radix).any(|x| eq.table[base + x * stride] != eq.table[row])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn late_preemption_has_the_expected_unique_solution() {
        let m = fixtures::late_preemption();
        let sig = m.signature();
        let sols = m.solutions(&Context(vec![]));
        assert_eq!(sols.len(), 1);
        assert_eq!(sig.fmt_state(&sols[0]), "ST=1,BT=1,SH=1,BH=0,BS=1");
        let w = World::new(&Context(vec![]), &sols[0]);
        assert!(m.is_solution(&w).unwrap());
        let zeros = World::new(&Context(vec![]), &State(vec![0; 5]));
        assert!(!m.is_solution(&zeros).unwrap());
        assert!(m.lint().is_empty());
    }

    #[test]
    fn treatment_solutions_and_refinement() {
        let m = fixtures::treatment();
        let sig = m.signature();
        let u = Context(vec![]);
        let sols: Vec<String> = m.solutions(&u).iter().map(|s| sig.fmt_state(s)).collect();
        assert_eq!(sols, ["X=1,Y=0", "X=1,Y=1"]);

        let w = World::new(&u, &sig.parse_state("X=1,Y=0").unwrap());
        let r = m.refine(&w).unwrap();
        let y = sig.lookup("Y").unwrap();
        assert_eq!(r.equation(y).output(&[1]), ValueSet::singleton(0));
        assert_eq!(r.equation(y).output(&[0]), ValueSet::full(2));
        // no lint: f_Y is multi-valued
        assert!(m.lint().is_empty());
    }

    #[test]
    fn refinement_and_intervention_do_not_commute() {
        let m = fixtures::treatment();
        let sig = m.signature();
        let u = Context(vec![]);
        let x0 = sig.parse_intervention("X=0").unwrap();

        let w = World::new(&u, &sig.parse_state("X=1,Y=0").unwrap());
        let a = m.refine(&w).unwrap().intervene(&x0);
        let a_sols: Vec<String> = a.solutions(&u).iter().map(|s| sig.fmt_state(s)).collect();
        assert_eq!(a_sols, ["X=0,Y=0", "X=0,Y=1"]);

        let w0 = World::new(&u, &sig.parse_state("X=0,Y=0").unwrap());
        let b = m.intervene(&x0).refine(&w0).unwrap();
        let b_sols: Vec<String> = b.solutions(&u).iter().map(|s| sig.fmt_state(s)).collect();
        assert_eq!(b_sols, ["X=0,Y=0"]);
    }

    #[test]
    fn intervention_cuts_edges_and_forces_values() {
        let m = fixtures::late_preemption();
        let sig = m.signature();
        let i = sig.parse_intervention("ST=0").unwrap();
        let mi = m.intervene(&i);
        let st = sig.lookup("ST").unwrap();
        assert!(mi.graph().parents(st).is_empty());
        let sols: Vec<String> = mi.solutions(&Context(vec![])).iter().map(|s| sig.fmt_state(s)).collect();
        assert_eq!(sols, ["ST=0,BT=1,SH=0,BH=1,BS=1"]);
        assert_eq!(m.intervene(&Intervention::empty()), m);

        let all = sig.parse_intervention("ST=0,BT=0,SH=1,BH=1,BS=0").unwrap();
        let sols = m.intervene(&all).solutions(&Context(vec![]));
        assert_eq!(sols, vec![State(vec![0, 0, 1, 1, 0])]);
        assert_eq!(m.intervene(&all).graph().edge_count(), 0);
    }

    #[test]
    fn refine_rejects_non_solutions() {
        let m = fixtures::late_preemption();
        let w = World::new(&Context(vec![]), &State(vec![0; 5]));
        assert!(matches!(m.refine(&w), Err(Error::NotASolution)));
        let det = fixtures::late_preemption();
        let sol = det.all_solutions().remove(0);
        assert_eq!(det.refine(&sol).unwrap(), det);
    }

    #[test]
    fn lint_flags_constant_deterministic_edges() {
        let sig = Arc::new(
            Signature::new(Vec::<(&str, Vec<&str>)>::new(), vec![("A", vec!["0", "1"]), ("B", vec!["0", "1"])])
                .unwrap(),
        );
        let (a, b) = (VarId(0), VarId(1));
        let m = Nscm::new(
            sig.clone(),
            vec![
                MultiFunction::constant(a, ValueSet::full(2)),
                MultiFunction::new(&sig, b, vec![a], vec![ValueSet::singleton(1); 2]).unwrap(),
            ],
        )
        .unwrap();
        let lints = m.lint();
        assert_eq!(lints.len(), 1);
        assert_eq!(lints[0].edge, Some(("A".into(), "B".into())));
        assert_eq!(lints[0].severity, Severity::Warning);
    }

    #[test]
    fn lint_flags_single_valued_parents() {
        let sig = Arc::new(
            Signature::new(Vec::<(&str, Vec<&str>)>::new(), vec![("A", vec!["only"]), ("B", vec!["0", "1"])]).unwrap(),
        );
        let (a, b) = (VarId(0), VarId(1));
        let m = Nscm::new(
            sig.clone(),
            vec![
                MultiFunction::constant(a, ValueSet::singleton(0)),
                MultiFunction::new(&sig, b, vec![a], vec![ValueSet::full(2)]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(m.lint().len(), 1);
    }

    #[test]
    fn rejects_malformed_equations() {
        let sig = Arc::new(
            Signature::new(vec![("U", vec!["0", "1"])], vec![("A", vec!["0", "1"]), ("B", vec!["0", "1"])]).unwrap(),
        );
        let (u, a, b) = (VarId(0), VarId(1), VarId(2));
        // wrong row count
        assert!(MultiFunction::new(&sig, a, vec![u], vec![ValueSet::singleton(0)]).is_err());
        // empty output
        assert!(MultiFunction::new(&sig, a, vec![u], vec![ValueSet::empty(), ValueSet::singleton(0)]).is_err());
        // out-of-range output
        assert!(MultiFunction::new(&sig, a, vec![], vec![ValueSet::singleton(2)]).is_err());
        // cycle
        let fa = MultiFunction::new(&sig, a, vec![b], vec![ValueSet::singleton(0); 2]).unwrap();
        let fb = MultiFunction::new(&sig, b, vec![a], vec![ValueSet::singleton(0); 2]).unwrap();
        assert!(Nscm::new(sig.clone(), vec![fa.clone(), fb]).is_err());
        // missing equation
        assert!(Nscm::new(sig.clone(), vec![fa]).is_err());
        // exogenous child
        assert!(MultiFunction::new(&sig, u, vec![], vec![ValueSet::singleton(0)]).is_err());
    }
}
