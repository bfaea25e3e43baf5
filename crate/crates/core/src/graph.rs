use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::signature::{Signature, VarId};

pub type Edge = (VarId, VarId);

/// Directed acyclic graph over the variables of a signature. Edges only point into
/// endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<VarId>>,
    children: Vec<Vec<VarId>>,
}

impl Dag {
    pub fn new(sig: &Signature, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let n = sig.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (p, c) in edges {
            if p.0 >= n || c.0 >= n {
                return Err(Error::semantic("edge mentions a variable outside the signature"));
            }
            if p == c {
                return Err(Error::semantic(format!("self-loop on `{}`", sig.name(p))));
            }
            if sig.is_exogenous(c) {
                return Err(Error::semantic(format!(
                    "edge {}->{} points into an exogenous variable",
                    sig.name(p),
                    sig.name(c)
                )));
            }
            if !parents[c.0].contains(&p) {
                parents[c.0].push(p);
                children[p.0].push(c);
            }
        }
        parents.iter_mut().for_each(|ps| ps.sort());
        children.iter_mut().for_each(|cs| cs.sort());
        let dag = Dag { parents, children };
        if dag.try_topological_order().is_none() {
            return Err(Error::semantic("graph contains a cycle"));
        }
        Ok(dag)
    }

    pub fn empty(sig: &Signature) -> Self {
        Dag { parents: vec![Vec::new(); sig.len()], children: vec![Vec::new(); sig.len()] }
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.parents[v.0]
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v.0]
    }

    pub fn has_edge(&self, p: VarId, c: VarId) -> bool {
        self.parents[c.0].contains(&p)
    }

    /// Edges sorted by (parent, child).
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> =
            self.children.iter().enumerate().flat_map(|(p, cs)| cs.iter().map(move |c| (VarId(p), *c))).collect();
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    fn try_topological_order(&self) -> Option<Vec<VarId>> {
        let n = self.node_count();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(VarId(i));
            for c in &self.children[i] {
                indeg[c.0] -= 1;
                if indeg[c.0] == 0 {
                    ready.insert(c.0);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Topological order, breaking ties by declaration order.
    pub fn topological_order(&self) -> Vec<VarId> {
        self.try_topological_order().expect("Dag is acyclic by construction")
    }

    /// Strict descendants of `v`.
    pub fn descendants(&self, v: VarId) -> BTreeSet<VarId> {
        reach(v, |x| &self.children[x.0])
    }

    /// Strict ancestors of `v`.
    pub fn ancestors(&self, v: VarId) -> BTreeSet<VarId> {
        reach(v, |x| &self.parents[x.0])
    }

    /// True iff there is a directed path of length at least one from `x` to `y`.
    pub fn is_ancestor(&self, x: VarId, y: VarId) -> bool {
        self.descendants(x).contains(&y)
    }

    /// The ancestor relation as a set of (ancestor, descendant) pairs.
    pub fn ancestor_pairs(&self) -> BTreeSet<Edge> {
        (0..self.node_count())
            .flat_map(|i| {
                let v = VarId(i);
                self.descendants(v).into_iter().map(move |d| (v, d))
            })
            .collect()
    }

    /// The same graph with `removed` edges deleted. Edges not present are ignored.
    pub fn without_edges(&self, removed: &[Edge]) -> Dag {
        let mut g = self.clone();
        for &(p, c) in removed {
            g.parents[c.0].retain(|x| *x != p);
            g.children[p.0].retain(|x| *x != c);
        }
        g
    }

    pub fn is_subgraph_of(&self, other: &Dag) -> bool {
        self.node_count() == other.node_count() && self.edges().iter().all(|&(p, c)| other.has_edge(p, c))
    }

    pub fn fmt_edges(&self, sig: &Signature) -> String {
        fmt_edge_list(sig, &self.edges())
    }
}

pub fn fmt_edge_list(sig: &Signature, edges: &[Edge]) -> String {
    edges.iter().map(|&(p, c)| format!("{}->{}", sig.name(p), sig.name(c))).collect::<Vec<_>>().join(", ")
}

/// Parses `A->B, C->D`.
pub fn parse_edge_list(sig: &Signature, text: &str) -> Result<Vec<Edge>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (p, c) = item
            .split_once("->")
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected `PARENT->CHILD`, found `{item}`") })?;
        out.push((sig.lookup(p.trim())?, sig.lookup(c.trim())?));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn reach<'a>(start: VarId, next: impl Fn(VarId) -> &'a [VarId]) -> BTreeSet<VarId> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<VarId> = next(start).to_vec();
    while let Some(v) = stack.pop() {
        if seen.insert(v) {
            stack.extend_from_slice(next(v));
        }
    }
    seen
}
