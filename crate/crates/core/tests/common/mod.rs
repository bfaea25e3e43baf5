//! Brute-force reference implementations shared by the integration tests. They avoid the
//! library's solver, refinement and simplification code and work from raw tables.

#![allow(dead_code)]

use nscm::signature::{Context, State, VarId, World};
use nscm::{Nscm, Signature, ValueSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One equation as plain data: parents in declaration order and a table of value bitmasks
/// indexed lexicographically (last parent fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub child: usize,
    pub parents: Vec<usize>,
    pub rows: Vec<u64>,
}

impl Table {
    pub fn row_of(&self, sig: &Signature, values: &[usize]) -> usize {
        let mut r = 0;
        for &p in &self.parents {
            r = r * sig.range_len(VarId(p)) + values[p];
        }
        r
    }

    pub fn allows(&self, sig: &Signature, values: &[usize]) -> bool {
        self.rows[self.row_of(sig, values)] >> values[self.child] & 1 == 1
    }
}

pub fn tables(m: &Nscm) -> Vec<Table> {
    m.equations()
        .iter()
        .map(|eq| Table {
            child: eq.child().0,
            parents: eq.parents().iter().map(|p| p.0).collect(),
            rows: eq.table().iter().map(|s| s.bits()).collect(),
        })
        .collect()
}

/// Every assignment to `radices`, lexicographic.
pub fn tuples(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn all_states(sig: &Signature) -> Vec<Vec<usize>> {
    let radices: Vec<usize> = sig.endogenous().map(|v| sig.range_len(v)).collect();
    tuples(&radices)
}

pub fn all_contexts(sig: &Signature) -> Vec<Vec<usize>> {
    let radices: Vec<usize> = sig.exogenous().map(|v| sig.range_len(v)).collect();
    tuples(&radices)
}

/// Solutions in context `u` by filtering every state against every table.
pub fn solutions(sig: &Signature, eqs: &[Table], u: &[usize]) -> Vec<Vec<usize>> {
    all_states(sig)
        .into_iter()
        .filter(|s| {
            let mut w = u.to_vec();
            w.extend_from_slice(s);
            eqs.iter().all(|t| t.allows(sig, &w))
        })
        .collect()
}

pub fn brute_solutions(m: &Nscm, u: &Context) -> Vec<State> {
    solutions(m.signature(), &tables(m), &u.0).into_iter().map(State).collect()
}

/// Replace intervened equations by parentless constants.
pub fn intervene(eqs: &[Table], pairs: &[(usize, usize)]) -> Vec<Table> {
    eqs.iter()
        .map(|t| match pairs.iter().find(|(v, _)| *v == t.child) {
            Some(&(_, x)) => Table { child: t.child, parents: vec![], rows: vec![1 << x] },
            None => t.clone(),
        })
        .collect()
}

/// Pin every equation's row at the world's parent values to the world's value.
pub fn refine(sig: &Signature, eqs: &[Table], w: &[usize]) -> Vec<Table> {
    eqs.iter()
        .map(|t| {
            let mut t = t.clone();
            let r = t.row_of(sig, w);
            t.rows[r] = 1 << w[t.child];
            t
        })
        .collect()
}

/// Union of `t` over completions of an assignment to `keep` (a subset of its parents).
pub fn generalized(sig: &Signature, t: &Table, keep: &[usize], keep_vals: &[usize]) -> u64 {
    let radices: Vec<usize> = t.parents.iter().map(|&p| sig.range_len(VarId(p))).collect();
    let mut acc = 0;
    for (r, vals) in tuples(&radices).into_iter().enumerate() {
        let agrees = keep.iter().zip(keep_vals).all(|(k, kv)| {
            let pos = t.parents.iter().position(|p| p == k).expect("kept variable is a parent");
            vals[pos] == *kv
        });
        if agrees {
            acc |= t.rows[r];
        }
    }
    acc
}

pub fn reachable(n: usize, edges: &[(usize, usize)], from: usize, to: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &(p, c) in edges {
            if p == v && !seen[c] {
                if c == to {
                    return true;
                }
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    false
}

pub fn edges_of(eqs: &[Table]) -> Vec<(usize, usize)> {
    eqs.iter().flat_map(|t| t.parents.iter().map(move |&p| (p, t.child))).collect()
}

/// Counterfactual dependence at `w` computed from tables: `w` has `X=x, Y=y` and some `X←x′`
/// applied to the refinement admits a solution with `Y≠y`.
pub fn cf_depends(sig: &Signature, eqs: &[Table], w: &[usize], x: usize, y: usize) -> bool {
    let n_exo = sig.n_exogenous();
    let refined = refine(sig, eqs, w);
    (0..sig.range_len(VarId(x))).any(|alt| {
        let m = intervene(&refined, &[(x, alt)]);
        solutions(sig, &m, &w[..n_exo]).iter().any(|s| s[y - n_exo] != w[y])
    })
}

pub fn world_values(w: &World) -> Vec<usize> {
    w.values().to_vec()
}

pub fn value_set(bits: u64) -> ValueSet {
    ValueSet::from_bits(bits)
}
