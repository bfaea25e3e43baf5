//! Seeded random generation of models, settings, interventions and formulas for testing.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::BasicFormula;
use crate::graph::Dag;
use crate::model::{MultiFunction, Nscm};
use crate::signature::{Context, Intervention, Signature, VarId, World};
use crate::value_set::ValueSet;

#[derive(Debug, Clone)]
pub struct RandomConfig {
    pub exogenous: (usize, usize),
    pub endogenous: (usize, usize),
    /// Inclusive bounds on range sizes.
    pub range: (usize, usize),
    /// Chance of each forward edge.
    pub edge_probability: f64,
    /// Chance that a table row has more than one value. Zero gives deterministic models.
    pub nondeterminism: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            exogenous: (0, 2),
            endogenous: (1, 4),
            range: (2, 3),
            edge_probability: 0.5,
            nondeterminism: 0.3,
        }
    }
}

impl RandomConfig {
    pub fn deterministic(mut self) -> Self {
        self.nondeterminism = 0.0;
        self
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

pub fn random_signature<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomConfig) -> Signature {
    let decl = |rng: &mut R, prefix: &str, n: usize| -> Vec<(String, Vec<String>)> {
        (0..n)
            .map(|i| {
                let r = pick(rng, cfg.range);
                (format!("{prefix}{i}"), (0..r).map(|v| v.to_string()).collect())
            })
            .collect()
    };
    let n_exo = pick(rng, cfg.exogenous);
    let n_endo = pick(rng, cfg.endogenous);
    let exo = decl(rng, "U", n_exo);
    let endo = decl(rng, "V", n_endo);
    Signature::new(exo, endo).expect("generated names and ranges are valid")
}

/// A random graph where endogenous variables only receive edges from exogenous variables and
/// from endogenous variables declared earlier.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, edge_probability: f64) -> Dag {
    let mut edges = Vec::new();
    for c in sig.endogenous() {
        for p in sig.vars().take_while(|&p| p != c) {
            if rng.gen_bool(edge_probability) {
                edges.push((p, c));
            }
        }
    }
    Dag::new(sig, edges).expect("forward edges are acyclic")
}

fn random_output<R: Rng + ?Sized>(rng: &mut R, n: usize, nondeterminism: f64) -> ValueSet {
    if n > 1 && rng.gen_bool(nondeterminism) {
        loop {
            let s: ValueSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if s.len() >= 2 {
                return s;
            }
        }
    }
    ValueSet::singleton(rng.gen_range(0..n))
}

/// Random tables over a fixed graph.
pub fn random_equations<R: Rng + ?Sized>(rng: &mut R, sig: &Arc<Signature>, graph: &Dag, nondeterminism: f64) -> Nscm {
    let equations = sig
        .endogenous()
        .map(|x| {
            let parents = graph.parents(x).to_vec();
            let rows: usize = parents.iter().map(|&p| sig.range_len(p)).product();
            let table = (0..rows).map(|_| random_output(rng, sig.range_len(x), nondeterminism)).collect();
            MultiFunction::new(sig, x, parents, table).expect("generated table is well formed")
        })
        .collect();
    Nscm::new(sig.clone(), equations).expect("generated model is valid")
}

pub fn random_model<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomConfig) -> Nscm {
    let sig = Arc::new(random_signature(rng, cfg));
    let graph = random_graph(rng, &sig, cfg.edge_probability);
    random_equations(rng, &sig, &graph, cfg.nondeterminism)
}

pub fn random_context<R: Rng + ?Sized>(rng: &mut R, sig: &Signature) -> Context {
    Context(sig.exogenous().map(|u| rng.gen_range(0..sig.range_len(u))).collect())
}

/// A uniformly chosen solution in a random context.
pub fn random_solution<R: Rng + ?Sized>(rng: &mut R, m: &Nscm) -> World {
    let u = random_context(rng, m.signature());
    let sols = m.solutions(&u);
    let s = sols.choose(rng).expect("acyclic models have a solution in every context");
    World::new(&u, s)
}

/// Each of `vars` is intervened on with probability `p`, at a random value.
pub fn random_intervention<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, vars: &[VarId], p: f64) -> Intervention {
    let mut pairs = Vec::new();
    for &v in vars {
        if rng.gen_bool(p) {
            pairs.push((v, rng.gen_range(0..sig.range_len(v))));
        }
    }
    Intervention::new(sig, pairs).expect("distinct endogenous variables")
}

/// A random basic formula over the endogenous variables with at most `depth` connectives
/// along any branch.
pub fn random_basic_formula<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, depth: usize) -> BasicFormula {
    let endo: Vec<VarId> = sig.endogenous().collect();
    if depth == 0 || rng.gen_bool(0.35) {
        let v = *endo.choose(rng).expect("signature has an endogenous variable");
        return BasicFormula::atom(v, rng.gen_range(0..sig.range_len(v)));
    }
    match rng.gen_range(0..3) {
        0 => random_basic_formula(rng, sig, depth - 1).not(),
        1 => random_basic_formula(rng, sig, depth - 1).and(random_basic_formula(rng, sig, depth - 1)),
        _ => random_basic_formula(rng, sig, depth - 1).or(random_basic_formula(rng, sig, depth - 1)),
    }
}
