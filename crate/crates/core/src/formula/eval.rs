use super::{BasicCausalFormula, BasicFormula, CausalFormula, Modality};
use crate::error::Result;
use crate::model::Nscm;
use crate::signature::{Context, Signature, State, World};

/// Truth of a basic formula in a state.
pub fn eval_basic(sig: &Signature, state: &State, phi: &BasicFormula) -> bool {
    phi.holds(&|v| state.get(sig, v))
}

fn eval_with(psi: &CausalFormula, leaf: &mut impl FnMut(&BasicCausalFormula) -> bool) -> bool {
    match psi {
        CausalFormula::Basic(b) => leaf(b),
        CausalFormula::Not(f) => !eval_with(f, leaf),
        CausalFormula::And(a, b) => eval_with(a, leaf) && eval_with(b, leaf),
        CausalFormula::Or(a, b) => eval_with(a, leaf) || eval_with(b, leaf),
    }
}

/// `[i]φ` / `⟨i⟩φ` in a model that has already been refined at `u`'s world.
fn leaf_full(refined: &Nscm, u: &Context, b: &BasicCausalFormula) -> bool {
    let sig = refined.signature();
    let sols = refined.intervene(&b.intervention).solutions(u);
    match b.modality {
        Modality::Box => sols.iter().all(|s| eval_basic(sig, s, &b.body)),
        Modality::Diamond => sols.iter().any(|s| eval_basic(sig, s, &b.body)),
    }
}

/// Full semantics at a solution world `(u, v)`: interventions act on the actualized
/// refinement `M^{(u,v)}`. Errors if `w` is not a solution.
pub fn eval_full(m: &Nscm, w: &World, psi: &CausalFormula) -> Result<bool> {
    let refined = m.refine(w)?;
    let u = w.context();
    Ok(eval_with(psi, &mut |b| leaf_full(&refined, &u, b)))
}

/// Refined models for each of `worlds`, which must be solutions.
fn refinements(m: &Nscm, worlds: Vec<World>) -> Vec<(Context, Nscm)> {
    worlds
        .into_iter()
        .map(|w| {
            let r = m.refine(&w).expect("solver output is a solution");
            (w.context(), r)
        })
        .collect()
}

/// Each basic causal subformula quantifies over `worlds`: boxes universally, diamonds
/// existentially. Connectives combine the per-subformula verdicts.
fn eval_quantified(refined: &[(Context, Nscm)], psi: &CausalFormula) -> bool {
    eval_with(psi, &mut |b| match b.modality {
        Modality::Box => refined.iter().all(|(u, r)| leaf_full(r, u, b)),
        Modality::Diamond => refined.iter().any(|(u, r)| leaf_full(r, u, b)),
    })
}

/// Partial semantics at a context: a box holds iff it holds under the full semantics at every
/// solution in `u`.
pub fn eval_partial(m: &Nscm, u: &Context, psi: &CausalFormula) -> Result<bool> {
    let sig = m.signature();
    World::checked(sig, u.clone(), State(vec![0; sig.n_endogenous()]))?;
    let worlds = m.solutions(u).into_iter().map(|s| World::new(u, &s)).collect();
    Ok(eval_quantified(&refinements(m, worlds), psi))
}

/// Model semantics: a box holds iff it holds under the full semantics at every solution in
/// every context.
pub fn eval_model(m: &Nscm, psi: &CausalFormula) -> bool {
    eval_quantified(&refinements(m, m.all_solutions()), psi)
}

/// Where a formula is evaluated.
#[derive(Debug, Clone)]
pub enum Setting {
    Full(World),
    Partial(Context),
    Model,
}

pub fn evaluate(m: &Nscm, setting: &Setting, psi: &CausalFormula) -> Result<bool> {
    match setting {
        Setting::Full(w) => eval_full(m, w, psi),
        Setting::Partial(u) => eval_partial(m, u, psi),
        Setting::Model => Ok(eval_model(m, psi)),
    }
}
