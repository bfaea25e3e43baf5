//! Dependence and counterfactual dependence, observational and interventional, plus the
//! existential "depends on" / "directly depends on" searches.

use std::collections::BTreeSet;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::model::Nscm;
use crate::signature::{interventions_over, Context, Intervention, Odometer, Signature, State, VarId, World};

/// Evidence for a dependence verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceWitness {
    pub cause: VarId,
    pub effect: VarId,
    /// The `Z←z` applied before observation; empty for the starred notions.
    pub base_intervention: Intervention,
    pub context: Context,
    /// The actual state, for the counterfactual notions.
    pub state: Option<State>,
    pub x: usize,
    pub x_alt: usize,
    pub y: usize,
    /// A solution of the refined, intervened model with the effect changed.
    pub counterfactual_solution: Option<State>,
}

impl DependenceWitness {
    pub fn to_json(&self, sig: &Signature) -> Json {
        let mut out = json!({
            "cause": sig.name(self.cause),
            "effect": sig.name(self.effect),
            "base_intervention": sig.intervention_json(&self.base_intervention),
            "context": sig.context_json(&self.context),
        });
        let obj = out.as_object_mut().expect("object literal");
        if let Some(s) = &self.state {
            obj.insert("state".into(), sig.state_json(s));
        }
        obj.insert("x".into(), sig.value_name(self.cause, self.x).into());
        obj.insert("x_alt".into(), sig.value_name(self.cause, self.x_alt).into());
        obj.insert("y".into(), sig.value_name(self.effect, self.y).into());
        if let Some(s) = &self.counterfactual_solution {
            obj.insert("counterfactual_solution".into(), sig.state_json(s));
        }
        out
    }

    /// One-line human summary.
    pub fn describe(&self, sig: &Signature) -> String {
        let mut s = String::new();
        if !self.base_intervention.is_empty() {
            s.push_str(&format!("do({}) ", self.base_intervention.display(sig)));
        }
        s.push_str(&format!("context ({})", sig.fmt_context(&self.context)));
        if let Some(st) = &self.state {
            s.push_str(&format!(" state ({})", sig.fmt_state(st)));
        }
        s.push_str(&format!(
            ": {}={} with {}={}; {}<-{} ",
            sig.name(self.cause),
            sig.value_name(self.cause, self.x),
            sig.name(self.effect),
            sig.value_name(self.effect, self.y),
            sig.name(self.cause),
            sig.value_name(self.cause, self.x_alt),
        ));
        match &self.counterfactual_solution {
            Some(cf) => s.push_str(&format!("admits ({})", sig.fmt_state(cf))),
            None => s.push_str(&format!("forces {}!={}", sig.name(self.effect), sig.value_name(self.effect, self.y))),
        }
        s
    }
}

fn check_pair(sig: &Signature, x: VarId, xv: usize, y: VarId, yv: usize) -> Result<()> {
    for (v, val) in [(x, xv), (y, yv)] {
        if v.0 >= sig.len() {
            return Err(Error::UnknownVariable(format!("#{}", v.0)));
        }
        if !sig.is_endogenous(v) {
            return Err(Error::NotEndogenous(sig.name(v).to_string()));
        }
        if val >= sig.range_len(v) {
            return Err(Error::ValueOutOfRange { var: sig.name(v).to_string(), value: format!("#{val}") });
        }
    }
    if x == y {
        return Err(Error::semantic("cause and effect must be different variables"));
    }
    Ok(())
}

fn check_context(sig: &Signature, u: &Context) -> Result<()> {
    World::checked(sig, u.clone(), State(vec![0; sig.n_endogenous()])).map(|_| ())
}

fn check_base(sig: &Signature, z: &Intervention, x: VarId, y: VarId) -> Result<()> {
    if z.contains(x) {
        return Err(Error::semantic(format!("the cause `{}` is intervened on", sig.name(x))));
    }
    if z.contains(y) {
        return Err(Error::semantic(format!("the effect `{}` is intervened on", sig.name(y))));
    }
    Ok(())
}

fn alternatives(sig: &Signature, x: VarId, xv: usize, require_distinct: bool) -> impl Iterator<Item = usize> {
    (0..sig.range_len(x)).filter(move |&a| !require_distinct || a != xv)
}

/// Counterfactual search at a solution `w` of `m`: the first `x′` (range order) such that the
/// refined model under `X←x′` has a solution with `Y≠y`, together with that solution.
fn counterfactual(
    m: &Nscm,
    w: &World,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
    require_distinct: bool,
) -> Option<(usize, State)> {
    let sig = m.signature();
    if w.get(x) != xv || w.get(y) != yv {
        return None;
    }
    let refined = m.refine(w).expect("caller passes a solution");
    let u = w.context();
    alternatives(sig, x, xv, require_distinct).find_map(|alt| {
        let i = Intervention::from_sorted(vec![(x, alt)]);
        refined.intervene(&i).solutions(&u).into_iter().find(|s| s.get(sig, y) != yv).map(|s| (alt, s))
    })
}

/// `Y=y` depends* on `X=x` in `(M, u)`: some solution has `X=x ∧ Y=y`, and for some `x′`
/// every solution's refinement forces `Y≠y` under `X←x′`.
pub fn depends_star(
    m: &Nscm,
    u: &Context,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
) -> Result<Option<DependenceWitness>> {
    let sig = m.signature();
    check_pair(sig, x, xv, y, yv)?;
    check_context(sig, u)?;
    Ok(star(m, u, x, xv, y, yv))
}

fn star(m: &Nscm, u: &Context, x: VarId, xv: usize, y: VarId, yv: usize) -> Option<DependenceWitness> {
    let sig = m.signature();
    let sols = m.solutions(u);
    if !sols.iter().any(|s| s.get(sig, x) == xv && s.get(sig, y) == yv) {
        return None;
    }
    let refined: Vec<Nscm> =
        sols.iter().map(|s| m.refine(&World::new(u, s)).expect("solver output is a solution")).collect();
    let x_alt = alternatives(sig, x, xv, false).find(|&alt| {
        let i = Intervention::from_sorted(vec![(x, alt)]);
        refined.iter().all(|r| r.intervene(&i).solutions(u).iter().all(|s| s.get(sig, y) != yv))
    })?;
    Some(DependenceWitness {
        cause: x,
        effect: y,
        base_intervention: Intervention::empty(),
        context: u.clone(),
        state: None,
        x: xv,
        x_alt,
        y: yv,
        counterfactual_solution: None,
    })
}

/// `Y=y` counterfactually depends* on `X=x` at the solution `w`.
pub fn cf_depends_star(
    m: &Nscm,
    w: &World,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
) -> Result<Option<DependenceWitness>> {
    cf_depends_star_with(m, w, x, xv, y, yv, false)
}

/// As [`cf_depends_star`]; with `require_distinct` only `x′ ≠ x` are tried.
pub fn cf_depends_star_with(
    m: &Nscm,
    w: &World,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
    require_distinct: bool,
) -> Result<Option<DependenceWitness>> {
    check_pair(m.signature(), x, xv, y, yv)?;
    m.require_solution(w)?;
    Ok(cf_at(m, &Intervention::empty(), w, x, xv, y, yv, require_distinct))
}

#[allow(clippy::too_many_arguments)]
fn cf_at(
    m: &Nscm,
    z: &Intervention,
    w: &World,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
    require_distinct: bool,
) -> Option<DependenceWitness> {
    let (x_alt, cf) = counterfactual(m, w, x, xv, y, yv, require_distinct)?;
    Some(DependenceWitness {
        cause: x,
        effect: y,
        base_intervention: z.clone(),
        context: w.context(),
        state: Some(w.state()),
        x: xv,
        x_alt,
        y: yv,
        counterfactual_solution: Some(cf),
    })
}

/// Interventional dependence: [`depends_star`] in `M_{Z←z}`.
pub fn depends(
    m: &Nscm,
    z: &Intervention,
    u: &Context,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
) -> Result<Option<DependenceWitness>> {
    let sig = m.signature();
    check_pair(sig, x, xv, y, yv)?;
    check_base(sig, z, x, y)?;
    check_context(sig, u)?;
    Ok(star(&m.intervene(z), u, x, xv, y, yv).map(|mut wit| {
        wit.base_intervention = z.clone();
        wit
    }))
}

/// Interventional counterfactual dependence: [`cf_depends_star`] in `M_{Z←z}` at `w`.
#[allow(clippy::too_many_arguments)]
pub fn cf_depends(
    m: &Nscm,
    z: &Intervention,
    w: &World,
    x: VarId,
    xv: usize,
    y: VarId,
    yv: usize,
) -> Result<Option<DependenceWitness>> {
    let sig = m.signature();
    check_pair(sig, x, xv, y, yv)?;
    check_base(sig, z, x, y)?;
    let mz = m.intervene(z);
    mz.require_solution(w)?;
    Ok(cf_at(&mz, z, w, x, xv, y, yv, false))
}

fn check_vars(sig: &Signature, x: VarId, y: VarId) -> Result<()> {
    check_pair(sig, x, 0, y, 0)
}

fn search(m: &Nscm, x: VarId, y: VarId, bases: impl IntoIterator<Item = Intervention>) -> Option<DependenceWitness> {
    let sig = m.signature();
    for z in bases {
        let mz = m.intervene(&z);
        for u in sig.contexts() {
            for s in mz.solutions(&u) {
                let w = World::new(&u, &s);
                if let Some(wit) = cf_at(&mz, &z, &w, x, w.get(x), y, w.get(y), false) {
                    return Some(wit);
                }
            }
        }
    }
    None
}

/// `Y` depends on `X`: counterfactual dependence of some `Y=y` on some `X=x` in some setting
/// `(M_{Z←z}, u, v)` with `Z ⊆ V∖{X,Y}`. Returns the first witness in canonical order.
pub fn depends_on(m: &Nscm, x: VarId, y: VarId) -> Result<Option<DependenceWitness>> {
    let sig = m.signature();
    check_vars(sig, x, y)?;
    let others: Vec<VarId> = sig.endogenous().filter(|&v| v != x && v != y).collect();
    Ok(search(m, x, y, interventions_over(sig, &others)))
}

/// `Y` directly depends on `X`: as [`depends_on`] with every other endogenous variable fixed.
pub fn directly_depends(m: &Nscm, x: VarId, y: VarId) -> Result<Option<DependenceWitness>> {
    let sig = m.signature();
    check_vars(sig, x, y)?;
    let others: Vec<VarId> = sig.endogenous().filter(|&v| v != x && v != y).collect();
    let radices = others.iter().map(|&v| sig.range_len(v)).collect();
    let bases =
        Odometer::new(radices).map(|vals| Intervention::from_sorted(others.iter().copied().zip(vals).collect()));
    Ok(search(m, x, y, bases))
}

/// Strict ancestors of `x` in `g`.
pub fn ancestors(g: &Dag, x: VarId) -> Result<BTreeSet<VarId>> {
    if x.0 >= g.node_count() {
        return Err(Error::UnknownVariable(format!("#{}", x.0)));
    }
    Ok(g.ancestors(x))
}

pub fn is_ancestor(g: &Dag, x: VarId, y: VarId) -> Result<bool> {
    if x.0 >= g.node_count() || y.0 >= g.node_count() {
        return Err(Error::UnknownVariable(format!("#{}", x.0.max(y.0))));
    }
    Ok(g.is_ancestor(x, y))
}
