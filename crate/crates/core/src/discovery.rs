//! Idealized causal discovery from exhaustive interventionist possibility sets.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::model::{MultiFunction, Nscm};
use crate::signature::{interventions_over, Context, Intervention, Odometer, Signature, State, VarId};
use crate::value_set::ValueSet;

/// For every context and every intervention, the set of states it makes possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilitySet {
    sig: Arc<Signature>,
    records: BTreeMap<(Context, Intervention), BTreeSet<State>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarDoc {
    name: String,
    range: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureDoc {
    #[serde(default)]
    exogenous: Vec<VarDoc>,
    endogenous: Vec<VarDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDoc {
    context: Json,
    #[serde(rename = "do")]
    intervention: Json,
    states: Vec<Json>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PossibilityDoc {
    signature: SignatureDoc,
    records: Vec<RecordDoc>,
}

impl PossibilitySet {
    /// Builds a set from explicit records and checks coverage and effectiveness.
    pub fn new(sig: Arc<Signature>, records: BTreeMap<(Context, Intervention), BTreeSet<State>>) -> Result<Self> {
        let s = PossibilitySet { sig, records };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let sig = &*self.sig;
        let endo: Vec<VarId> = sig.endogenous().collect();
        let interventions = interventions_over(sig, &endo);
        let expected = interventions.len() * sig.context_count();
        for u in sig.contexts() {
            for i in &interventions {
                let states = self.records.get(&(u.clone(), i.clone())).ok_or_else(|| {
                    Error::semantic(format!(
                        "no record for context ({}) and do({})",
                        sig.fmt_context(&u),
                        i.display(sig)
                    ))
                })?;
                if states.is_empty() {
                    return Err(Error::semantic(format!(
                        "record for context ({}) and do({}) is empty",
                        sig.fmt_context(&u),
                        i.display(sig)
                    )));
                }
                for s in states {
                    if let Some(&(v, _)) = i.pairs().iter().find(|&&(v, x)| s.get(sig, v) != x) {
                        return Err(Error::semantic(format!(
                            "record for do({}) has a state with `{}` not at its intervened value",
                            i.display(sig),
                            sig.name(v)
                        )));
                    }
                }
            }
        }
        if self.records.len() != expected {
            return Err(Error::semantic("possibility set has records outside the signature"));
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn get(&self, u: &Context, i: &Intervention) -> Option<&BTreeSet<State>> {
        self.records.get(&(u.clone(), i.clone()))
    }

    pub fn records(&self) -> impl Iterator<Item = (&Context, &Intervention, &BTreeSet<State>)> {
        self.records.iter().map(|((u, i), s)| (u, i, s))
    }

    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    pub fn state_count(&self) -> usize {
        self.records.values().map(BTreeSet::len).sum()
    }

    fn record(&self, u: &Context, i: &Intervention) -> &BTreeSet<State> {
        self.get(u, i).expect("coverage is checked on construction")
    }

    pub fn to_json(&self) -> Json {
        let sig = &*self.sig;
        let decl = |vs: Vec<VarId>| -> Vec<VarDoc> {
            vs.into_iter()
                .map(|v| VarDoc { name: sig.name(v).to_string(), range: sig.variable(v).range.clone() })
                .collect()
        };
        let signature =
            SignatureDoc { exogenous: decl(sig.exogenous().collect()), endogenous: decl(sig.endogenous().collect()) };
        let records: Vec<Json> = self
            .records
            .iter()
            .map(|((u, i), states)| {
                json!({
                    "context": sig.context_json(u),
                    "do": sig.intervention_json(i),
                    "states": states.iter().map(|s| sig.state_json(s)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "signature": serde_json::to_value(signature).expect("plain data"),
            "records": records,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PossibilityDoc = serde_json::from_str(text)
            .map_err(|e| Error::Parse { pos: e.column(), msg: format!("possibility set JSON: {e}") })?;
        let pairs = |vs: Vec<VarDoc>| vs.into_iter().map(|v| (v.name, v.range)).collect::<Vec<_>>();
        let sig = Signature::new(pairs(doc.signature.exogenous), pairs(doc.signature.endogenous))?;
        let mut records = BTreeMap::new();
        for r in doc.records {
            let u = sig.context_from_pairs(&sig.pairs_from_json(&r.context)?)?;
            let i = Intervention::new(&sig, sig.pairs_from_json(&r.intervention)?)?;
            let states = r
                .states
                .iter()
                .map(|s| sig.state_from_pairs(&sig.pairs_from_json(s)?))
                .collect::<Result<BTreeSet<_>>>()?;
            if records.insert((u, i), states).is_some() {
                return Err(Error::semantic("possibility set has a duplicate record"));
            }
        }
        Self::new(Arc::new(sig), records)
    }
}

/// The exact possibility set of `m`: solutions of every intervened model in every context.
pub fn generate_possibilities(m: &Nscm) -> PossibilitySet {
    let sig = m.signature();
    let endo: Vec<VarId> = sig.endogenous().collect();
    let mut records = BTreeMap::new();
    for i in interventions_over(sig, &endo) {
        let mi = m.intervene(&i);
        for u in sig.contexts() {
            records.insert((u.clone(), i.clone()), mi.solutions(&u).into_iter().collect());
        }
    }
    PossibilitySet { sig: m.signature_arc().clone(), records }
}

fn full_assignments(sig: &Signature, vars: &[VarId]) -> Vec<Intervention> {
    let radices = vars.iter().map(|&v| sig.range_len(v)).collect();
    Odometer::new(radices).map(|vals| Intervention::from_sorted(vars.iter().copied().zip(vals).collect())).collect()
}

fn endogenous_edge(s: &PossibilitySet, x: VarId, y: VarId) -> bool {
    let sig = s.signature();
    let others: Vec<VarId> = sig.endogenous().filter(|&v| v != x && v != y).collect();
    let bases = full_assignments(sig, &others);
    sig.contexts().any(|u| {
        bases.iter().any(|z| {
            let ys = |xv: usize| -> BTreeSet<usize> {
                let i = z.merged(&Intervention::from_sorted(vec![(x, xv)])).expect("x is not in z");
                s.record(&u, &i).iter().map(|st| st.get(sig, y)).collect()
            };
            let first = ys(0);
            (1..sig.range_len(x)).any(|xv| ys(xv) != first)
        })
    })
}

fn exogenous_edge(s: &PossibilitySet, ui: VarId, x: VarId) -> bool {
    let sig = s.signature();
    let others: Vec<VarId> = sig.endogenous().filter(|&v| v != x).collect();
    let bases = full_assignments(sig, &others);
    let k = ui.0;
    sig.contexts().filter(|u| u.0[k] == 0).any(|u| {
        bases.iter().any(|z| {
            let values = |u: &Context| -> BTreeSet<usize> { s.record(u, z).iter().map(|st| st.get(sig, x)).collect() };
            let first = values(&u);
            (1..sig.range_len(ui)).any(|a| {
                let mut alt = u.clone();
                alt.0[k] = a;
                values(&alt) != first
            })
        })
    })
}

/// The graph identified by `s`: an endogenous edge `X→Y` is present iff, with every other
/// endogenous variable held fixed, the possible values of `Y` change with an intervention on
/// `X`, and an exogenous edge `U→X` iff the possible values of `X`
/// change with `U` alone when every other endogenous variable is fixed.
pub fn infer_gs(s: &PossibilitySet) -> Dag {
    let sig = s.signature();
    let mut edges = Vec::new();
    for x in sig.endogenous() {
        for ui in sig.exogenous() {
            if exogenous_edge(s, ui, x) {
                edges.push((ui, x));
            }
        }
        for y in sig.endogenous().filter(|&y| y != x) {
            if endogenous_edge(s, x, y) {
                edges.push((x, y));
            }
        }
    }
    Dag::new(sig, edges).expect("an identified graph is a subgraph of an acyclic model graph")
}

/// The model over `g` reproducing `s`: `x ∈ f_X(a, b)` iff some record with context agreeing
/// with `b` on the exogenous parents, under `do(A←a)` for the endogenous parents, has `X=x`.
pub fn build_model(s: &PossibilitySet, g: &Dag) -> Result<Nscm> {
    let sig = s.signature();
    if g.node_count() != sig.len() {
        return Err(Error::semantic("graph does not match the signature"));
    }
    let gs = infer_gs(s);
    if let Some(&(p, c)) = gs.edges().iter().find(|&&(p, c)| !g.has_edge(p, c)) {
        return Err(Error::semantic(format!("graph lacks the identified edge {}->{}", sig.name(p), sig.name(c))));
    }
    let mut equations = Vec::new();
    for x in sig.endogenous() {
        let parents = g.parents(x).to_vec();
        let rows: usize = parents.iter().map(|&p| sig.range_len(p)).product();
        let mut f = MultiFunction::new(sig, x, parents.clone(), vec![ValueSet::singleton(0); rows])?;
        let mut table = vec![ValueSet::empty(); rows];
        let endo_parents: BTreeSet<VarId> = parents.iter().copied().filter(|&p| sig.is_endogenous(p)).collect();
        for (u, i, states) in s.records() {
            if i.vars().collect::<BTreeSet<_>>() != endo_parents {
                continue;
            }
            let row_vals: Vec<usize> = parents
                .iter()
                .map(|&p| if sig.is_exogenous(p) { u.0[p.0] } else { i.get(p).expect("parent is intervened") })
                .collect();
            let r = f.row_index(&row_vals);
            for st in states {
                table[r].insert(st.get(sig, x));
            }
        }
        for (r, out) in table.into_iter().enumerate() {
            if out.is_empty() {
                return Err(Error::semantic(format!("no record supports row {r} of `{}`", sig.name(x))));
            }
            f.set_row(r, out);
        }
        equations.push(f);
    }
    Nscm::new(s.signature_arc().clone(), equations)
}

/// [`build_model`] over [`infer_gs`].
pub fn default_model(s: &PossibilitySet) -> Result<Nscm> {
    build_model(s, &infer_gs(s))
}
