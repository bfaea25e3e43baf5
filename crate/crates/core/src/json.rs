//! The model JSON document and its validation.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Diagnostic, MultiFunction, Nscm};
use crate::signature::{Odometer, Signature, VarId, VarKind, Variable};
use crate::value_set::ValueSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    #[serde(default)]
    pub exogenous: Vec<ExogenousDoc>,
    pub endogenous: Vec<EndogenousDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExogenousDoc {
    pub name: String,
    pub range: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndogenousDoc {
    pub name: String,
    pub range: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default)]
    pub table: Vec<RowDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub otherwise: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDoc {
    #[serde(rename = "if")]
    pub when: IndexMap<String, String>,
    pub then: Vec<String>,
}

impl ModelDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }
}

/// Checks a model document. Errors make the document unusable; warnings are lints on an
/// otherwise valid model.
pub fn validate_model(doc: &ModelDoc) -> Vec<Diagnostic> {
    match build(doc) {
        Ok(m) => m.lint(),
        Err(diags) => diags,
    }
}

impl Nscm {
    pub fn from_doc(doc: &ModelDoc) -> Result<Nscm> {
        build(doc).map_err(Error::InvalidModel)
    }

    pub fn from_json(text: &str) -> Result<Nscm> {
        Nscm::from_doc(&ModelDoc::from_json(text)?)
    }

    /// Canonical document: parents in declaration order, every row listed in lexicographic
    /// order, no `otherwise`.
    pub fn to_doc(&self) -> ModelDoc {
        let sig = self.signature();
        let exogenous = sig
            .exogenous()
            .map(|v| ExogenousDoc { name: sig.name(v).into(), range: sig.variable(v).range.clone() })
            .collect();
        let endogenous = sig
            .endogenous()
            .map(|v| {
                let eq = self.equation(v);
                let table = eq
                    .rows()
                    .map(|(vals, out)| RowDoc {
                        when: eq
                            .parents()
                            .iter()
                            .zip(vals)
                            .map(|(p, x)| (sig.name(*p).to_string(), sig.value_name(*p, x).to_string()))
                            .collect(),
                        then: out.iter().map(|x| sig.value_name(v, x).to_string()).collect(),
                    })
                    .collect();
                EndogenousDoc {
                    name: sig.name(v).into(),
                    range: sig.variable(v).range.clone(),
                    parents: eq.parents().iter().map(|p| sig.name(*p).to_string()).collect(),
                    table,
                    otherwise: None,
                }
            })
            .collect();
        ModelDoc { exogenous, endogenous }
    }

    pub fn to_json_pretty(&self) -> String {
        self.to_doc().to_json_pretty()
    }
}

fn build(doc: &ModelDoc) -> std::result::Result<Nscm, Vec<Diagnostic>> {
    let vars: Vec<Variable> = doc
        .exogenous
        .iter()
        .map(|e| Variable { name: e.name.clone(), kind: VarKind::Exogenous, range: e.range.clone() })
        .chain(doc.endogenous.iter().map(|e| Variable {
            name: e.name.clone(),
            kind: VarKind::Endogenous,
            range: e.range.clone(),
        }))
        .collect();
    let problems = Signature::check(&vars);
    if !problems.is_empty() {
        return Err(problems.into_iter().map(Diagnostic::error).collect());
    }
    let sig = Signature::new(
        doc.exogenous.iter().map(|e| (e.name.clone(), e.range.clone())),
        doc.endogenous.iter().map(|e| (e.name.clone(), e.range.clone())),
    )
    .map_err(|e| vec![Diagnostic::error(e.to_string())])?;
    let sig = Arc::new(sig);

    let mut diags = Vec::new();
    let mut equations = Vec::new();
    for (i, e) in doc.endogenous.iter().enumerate() {
        let child = VarId(sig.n_exogenous() + i);
        if let Some(eq) = build_equation(&sig, child, e, &mut diags) {
            equations.push(eq);
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Nscm::new(sig, equations).map_err(|e| vec![Diagnostic::error(e.to_string())])
}

fn build_equation(
    sig: &Signature,
    child: VarId,
    e: &EndogenousDoc,
    diags: &mut Vec<Diagnostic>,
) -> Option<MultiFunction> {
    let before = diags.len();
    let mut err = |msg: String| diags.push(Diagnostic::error(format!("`{}`: {msg}", e.name)));

    let mut parents = Vec::new();
    for p in &e.parents {
        match sig.lookup(p) {
            Ok(v) if v == child => err("lists itself as a parent".into()),
            Ok(v) if parents.contains(&v) => err(format!("parent `{p}` is listed twice")),
            Ok(v) => parents.push(v),
            Err(_) => err(format!("unknown parent `{p}`")),
        }
    }
    parents.sort();

    let values_of = |list: &[String], err: &mut dyn FnMut(String)| -> Option<ValueSet> {
        if list.is_empty() {
            err("an output list is empty".into());
            return None;
        }
        let mut set = ValueSet::empty();
        let mut ok = true;
        for t in list {
            match sig.value_index(child, t) {
                Ok(x) if set.contains(x) => {
                    err(format!("output value `{t}` is listed twice"));
                    ok = false;
                }
                Ok(x) => set.insert(x),
                Err(_) => {
                    err(format!("output value `{t}` is not in its range"));
                    ok = false;
                }
            }
        }
        ok.then_some(set)
    };

    let radices: Vec<usize> = parents.iter().map(|p| sig.range_len(*p)).collect();
    let strides: Vec<usize> = {
        let mut s = vec![1; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * radices[i + 1];
        }
        s
    };
    let rows: usize = radices.iter().product();
    let mut table: Vec<Option<ValueSet>> = vec![None; rows];
    let mut seen = HashSet::new();

    for (r, row) in e.table.iter().enumerate() {
        let keys: HashMap<&str, &str> = row.when.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let mut index = 0;
        let mut ok = true;
        for name in row.when.keys() {
            if !parents.iter().any(|p| sig.name(*p) == name) {
                err(format!("row {r} conditions on `{name}`, which is not a parent"));
                ok = false;
            }
        }
        for (p, stride) in parents.iter().zip(&strides) {
            match keys.get(sig.name(*p)) {
                None => {
                    err(format!("row {r} does not assign parent `{}`", sig.name(*p)));
                    ok = false;
                }
                Some(tok) => match sig.value_index(*p, tok) {
                    Ok(x) => index += x * stride,
                    Err(_) => {
                        err(format!("row {r}: `{tok}` is not a value of `{}`", sig.name(*p)));
                        ok = false;
                    }
                },
            }
        }
        let out = values_of(&row.then, &mut err);
        if !ok {
            continue;
        }
        if !seen.insert(index) {
            err(format!("row {r} repeats an earlier parent assignment"));
            continue;
        }
        table[index] = out;
    }

    let fallback = e.otherwise.as_ref().and_then(|o| values_of(o, &mut err));
    let mut missing = Vec::new();
    for (idx, vals) in Odometer::new(radices.clone()).enumerate() {
        if table[idx].is_none() && !seen.contains(&idx) {
            match fallback {
                Some(set) => table[idx] = Some(set),
                None if e.otherwise.is_none() => missing.push(
                    parents
                        .iter()
                        .zip(&vals)
                        .map(|(p, x)| format!("{}={}", sig.name(*p), sig.value_name(*p, *x)))
                        .collect::<Vec<_>>()
                        .join(","),
                ),
                None => {}
            }
        }
    }
    if !missing.is_empty() {
        err(format!("table has no row for {{{}}} and no `otherwise`", missing.join("}, {")));
    }
    if diags.len() > before {
        return None;
    }
    let table: Vec<ValueSet> = table.into_iter().map(|s| s.expect("all rows filled")).collect();
    MultiFunction::new(sig, child, parents, table).ok()
}
