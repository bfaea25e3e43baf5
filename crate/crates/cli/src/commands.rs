use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nscm::actual_cause::{explain, list_setting_simplifications, CauseOptions, CauseQuery};
use nscm::dependence::{depends_on, directly_depends};
use nscm::discovery::{build_model, generate_possibilities, infer_gs, PossibilitySet};
use nscm::formula::{evaluate, parse_formula, Atom, Setting};
use nscm::graph::{fmt_edge_list, parse_edge_list};
use nscm::simplification::{
    enumerate_graph_simplifications, extension_violation, intervention_space, is_setting_simplification,
    structural_simplify, GraphSimplification,
};
use nscm::{validate_model, Context, Dag, Edge, Intervention, ModelDoc, Nscm, Signature, World};
use serde_json::{json, Value as Json};

use crate::{CauseArgs, Cli, Command, DiscoverArgs, Failure, Report};

type Outcome = Result<Report, Failure>;

const MAX_ENDOGENOUS: usize = 12;
const MAX_INTERVENTION_SPACE: u128 = 10_000_000;

pub fn run(cli: &Cli) -> Outcome {
    let force = cli.force;
    match &cli.command {
        Command::Validate { model } => validate(model),
        Command::Solve { model, context, intervention } => {
            let m = load(model, force)?;
            solve(&m, context.as_deref(), intervention.as_deref())
        }
        Command::Eval { model, formula, context, state } => {
            let m = load(model, force)?;
            eval(&m, formula, context.as_deref(), state.as_deref())
        }
        Command::Depends { model, from, to, direct, witness } => {
            depends(&load(model, force)?, from, to, *direct, *witness)
        }
        Command::Cause(args) => cause(&load(&args.model, force)?, args),
        Command::Simplify { model, remove, setting_state, setting_context } => {
            simplify(&load(model, force)?, remove.as_deref(), setting_state.as_deref(), setting_context.as_deref())
        }
        Command::Extension { model1, model2 } => extension(&load(model1, force)?, &load(model2, force)?),
        Command::Discover(args) => discover(args, force),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path, force: bool) -> Result<Nscm, Failure> {
    let m = Nscm::from_json(&read(path)?)?;
    guard(m.signature(), force)?;
    Ok(m)
}

fn guard(sig: &Signature, force: bool) -> Result<(), Failure> {
    if force {
        return Ok(());
    }
    let space = intervention_space(sig);
    if sig.n_endogenous() > MAX_ENDOGENOUS || space > MAX_INTERVENTION_SPACE {
        return Err(Failure::semantic(format!(
            "enumeration too large: {} endogenous variables, {space} context/intervention pairs \
             (limits {MAX_ENDOGENOUS} and {MAX_INTERVENTION_SPACE}); pass --force to run anyway",
            sig.n_endogenous()
        )));
    }
    Ok(())
}

/// An omitted context means the empty one when the model has no exogenous variables.
fn context_or_empty(sig: &Signature, text: Option<&str>, flag: &str) -> Result<Context, Failure> {
    match text {
        Some(t) => Ok(sig.parse_context(t)?),
        None if sig.n_exogenous() == 0 => Ok(Context(vec![])),
        None => Err(Failure::usage(format!("{flag} is required for a model with exogenous variables"))),
    }
}

fn world(m: &Nscm, context: Option<&str>, state: &str, flag: &str) -> Result<World, Failure> {
    let sig = m.signature();
    let u = context_or_empty(sig, context, flag)?;
    let w = World::new(&u, &sig.parse_state(state)?);
    if !m.is_solution(&w)? {
        return Err(nscm::Error::NotASolution.into());
    }
    Ok(w)
}

fn atom(sig: &Signature, text: &str) -> Result<Atom, Failure> {
    match sig.parse_pairs(text)?.as_slice() {
        &[(var, value)] => Ok(Atom { var, value }),
        _ => Err(Failure::usage(format!("expected a single `NAME=VALUE`, found `{text}`"))),
    }
}

fn edges_json(sig: &Signature, edges: &[Edge]) -> Json {
    edges.iter().map(|&(p, c)| json!([sig.name(p), sig.name(c)])).collect()
}

fn braces(sig: &Signature, edges: &[Edge]) -> String {
    format!("{{{}}}", fmt_edge_list(sig, edges))
}

fn model_json(m: &Nscm) -> Json {
    serde_json::to_value(m.to_doc()).expect("model documents serialize")
}

fn validate(path: &Path) -> Outcome {
    let doc = ModelDoc::from_json(&read(path)?)?;
    let diags = validate_model(&doc);
    let errors = diags.iter().filter(|d| d.is_error()).count();
    let mut text = String::new();
    for d in &diags {
        let _ = writeln!(text, "{d}");
    }
    let json = json!({"valid": errors == 0, "diagnostics": diags});
    if errors > 0 {
        let message = diags.iter().filter(|d| d.is_error()).map(|d| d.message.as_str()).collect::<Vec<_>>();
        return Err(Failure::semantic(format!("invalid model: {}", message.join("; "))));
    }
    let m = Nscm::from_doc(&doc)?;
    let sig = m.signature();
    let _ = writeln!(
        text,
        "ok: {} exogenous, {} endogenous, {} edges, {}",
        sig.n_exogenous(),
        sig.n_endogenous(),
        m.graph().edge_count(),
        if m.is_deterministic() { "deterministic" } else { "nondeterministic" }
    );
    Ok(Report::ok(text, json))
}

fn solve(m: &Nscm, context: Option<&str>, intervention: Option<&str>) -> Outcome {
    let sig = m.signature();
    let i = match intervention {
        Some(t) => sig.parse_intervention(t)?,
        None => Intervention::empty(),
    };
    let contexts: Vec<Context> = match context {
        Some(t) => vec![sig.parse_context(t)?],
        None => sig.contexts().collect(),
    };
    let mi = m.intervene(&i);
    let mut text = String::new();
    if !i.is_empty() {
        let _ = writeln!(text, "do({})", i.display(sig));
    }
    let mut rows = Vec::new();
    for u in &contexts {
        let sols = mi.solutions(u);
        let shown = if sig.n_exogenous() == 0 { "(empty)".to_string() } else { sig.fmt_context(u) };
        let _ = writeln!(text, "context {shown}: {} solution{}", sols.len(), if sols.len() == 1 { "" } else { "s" });
        for s in &sols {
            let _ = writeln!(text, "  {}", sig.fmt_state(s));
        }
        let states: Vec<Json> = sols.iter().map(|s| sig.state_json(s)).collect();
        rows.push(json!({"context": sig.context_json(u), "states": states}));
    }
    Ok(Report::ok(text, json!({"do": sig.intervention_json(&i), "solutions": rows})))
}

fn eval(m: &Nscm, formula: &str, context: Option<&str>, state: Option<&str>) -> Outcome {
    let sig = m.signature();
    let psi = parse_formula(sig, formula)?;
    let (setting, name) = match (context, state) {
        (_, Some(s)) => (Setting::Full(world(m, context, s, "--context")?), "full"),
        (Some(c), None) => (Setting::Partial(sig.parse_context(c)?), "partial"),
        (None, None) => (Setting::Model, "model"),
    };
    let value = evaluate(m, &setting, &psi)?;
    let printed = psi.display(sig).to_string();
    let json = json!({"formula": printed, "semantics": name, "value": value});
    Ok(Report::verdict(value, format!("{value}\n"), json))
}

fn depends(m: &Nscm, from: &str, to: &str, direct: bool, witness: bool) -> Outcome {
    let sig = m.signature();
    let (x, y) = (sig.lookup_endogenous(from)?, sig.lookup_endogenous(to)?);
    if x == y {
        return Err(Failure::semantic("--from and --to must name different variables"));
    }
    let found = if direct { directly_depends(m, x, y)? } else { depends_on(m, x, y)? };
    let verb = match (found.is_some(), direct) {
        (true, true) => "directly depends",
        (true, false) => "depends",
        (false, true) => "does not directly depend",
        (false, false) => "does not depend",
    };
    let mut text = format!("{} {verb} on {}\n", sig.name(y), sig.name(x));
    if let (true, Some(d)) = (witness, &found) {
        let _ = writeln!(text, "witness: {}", d.describe(sig));
    }
    let json = json!({
        "from": sig.name(x),
        "to": sig.name(y),
        "direct": direct,
        "depends": found.is_some(),
        "witness": found.as_ref().map(|d| d.to_json(sig)),
    });
    Ok(Report::verdict(found.is_some(), text, json))
}

fn cause(m: &Nscm, args: &CauseArgs) -> Outcome {
    let sig = m.signature();
    let w = world(m, args.context.as_deref(), &args.state, "--context")?;
    let q = CauseQuery::new(m.clone(), w, atom(sig, &args.cause)?, atom(sig, &args.effect)?)?;
    let opts = CauseOptions { prune: !args.no_prune, require_distinct: args.require_distinct };
    let report = explain(&q, opts)?;
    Ok(Report::verdict(report.verdict, report.render(&q, args.witnesses), report.to_json(&q)))
}

fn simplify(m: &Nscm, remove: Option<&str>, state: Option<&str>, context: Option<&str>) -> Outcome {
    let sig = m.signature();
    let setting = match (state, context) {
        (Some(s), c) => Some(world(m, c, s, "--setting-context")?),
        (None, Some(_)) => return Err(Failure::usage("--setting-context needs --setting-state")),
        (None, None) => None,
    };
    let Some(remove) = remove else {
        let listed: Vec<Vec<Edge>> = match &setting {
            Some(w) => list_setting_simplifications(m, w)?.into_iter().map(|(gs, _)| gs.removed_edges).collect(),
            None => enumerate_graph_simplifications(m.graph())?.into_iter().map(|gs| gs.removed_edges).collect(),
        };
        let mut text = String::new();
        for edges in &listed {
            let _ = writeln!(text, "{}", braces(sig, edges));
        }
        let json = json!({
            "setting": setting.as_ref().map(|w| json!({"context": sig.context_json(&w.context()), "state": sig.state_json(&w.state())})),
            "simplifications": listed.iter().map(|e| json!({"removed_edges": edges_json(sig, e)})).collect::<Vec<_>>(),
        });
        return Ok(Report::ok(text, json));
    };
    let gs = GraphSimplification::new(m.graph(), &parse_edge_list(sig, remove)?)?;
    let m2 = structural_simplify(m, &gs)?;
    let mut text = format!("removed {}\n", braces(sig, &gs.removed_edges));
    let verdict = match &setting {
        Some(w) => {
            let holds = is_setting_simplification(m, &m2, w)?;
            let _ = writeln!(
                text,
                "{} a setting simplification at ({})",
                if holds { "is" } else { "is not" },
                sig.fmt_world(w)
            );
            Some(holds)
        }
        None => None,
    };
    text.push_str(&m2.to_json_pretty());
    text.push('\n');
    let json = json!({
        "removed_edges": edges_json(sig, &gs.removed_edges),
        "setting_simplification": verdict,
        "model": model_json(&m2),
    });
    Ok(Report::verdict(verdict.unwrap_or(true), text, json))
}

fn extension(m1: &Nscm, m2: &Nscm) -> Outcome {
    let sig = m1.signature();
    let violation = extension_violation(m1, m2)?;
    let text = match &violation {
        None => "MODEL2 is an interventional extension of MODEL1\n".to_string(),
        Some(v) => format!(
            "MODEL2 is not an interventional extension of MODEL1: context ({}), do({}), state ({}) solves only MODEL1\n",
            sig.fmt_context(&v.context),
            v.intervention.display(sig),
            sig.fmt_state(&v.state)
        ),
    };
    let json = json!({"extension": violation.is_none(), "violation": violation.as_ref().map(|v| v.to_json(sig))});
    Ok(Report::verdict(violation.is_none(), text, json))
}

/// Every edge consistent with a topological order of `base`.
fn complete_over(sig: &Signature, base: &Dag) -> Result<Dag, Failure> {
    let order = base.topological_order();
    let mut edges = Vec::new();
    for (i, &p) in order.iter().enumerate() {
        for &c in &order[i + 1..] {
            if sig.is_endogenous(c) {
                edges.push((p, c));
            }
        }
    }
    Ok(Dag::new(sig, edges)?)
}

fn discover(args: &DiscoverArgs, force: bool) -> Outcome {
    let s = match (&args.model, &args.possibilities) {
        (Some(path), _) => generate_possibilities(&load(path, force)?),
        (None, Some(path)) => {
            let s = PossibilitySet::from_json(&read(path)?)?;
            guard(s.signature(), force)?;
            s
        }
        (None, None) => return Err(Failure::usage("give a MODEL or --possibilities FILE")),
    };
    if let Some(out) = &args.save_possibilities {
        fs::write(out, s.to_json_pretty() + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
    }
    let sig = s.signature();
    let gs = infer_gs(&s);
    let graph = match args.graph.as_str() {
        "gs" => gs.clone(),
        "complete" => complete_over(sig, &gs)?,
        path => {
            let text = read(Path::new(path))?;
            Dag::new(sig, parse_edge_list(sig, &text.replace('\n', ","))?)?
        }
    };
    let m = build_model(&s, &graph)?;
    let text = format!(
        "records: {}, states: {}\nG_S: {}\ngraph: {}\n{}\n",
        s.record_count(),
        s.state_count(),
        braces(sig, &gs.edges()),
        braces(sig, &graph.edges()),
        m.to_json_pretty()
    );
    let json = json!({
        "records": s.record_count(),
        "states": s.state_count(),
        "gs": edges_json(sig, &gs.edges()),
        "graph": edges_json(sig, &graph.edges()),
        "model": model_json(&m),
    });
    Ok(Report::ok(text, json))
}
