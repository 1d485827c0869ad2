//! Text and JSON rendering of verdicts, models and traces. All output is
//! deterministic: collections render in sorted order and JSON keys are
//! ordered.

use klm_core::engine::{Stats, TraceNode, Verdict};
use klm_core::models::{ModelRepr, OracleAnswer, PrefModel, StateModel};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

fn atoms_line(val: &std::collections::BTreeSet<String>) -> String {
    let items: Vec<&str> = val.iter().map(|s| s.as_str()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Integer rank levels when the order is modular (every ranked model), used
/// for readable text output.
fn rank_levels(worlds: usize, less: &std::collections::BTreeSet<(usize, usize)>) -> Option<Vec<usize>> {
    let mut rank = vec![0usize; worlds];
    let mut changed = true;
    let mut steps = 0;
    while changed {
        changed = false;
        steps += 1;
        if steps > worlds + 1 {
            return None;
        }
        for &(u, v) in less {
            if rank[v] <= rank[u] {
                rank[v] = rank[u] + 1;
                changed = true;
            }
        }
    }
    // The ranks faithfully represent the order only when u < v iff
    // rank(u) < rank(v).
    for u in 0..worlds {
        for v in 0..worlds {
            if u != v && (rank[u] < rank[v]) != less.contains(&(u, v)) {
                return None;
            }
        }
    }
    Some(rank)
}

fn pref_model_text(m: &PrefModel, point: usize) -> String {
    let mut out = String::new();
    if let Some(ranks) = rank_levels(m.worlds, &m.less) {
        let max = ranks.iter().copied().max().unwrap_or(0);
        for level in 0..=max {
            let members: Vec<String> = (0..m.worlds)
                .filter(|&w| ranks[w] == level)
                .map(|w| format!("w{w} {}", atoms_line(&m.val[w])))
                .collect();
            if !members.is_empty() {
                out.push_str(&format!("  rank {level}: {}\n", members.join(", ")));
            }
        }
    } else {
        for w in 0..m.worlds {
            out.push_str(&format!("  w{w}: {}\n", atoms_line(&m.val[w])));
        }
        let pairs: Vec<String> = m.less.iter().map(|(u, v)| format!("w{u} < w{v}")).collect();
        out.push_str(&format!("  order: {}\n", if pairs.is_empty() { "(empty)".to_string() } else { pairs.join(", ") }));
    }
    out.push_str(&format!("  designated: w{point}\n"));
    out
}

fn state_model_text(m: &StateModel, point: usize) -> String {
    let mut out = String::new();
    for w in 0..m.worlds {
        out.push_str(&format!("  world u{w}: {}\n", atoms_line(&m.val[w])));
    }
    for s in 0..m.states {
        let labels: Vec<String> = m.label[s].iter().map(|w| format!("u{w}")).collect();
        out.push_str(&format!("  state s{s}: {{{}}}\n", labels.join(", ")));
    }
    let pairs: Vec<String> = m.less.iter().map(|(u, v)| format!("s{u} < s{v}")).collect();
    out.push_str(&format!("  order: {}\n", if pairs.is_empty() { "(empty)".to_string() } else { pairs.join(", ") }));
    out.push_str(&format!("  designated: s{point}\n"));
    out
}

/// Deterministic rendering of a model (worlds sorted, pairs sorted).
pub fn format_model(model: &ModelRepr, point: usize, format: Format) -> String {
    match format {
        Format::Text => match model {
            ModelRepr::Pref(m) => pref_model_text(m, point),
            ModelRepr::State(m) => state_model_text(m, point),
        },
        Format::Json => model_json(model, point).to_string(),
    }
}

pub fn model_json(model: &ModelRepr, point: usize) -> Value {
    match model {
        ModelRepr::Pref(m) => json!({
            "type": "preferential",
            "worlds": m.worlds,
            "order": m.less.iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>(),
            "valuations": m.val.iter().map(|v| Value::from(v.iter().cloned().collect::<Vec<_>>())).collect::<Vec<_>>(),
            "designated": point,
        }),
        ModelRepr::State(m) => json!({
            "type": "state",
            "states": m.states,
            "worlds": m.worlds,
            "labels": m.label.iter().map(|l| Value::from(l.iter().copied().collect::<Vec<_>>())).collect::<Vec<_>>(),
            "order": m.less.iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>(),
            "valuations": m.val.iter().map(|v| Value::from(v.iter().cloned().collect::<Vec<_>>())).collect::<Vec<_>>(),
            "designated": point,
        }),
    }
}

/// Flattens the trace tree into `{"nodes": [{rule, principal?, children}]}`
/// with the root at index 0.
pub fn trace_json(trace: &TraceNode) -> Value {
    fn flatten(t: &TraceNode, nodes: &mut Vec<Value>) -> usize {
        let at = nodes.len();
        nodes.push(Value::Null);
        let children: Vec<usize> = t.children.iter().map(|c| flatten(c, nodes)).collect();
        let mut obj = Map::new();
        obj.insert("rule".into(), Value::from(t.rule.clone()));
        if let Some(p) = &t.principal {
            obj.insert("principal".into(), Value::from(p.clone()));
        }
        obj.insert("children".into(), Value::from(children));
        nodes[at] = Value::Object(obj);
        at
    }
    let mut nodes = Vec::new();
    flatten(trace, &mut nodes);
    json!({ "nodes": nodes })
}

pub fn stats_json(stats: &Stats, millis: u128) -> Value {
    json!({
        "nodes": stats.nodes,
        "labels": stats.labels,
        "millis": millis as u64,
    })
}

pub fn oracle_json(answer: &OracleAnswer) -> Value {
    match answer {
        OracleAnswer::Sat { model, point } => json!({
            "status": "sat",
            "model": model_json(model, *point),
        }),
        OracleAnswer::NoModelWithinBound { definitive } => json!({
            "status": if *definitive { "unsat" } else { "no-model-within-bound" },
            "definitive": definitive,
        }),
    }
}

pub fn verdict_status(v: &Verdict) -> &'static str {
    if v.is_sat() {
        "sat"
    } else {
        "unsat"
    }
}
