//! Decision procedure for rational logic R.
//!
//! Modularity makes an unlabelled calculus awkward, so R uses labelled nodes:
//! world formulas `x: F` and relation formulas `x < y`, with a modularity
//! rule that saturates the order and box propagation along every new edge.
//! Termination comes from used-label lists on positive conditionals and from
//! marking negated boxes as considered; the default engine reuses an existing
//! minimal world instead of creating a fresh one whenever possible, which
//! keeps the label count linear.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Decision, DecideOptions, Engine, Recorder, Stats, TraceNode, Verdict};
use crate::models::{ModelRepr, PrefModel};
use crate::syntax::{cond_occurrences, Formula, Logic};

pub type Label = u32;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabelledNode {
    /// World formulas `x: F`.
    pub world_formulas: BTreeSet<(Label, Formula)>,
    /// Relation formulas `x < y` as `(x, y)`.
    pub rel: BTreeSet<(Label, Label)>,
    /// Labels each positive conditional has been expanded at.
    pub used_labels: BTreeMap<Formula, BTreeSet<Label>>,
    /// Negated boxes `(y, ~[]~A)` already realized.
    pub considered: BTreeSet<(Label, Formula)>,
    pub labels: BTreeSet<Label>,
    pub next_label: Label,
}

impl LabelledNode {
    pub fn root(gamma: &BTreeSet<Formula>) -> LabelledNode {
        LabelledNode {
            world_formulas: gamma.iter().map(|f| (0, f.clone())).collect(),
            rel: BTreeSet::new(),
            used_labels: BTreeMap::new(),
            considered: BTreeSet::new(),
            labels: [0].into_iter().collect(),
            next_label: 1,
        }
    }

    pub fn has(&self, x: Label, f: &Formula) -> bool {
        self.world_formulas.contains(&(x, f.clone()))
    }

    fn fresh(&mut self) -> Label {
        let l = self.next_label;
        self.next_label += 1;
        self.labels.insert(l);
        l
    }

    /// Box propagation `Γ^{from -> to}`: `to` sits below `from`, so every
    /// `from: []~B` yields `to: ~B` and `to: []~B`.
    fn propagate_boxes(&mut self, from: Label, to: Label) {
        let adds: Vec<Formula> = self
            .world_formulas
            .iter()
            .filter_map(|(x, f)| match f {
                Formula::BoxNeg(_) if *x == from => Some(f.clone()),
                _ => None,
            })
            .collect();
        for f in adds {
            if let Formula::BoxNeg(body) = &f {
                self.world_formulas.insert((to, (**body).clone().neg()));
            }
            self.world_formulas.insert((to, f));
        }
    }

    pub fn is_axiom(&self) -> bool {
        self.world_formulas.iter().any(|(x, f)| match f {
            Formula::Neg(g) => {
                matches!(**g, Formula::Atom(_)) && self.world_formulas.contains(&(*x, (**g).clone()))
            }
            _ => false,
        }) || self.rel.iter().any(|&(x, y)| self.rel.contains(&(y, x)))
    }
}

/// The dynamic box rule: adds a fresh minimal `A`-world below `x` together
/// with the boxes `x` carries. The principal stays in the node and is marked
/// considered by the search.
pub fn apply_box_minus_r(n: &LabelledNode, x: Label, principal: &Formula) -> Option<LabelledNode> {
    if !n.has(x, principal) {
        return None;
    }
    let body = match principal {
        Formula::Neg(g) => match &**g {
            Formula::BoxNeg(body) => (**body).clone(),
            _ => return None,
        },
        _ => return None,
    };
    let mut out = n.clone();
    let y = out.fresh();
    out.rel.insert((y, x));
    out.propagate_boxes(x, y);
    out.world_formulas.insert((y, body.clone()));
    out.world_formulas.insert((y, body.box_neg()));
    Some(out)
}

/// The modularity rule on `x < y` with side label `z`: either `z < y` or
/// `x < z`, each with the corresponding box propagation. Side condition:
/// neither relation is already present and `z` occurs in the node.
pub fn apply_modularity(n: &LabelledNode, rel: (Label, Label), z: Label) -> Option<(LabelledNode, LabelledNode)> {
    let (x, y) = rel;
    if !n.rel.contains(&rel) || !n.labels.contains(&z) {
        return None;
    }
    if n.rel.contains(&(x, z)) || n.rel.contains(&(z, y)) {
        return None;
    }
    let mut left = n.clone();
    left.rel.insert((z, y));
    left.propagate_boxes(y, z);
    let mut right = n.clone();
    right.rel.insert((x, z));
    right.propagate_boxes(z, x);
    Some((left, right))
}

// ---------------------------------------------------------------------------
// Measure
// ---------------------------------------------------------------------------

/// Static data of the measure: the boxes that can ever appear (`n0`) and the
/// multiset of negated boxes the positive conditionals can generate (`k0`).
#[derive(Debug, Clone, Default)]
pub struct RMeasureContext {
    /// `[]~A` for every conditional occurring in the input.
    pub boxes: BTreeSet<Formula>,
    /// Multiplicity per `[]~A`: number of distinct positive conditionals
    /// with antecedent `A`.
    pub neg_box_mult: BTreeMap<Formula, u64>,
    pub n0: u64,
    pub k0: u64,
}

impl RMeasureContext {
    pub fn of(gamma: &BTreeSet<Formula>) -> RMeasureContext {
        let (pos, neg) = cond_occurrences(gamma.iter().cloned());
        let mut boxes = BTreeSet::new();
        let mut neg_box_mult: BTreeMap<Formula, u64> = BTreeMap::new();
        for c in pos.iter().chain(neg.iter()) {
            if let Formula::Cond(a, _) = c {
                boxes.insert((**a).clone().box_neg());
            }
        }
        for c in &pos {
            if let Formula::Cond(a, _) = c {
                *neg_box_mult.entry((**a).clone().box_neg()).or_insert(0) += 1;
            }
        }
        let n0 = boxes.len() as u64;
        let k0 = neg_box_mult.values().sum();
        RMeasureContext {
            boxes,
            neg_box_mult,
            n0,
            k0,
        }
    }
}

/// `m(Γ) = <c1, c2, c3, c4, c5>` with `c2` an integer multiset of per-label
/// pairs under the Dershowitz-Manna ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMeasure {
    pub c1: u64,
    /// Per-label `(n_x, k_x)`, kept sorted descending; multiset comparison
    /// is lexicographic on the sorted sequences.
    pub c2: Vec<(u64, u64)>,
    pub c3: u64,
    pub c4: u64,
    pub c5: u64,
    /// Complexities of the world formulas, sorted descending: `(or-)` keeps
    /// the complexity sum c5 equal, but the multiset strictly shrinks.
    pub tie: Vec<u64>,
}

impl PartialOrd for RMeasure {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RMeasure {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.c1
            .cmp(&other.c1)
            .then_with(|| self.c2.cmp(&other.c2))
            .then_with(|| self.c3.cmp(&other.c3))
            .then_with(|| self.c4.cmp(&other.c4))
            .then_with(|| self.c5.cmp(&other.c5))
            .then_with(|| self.tie.cmp(&other.tie))
    }
}

pub fn measure_r(n: &LabelledNode, ctx: &RMeasureContext) -> RMeasure {
    // c1: labelled negative conditional occurrences.
    let mut c1_pairs: BTreeSet<(Label, Formula)> = BTreeSet::new();
    for (x, f) in &n.world_formulas {
        let (_, neg) = cond_occurrences([f.clone()]);
        for c in neg {
            c1_pairs.insert((*x, c));
        }
    }
    // c2: per-label (n_x, k_x).
    let mut c2: Vec<(u64, u64)> = n
        .labels
        .iter()
        .map(|&x| {
            let have = ctx.boxes.iter().filter(|b| n.has(x, b)).count() as u64;
            let n_x = ctx.n0 - have;
            let realized: u64 = ctx
                .neg_box_mult
                .iter()
                .map(|(b, &mult)| {
                    let witnesses = n
                        .labels
                        .iter()
                        .filter(|&&y| n.rel.contains(&(y, x)) && n.has(y, b))
                        .count() as u64;
                    mult.min(witnesses)
                })
                .sum();
            (n_x, ctx.k0 - realized)
        })
        .collect();
    c2.sort_unstable_by(|a, b| b.cmp(a));
    // c3: (label, conditional) pairs still expandable.
    let conds: BTreeSet<&Formula> = n
        .world_formulas
        .iter()
        .filter_map(|(_, f)| matches!(f, Formula::Cond(..)).then_some(f))
        .collect();
    let c3: u64 = conds
        .iter()
        .map(|c| {
            let used = n.used_labels.get(*c);
            n.labels
                .iter()
                .filter(|x| used.map_or(true, |u| !u.contains(x)))
                .count() as u64
        })
        .sum();
    // c4: modularity obligations.
    let c4: u64 = n
        .labels
        .iter()
        .map(|&z| {
            n.rel
                .iter()
                .filter(|&&(x, y)| !n.rel.contains(&(x, z)) && !n.rel.contains(&(z, y)))
                .count() as u64
        })
        .sum();
    let mut tie: Vec<u64> = n.world_formulas.iter().map(|(_, f)| f.cp()).collect();
    tie.sort_unstable_by(|a, b| b.cmp(a));
    RMeasure {
        c1: c1_pairs.len() as u64,
        c2,
        c3,
        c4,
        c5: tie.iter().sum(),
        tie,
    }
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

enum StaticInst {
    Bool(Label, Formula),
    CondPlus(Formula, Label),
    Mod(Label, Label, Label),
}

fn static_instances(n: &LabelledNode) -> Vec<StaticInst> {
    let mut out = Vec::new();
    for (x, f) in &n.world_formulas {
        let decomposable = matches!(
            f,
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..)
        ) || matches!(f, Formula::Neg(g) if matches!(
            **g,
            Formula::Neg(_) | Formula::And(..) | Formula::Or(..) | Formula::Implies(..)
        ));
        if decomposable {
            out.push(StaticInst::Bool(*x, f.clone()));
        }
    }
    let conds: BTreeSet<Formula> = n
        .world_formulas
        .iter()
        .filter(|(_, f)| matches!(f, Formula::Cond(..)))
        .map(|(_, f)| f.clone())
        .collect();
    for c in conds {
        let used = n.used_labels.get(&c).cloned().unwrap_or_default();
        for &x in &n.labels {
            if !used.contains(&x) {
                out.push(StaticInst::CondPlus(c.clone(), x));
            }
        }
    }
    for &(x, y) in &n.rel {
        for &z in &n.labels {
            if !n.rel.contains(&(x, z)) && !n.rel.contains(&(z, y)) {
                out.push(StaticInst::Mod(x, y, z));
            }
        }
    }
    out
}

fn apply_static_r(n: &LabelledNode, inst: &StaticInst) -> (&'static str, String, Vec<LabelledNode>) {
    // Branch subsumption as in the unlabelled engines: a branch whose
    // additions are already present subsumes the others.
    let collapse = |branches: &[Vec<Formula>], x: Label| {
        branches
            .iter()
            .position(|adds| adds.iter().all(|a| n.has(x, a)))
    };
    match inst {
        StaticInst::Bool(x, f) => {
            let branches: Vec<Vec<Formula>> = match f {
                Formula::And(l, r) => vec![vec![(**l).clone(), (**r).clone()]],
                Formula::Or(l, r) => vec![vec![(**l).clone()], vec![(**r).clone()]],
                Formula::Implies(l, r) => vec![vec![(**l).clone().neg()], vec![(**r).clone()]],
                Formula::Neg(g) => match &**g {
                    Formula::Neg(h) => vec![vec![(**h).clone()]],
                    Formula::And(l, r) => vec![vec![(**l).clone().neg()], vec![(**r).clone().neg()]],
                    Formula::Or(l, r) => vec![vec![(**l).clone().neg(), (**r).clone().neg()]],
                    Formula::Implies(l, r) => vec![vec![(**l).clone(), (**r).clone().neg()]],
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            let chosen: Vec<usize> = match collapse(&branches, *x) {
                Some(b) => vec![b],
                None => (0..branches.len()).collect(),
            };
            let children = chosen
                .into_iter()
                .map(|b| {
                    let mut child = n.clone();
                    child.world_formulas.remove(&(*x, f.clone()));
                    for a in &branches[b] {
                        child.world_formulas.insert((*x, a.clone()));
                    }
                    child
                })
                .collect();
            ("(bool)", format!("x{x}: {f}"), children)
        }
        StaticInst::CondPlus(c, x) => {
            let (a, b) = match c {
                Formula::Cond(a, b) => ((**a).clone(), (**b).clone()),
                _ => unreachable!(),
            };
            let branches = vec![vec![a.clone().neg()], vec![a.box_neg().neg()], vec![b]];
            let chosen: Vec<usize> = match collapse(&branches, *x) {
                Some(b) => vec![b],
                None => (0..branches.len()).collect(),
            };
            let children = chosen
                .into_iter()
                .map(|bi| {
                    let mut child = n.clone();
                    for add in &branches[bi] {
                        child.world_formulas.insert((*x, add.clone()));
                    }
                    child.used_labels.entry(c.clone()).or_default().insert(*x);
                    child
                })
                .collect();
            ("(cond+)", format!("{c} at x{x}"), children)
        }
        StaticInst::Mod(x, y, z) => {
            let (left, right) = apply_modularity(n, (*x, *y), *z).expect("side condition checked");
            ("(<)", format!("x{x} < x{y} with x{z}"), vec![left, right])
        }
    }
}

enum RResult {
    Sat(LabelledNode),
    Closed(Option<TraceNode>),
}

struct RSearch<'a> {
    ctx: &'a RMeasureContext,
    naive: bool,
    tracing: bool,
}

impl RSearch<'_> {
    fn search(&self, n: &LabelledNode, rec: &mut Recorder) -> RResult {
        rec.visit();
        if n.next_label > rec.labels {
            rec.labels = n.next_label;
        }
        if n.is_axiom() {
            return RResult::Closed(self.tracing.then(|| TraceNode::leaf("(AX)", None)));
        }
        let insts = static_instances(n);
        if !insts.is_empty() {
            let inst = &insts[rec.pick(insts.len())];
            let (rule, principal, children) = apply_static_r(n, inst);
            let premise_m = rec.record_measures.then(|| measure_r(n, self.ctx));
            let mut traces = Vec::new();
            for child in &children {
                let ev = premise_m
                    .as_ref()
                    .and_then(|pm| rec.event(rule, &measure_r(child, self.ctx) < pm));
                match self.search(child, rec) {
                    RResult::Sat(m) => return RResult::Sat(m),
                    RResult::Closed(t) => {
                        rec.mark_closed(ev);
                        if let Some(t) = t {
                            traces.push(t);
                        }
                    }
                }
            }
            return RResult::Closed(self.tracing.then(|| TraceNode {
                rule: rule.to_string(),
                principal: Some(principal),
                children: traces,
            }));
        }
        // Dynamic phase: negated conditionals first (each once, consumed).
        if let Some((u, f)) = n
            .world_formulas
            .iter()
            .find(|(_, f)| f.as_neg_cond().is_some())
            .cloned()
        {
            let (a, b) = f.as_neg_cond().map(|(a, b)| (a.clone(), b.clone())).unwrap();
            let mut child = n.clone();
            child.world_formulas.remove(&(u, f.clone()));
            let x = child.fresh();
            child.world_formulas.insert((x, a.clone()));
            child.world_formulas.insert((x, a.box_neg()));
            child.world_formulas.insert((x, b.neg()));
            let ev = if rec.record_measures {
                let dec = measure_r(&child, self.ctx) < measure_r(n, self.ctx);
                rec.event("(cond-)", dec)
            } else {
                None
            };
            return match self.search(&child, rec) {
                RResult::Sat(m) => RResult::Sat(m),
                RResult::Closed(t) => {
                    rec.mark_closed(ev);
                    RResult::Closed(self.tracing.then(|| TraceNode {
                        rule: "(cond-)".to_string(),
                        principal: Some(format!("x{u}: {f}")),
                        children: t.into_iter().collect(),
                    }))
                }
            };
        }
        // Unconsidered negated box.
        let next_box = n
            .world_formulas
            .iter()
            .find(|(y, f)| {
                matches!(f, Formula::Neg(g) if matches!(**g, Formula::BoxNeg(_)))
                    && !n.considered.contains(&(*y, (*f).clone()))
            })
            .cloned();
        if let Some((y, f)) = next_box {
            let body = match &f {
                Formula::Neg(g) => match &**g {
                    Formula::BoxNeg(body) => (**body).clone(),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            let boxed = body.clone().box_neg();
            let reuse = (!self.naive)
                .then(|| {
                    n.labels
                        .iter()
                        .find(|&&z| n.has(z, &body) && n.has(z, &boxed))
                        .copied()
                })
                .flatten();
            let (rule, child) = match reuse {
                Some(z) => {
                    let mut child = n.clone();
                    child.rel.insert((z, y));
                    child.propagate_boxes(y, z);
                    child.considered.insert((y, f.clone()));
                    ("(reuse-min)", child)
                }
                None => {
                    let mut child = apply_box_minus_r(n, y, &f).expect("principal present");
                    child.considered.insert((y, f.clone()));
                    ("(box-)", child)
                }
            };
            let ev = if rec.record_measures {
                let dec = measure_r(&child, self.ctx) < measure_r(n, self.ctx);
                rec.event(rule, dec)
            } else {
                None
            };
            return match self.search(&child, rec) {
                RResult::Sat(m) => RResult::Sat(m),
                RResult::Closed(t) => {
                    rec.mark_closed(ev);
                    RResult::Closed(self.tracing.then(|| TraceNode {
                        rule: rule.to_string(),
                        principal: Some(format!("x{y}: {f}")),
                        children: t.into_iter().collect(),
                    }))
                }
            };
        }
        RResult::Sat(n.clone())
    }
}

/// Canonical model of an open saturated node: worlds are the labels, the
/// order is the relation set, valuations read the atoms.
fn extract_r_model(n: &LabelledNode, atoms: &BTreeSet<String>) -> (PrefModel, usize) {
    let labels: Vec<Label> = n.labels.iter().copied().collect();
    let index_of = |l: Label| labels.iter().position(|&x| x == l).unwrap();
    let less = n.rel.iter().map(|&(x, y)| (index_of(x), index_of(y))).collect();
    let val = labels
        .iter()
        .map(|&l| {
            n.world_formulas
                .iter()
                .filter_map(|(x, f)| match f {
                    Formula::Atom(p) if *x == l => Some(p.clone()),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let model = PrefModel {
        atoms: atoms.iter().cloned().collect(),
        worlds: labels.len(),
        less,
        val,
    };
    (model, index_of(0))
}

pub fn decide_r(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> Decision {
    let mut rec = Recorder::new(options);
    let ctx = RMeasureContext::of(gamma);
    let atoms: BTreeSet<String> = gamma.iter().flat_map(|f| f.atoms()).collect();
    let search = RSearch {
        ctx: &ctx,
        naive: options.engine == Engine::Naive,
        tracing: options.record_trace,
    };
    let root = LabelledNode::root(gamma);
    match search.search(&root, &mut rec) {
        RResult::Sat(node) => {
            let (model, point) = extract_r_model(&node, &atoms);
            debug_assert!(
                crate::models::validate_model(&ModelRepr::Pref(model.clone()), Logic::R, &BTreeSet::new())
                    .is_empty(),
                "extracted R model is not ranked"
            );
            Decision {
                verdict: Verdict::Sat {
                    model: Some(ModelRepr::Pref(model)),
                    point,
                },
                stats: Stats {
                    nodes: rec.nodes,
                    labels: rec.labels,
                },
                measure_events: rec.events,
            }
        }
        RResult::Closed(trace) => Decision {
            verdict: Verdict::Unsat { trace },
            stats: Stats {
                nodes: rec.nodes,
                labels: rec.labels,
            },
            measure_events: rec.events,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn pf(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn gamma(items: &[&str]) -> BTreeSet<Formula> {
        items.iter().map(|s| pf(s)).collect()
    }

    fn decide(items: &[&str], engine: Engine) -> Decision {
        decide_r(
            &gamma(items),
            &DecideOptions {
                engine,
                record_trace: true,
                record_measures: true,
                ..DecideOptions::default()
            },
        )
    }

    #[test]
    fn box_minus_adds_fresh_minimal_world() {
        let mut n = LabelledNode::root(&BTreeSet::new());
        let nb = Formula::atom("a").box_neg().neg();
        n.world_formulas.insert((0, nb.clone()));
        let out = apply_box_minus_r(&n, 0, &nb).unwrap();
        assert!(out.rel.contains(&(1, 0)));
        assert!(out.has(1, &pf("a")));
        assert!(out.has(1, &Formula::atom("a").box_neg()));
        // Premise boxes propagate to the new world.
        let mut n2 = n.clone();
        n2.world_formulas.insert((0, Formula::atom("b").box_neg()));
        let out = apply_box_minus_r(&n2, 0, &nb).unwrap();
        assert!(out.has(1, &pf("~b")));
        assert!(out.has(1, &Formula::atom("b").box_neg()));
        // Realizing a box already present clashes.
        let mut n3 = n.clone();
        n3.world_formulas.insert((0, Formula::atom("a").box_neg()));
        let out = apply_box_minus_r(&n3, 0, &nb).unwrap();
        assert!(out.has(1, &pf("a")) && out.has(1, &pf("~a")));
    }

    #[test]
    fn modularity_rule() {
        let mut n = LabelledNode::root(&BTreeSet::new());
        n.labels.extend([1, 2]);
        n.next_label = 3;
        n.rel.insert((0, 1));
        let (left, right) = apply_modularity(&n, (0, 1), 2).unwrap();
        assert!(left.rel.contains(&(2, 1)));
        assert!(right.rel.contains(&(0, 2)));
        // Side condition: already-resolved pairs are not applicable.
        assert!(apply_modularity(&left, (0, 1), 2).is_none());
        // Unknown label.
        assert!(apply_modularity(&n, (0, 1), 9).is_none());
    }

    #[test]
    fn measure_examples() {
        let ctx = RMeasureContext::default();
        let empty = LabelledNode::root(&BTreeSet::new());
        let m = measure_r(&empty, &ctx);
        assert_eq!((m.c1, m.c3, m.c4, m.c5), (0, 0, 0, 0));
        assert_eq!(m.c2, vec![(0, 0)]);

        let g = gamma(&["a |~ b"]);
        let ctx = RMeasureContext::of(&g);
        let n = LabelledNode::root(&g);
        assert_eq!(measure_r(&n, &ctx).c3, 1);
        let insts = static_instances(&n);
        let cond_inst = insts
            .iter()
            .find(|i| matches!(i, StaticInst::CondPlus(..)))
            .unwrap();
        let (_, _, children) = apply_static_r(&n, cond_inst);
        for child in &children {
            assert_eq!(measure_r(child, &ctx).c3, 0);
            assert!(measure_r(child, &ctx) < measure_r(&n, &ctx));
        }
    }

    #[test]
    fn rm_instance_unsat_in_r() {
        for engine in [Engine::Default, Engine::Naive] {
            let d = decide(&["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
            assert!(d.measure_events.iter().all(|e| e.decreased || e.closed), "{engine:?}");
            let d = decide(&["(a |~ b) & ~(a |~ ~c)", "~(a & c |~ b)"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
        }
    }

    #[test]
    fn sat_cases_with_models() {
        for engine in [Engine::Default, Engine::Naive] {
            for case in [
                vec!["a |~ w", "~(a |~ ~m)"],
                vec!["a |~ b", "b |~ a"],
                vec!["~(a |~ b)"],
                vec![],
            ] {
                let d = decide(&case, engine);
                match &d.verdict {
                    Verdict::Sat { model: Some(ModelRepr::Pref(m)), point } => {
                        let g = gamma(&case);
                        for f in &g {
                            assert!(m.eval_at(*point, f), "{engine:?} {case:?}: {f}");
                        }
                        assert!(crate::models::validate_model(
                            &ModelRepr::Pref(m.clone()),
                            Logic::R,
                            &BTreeSet::new()
                        )
                        .is_empty());
                    }
                    other => panic!("expected SAT with model for {case:?}, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn verdicts_stable_under_rule_order() {
        let cases = [
            vec!["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"],
            vec!["a |~ b", "b |~ a", "~(a |~ b & a)"],
            vec!["a | b |~ c", "~(a |~ c)"],
        ];
        for case in &cases {
            let base = decide(case, Engine::Default).verdict.is_sat();
            for seed in 1..6 {
                let d = decide_r(
                    &gamma(case),
                    &DecideOptions {
                        shuffle_seed: Some(seed),
                        ..DecideOptions::default()
                    },
                );
                assert_eq!(d.verdict.is_sat(), base, "seed {seed} on {case:?}");
            }
        }
    }

    #[test]
    fn label_counts_stay_linear() {
        let g = gamma(&["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"]);
        let n: u64 = g.iter().map(Formula::cp).sum();
        let d = decide(&["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"], Engine::Default);
        assert!(u64::from(d.stats.labels) <= 2 * n, "{} labels for size {n}", d.stats.labels);
    }
}
