//! Decision procedure for loop-cumulative logic CL.
//!
//! The calculus is the P calculus with conditionals wrapped in the state
//! modality `L` plus the dynamic rule `(L-)`. The `(L-)` successors are
//! universally quantified accessibility successors, so a node is satisfiable
//! only if *all* of them are (unlike the box alternatives, of which one must
//! be). Extraction builds a bimodal (preferential + accessibility) model per
//! the completeness construction and converts it to a state model; the
//! conversion preserves boolean combinations of conditionals, which is the
//! whole base language for conditional knowledge bases.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::p::{apply_box_minus_strong, graft_failures, node_measure};
use super::{
    expand_static_rec, project, transitive_closure, Decision, DecideOptions, Engine, Recorder,
    Selector, Stats, TableauNode, TraceNode, Verdict, WorldIndex, WorldSet,
};
use crate::models::{ModelRepr, PrefModel, StateModel};
use crate::syntax::{Formula, Logic};

/// The `(L-)` rule. With negated L-formulas present, one conclusion per
/// `~L A`, each `Γ^{L↓}, ~A` — independent successor worlds that must all be
/// satisfiable. Without them, a single serial conclusion `Γ^{L↓}`. Empty when
/// Γ has no L-formulas at all.
pub fn apply_l_minus(n: &TableauNode) -> Vec<TableauNode> {
    l_minus_children(n).into_iter().map(|(_, _, c)| c).collect()
}

pub(crate) fn l_minus_children(n: &TableauNode) -> Vec<(&'static str, Formula, TableauNode)> {
    let l_down = project(n, Selector::LDown);
    let neg_ls: Vec<(Formula, Formula)> = n
        .gamma
        .iter()
        .filter_map(|f| match f {
            Formula::Neg(g) => match &**g {
                Formula::LMod(body) => Some((f.clone(), (**body).clone())),
                _ => None,
            },
            _ => None,
        })
        .collect();
    if !neg_ls.is_empty() {
        return neg_ls
            .into_iter()
            .map(|(principal, body)| {
                let mut gamma = l_down.clone();
                gamma.insert(body.neg());
                (
                    "(L-)",
                    principal,
                    TableauNode {
                        gamma,
                        sigma: BTreeSet::new(),
                    },
                )
            })
            .collect();
    }
    if let Some(first_l) = n.gamma.iter().find(|f| matches!(f, Formula::LMod(_))) {
        return vec![(
            "(L-serial)",
            first_l.clone(),
            TableauNode {
                gamma: l_down,
                sigma: BTreeSet::new(),
            },
        )];
    }
    Vec::new()
}

/// The reformulated CL negated-conditional rule:
/// `Σ, L A, []~L A, ~L B, Γ^{⊃+}; ∅`.
pub fn apply_neg_cond_cl(n: &TableauNode, principal: &Formula) -> Option<TableauNode> {
    if !n.gamma.contains(principal) {
        return None;
    }
    let (a, b) = principal.as_neg_cond()?;
    let mut gamma = project(n, Selector::CondPos);
    gamma.extend(n.sigma.iter().cloned());
    gamma.insert(a.clone().lmod());
    gamma.insert(a.clone().lmod().box_neg());
    gamma.insert(b.clone().lmod().neg());
    Some(TableauNode {
        gamma,
        sigma: BTreeSet::new(),
    })
}

/// One world of a successful CL run: its saturated set, the accessibility
/// successors `(L-)` produced, and the next world of the box chain.
#[derive(Clone)]
struct ClPiece {
    world: WorldSet,
    l_children: Vec<WorldSet>,
    box_child: Option<Box<ClPiece>>,
}

#[derive(Clone)]
enum ClResult {
    Sat(ClPiece),
    Closed(Option<TraceNode>),
}

/// Finds an open saturated branch of a purely propositional node.
fn propositional_witness(node: &TableauNode, rec: &mut Recorder) -> Option<WorldSet> {
    let mut branches = Vec::new();
    expand_static_rec(node, Logic::Cl, rec, &mut branches, &mut None);
    branches.first().map(WorldSet::of)
}

struct ClSearch {
    tracing: bool,
    memo: BTreeMap<TableauNode, ClResult>,
}

impl ClSearch {
    fn new(tracing: bool) -> ClSearch {
        ClSearch {
            tracing,
            memo: BTreeMap::new(),
        }
    }

    /// The CL CHECK loop on one world: saturate; realize every `~L A` (all
    /// must be satisfiable) or the serial successor; then realize negated
    /// boxes with the strengthened rule and recurse down the chain.
    fn check_cl(&mut self, node: &TableauNode, rec: &mut Recorder) -> ClResult {
        if let Some(hit) = self.memo.get(node) {
            return hit.clone();
        }
        let mut branches = Vec::new();
        let mut trace = self.tracing.then(|| TraceNode::leaf("?", None));
        expand_static_rec(node, Logic::Cl, rec, &mut branches, &mut trace);
        let mut failures = Vec::new();
        let mut result = None;
        'branches: for branch in &branches {
            let premise_m = node_measure(branch, Logic::Cl);
            let mut l_children = Vec::new();
            for (rule, principal, child) in l_minus_children(branch) {
                let ev = rec.event(rule, node_measure(&child, Logic::Cl) < premise_m);
                match propositional_witness(&child, rec) {
                    Some(w) => l_children.push(w),
                    None => {
                        rec.mark_closed(ev);
                        failures.push(TraceNode {
                            rule: rule.to_string(),
                            principal: Some(principal.to_string()),
                            children: vec![TraceNode::leaf("closed", None)],
                        });
                        continue 'branches;
                    }
                }
            }
            let concs = apply_box_minus_strong(branch);
            if concs.is_empty() {
                result = Some(ClResult::Sat(ClPiece {
                    world: WorldSet::of(branch),
                    l_children,
                    box_child: None,
                }));
                break;
            }
            let mut child_failures = Vec::new();
            for conc in &concs {
                let ev = rec.event("(box-s)", node_measure(conc, Logic::Cl) < premise_m);
                match self.check_cl(conc, rec) {
                    ClResult::Sat(piece) => {
                        result = Some(ClResult::Sat(ClPiece {
                            world: WorldSet::of(branch),
                            l_children,
                            box_child: Some(Box::new(piece)),
                        }));
                        break 'branches;
                    }
                    ClResult::Closed(t) => {
                        rec.mark_closed(ev);
                        if let Some(t) = t {
                            child_failures.push(t);
                        }
                    }
                }
            }
            failures.push(TraceNode {
                rule: "(box-s)".to_string(),
                principal: None,
                children: child_failures,
            });
        }
        let result = result.unwrap_or_else(|| {
            ClResult::Closed(trace.map(|mut t| {
                let mut it = failures.into_iter();
                graft_failures(&mut t, &mut it);
                t
            }))
        });
        self.memo.insert(node.clone(), result.clone());
        result
    }
}

/// A bimodal model: a preferential model plus a serial accessibility
/// relation interpreting `L`.
#[derive(Debug, Clone)]
pub(crate) struct ClPrefModel {
    pub pref: PrefModel,
    pub acc: BTreeSet<(usize, usize)>,
}

impl ClPrefModel {
    pub fn eval_at(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(p) => self.pref.val[w].contains(p),
            Formula::Neg(g) => !self.eval_at(w, g),
            Formula::And(l, r) => self.eval_at(w, l) && self.eval_at(w, r),
            Formula::Or(l, r) => self.eval_at(w, l) || self.eval_at(w, r),
            Formula::Implies(l, r) => !self.eval_at(w, l) || self.eval_at(w, r),
            Formula::LMod(a) => self.successors(w).all(|v| self.eval_at(v, a)),
            Formula::BoxNeg(a) => (0..self.pref.worlds)
                .filter(|&u| self.pref.less.contains(&(u, w)))
                .all(|u| !self.eval_at(u, a)),
            Formula::Cond(a, b) => {
                let la = (*a).clone().lmod();
                let lb = (*b).clone().lmod();
                let sat: Vec<usize> = (0..self.pref.worlds).filter(|&u| self.eval_at(u, &la)).collect();
                sat.iter()
                    .filter(|&&u| !sat.iter().any(|&v| v != u && self.pref.less.contains(&(v, u))))
                    .all(|&u| self.eval_at(u, &lb))
            }
        }
    }

    fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.acc.iter().filter(move |&&(u, _)| u == w).map(|&(_, v)| v)
    }
}

/// Assembles the extracted worlds into the bimodal model per the
/// completeness construction and converts it to a state model: the
/// accessibility relation is closed so that siblings see each other and
/// successorless worlds see themselves (making it serial), and the order is
/// pushed onto accessibility successors and transitively closed.
pub(crate) fn assemble_cl_model(
    worlds: &[WorldSet],
    r_edges: &BTreeSet<(usize, usize)>,
    less_edges: &BTreeSet<(usize, usize)>,
    designated: usize,
    atoms: &BTreeSet<String>,
) -> (ClPrefModel, StateModel, usize) {
    let n = worlds.len();
    let mut acc = r_edges.clone();
    // (ii) siblings: two successors of the same world see each other (and
    // themselves).
    for &(u, v) in r_edges {
        for &(u2, v2) in r_edges {
            if u == u2 {
                acc.insert((v, v2));
                acc.insert((v2, v));
            }
        }
    }
    // (i) seriality: worlds without accessibility successors see themselves.
    for w in 0..n {
        if !r_edges.iter().any(|&(u, _)| u == w) {
            acc.insert((w, w));
        }
    }
    // (iii)-(v): raw order edges, pushed to accessibility successors, then
    // transitively closed.
    let mut less = less_edges.clone();
    for &(wp, w) in less_edges {
        for &(u, v) in &acc {
            if u == w {
                less.insert((wp, v));
            }
        }
    }
    let less = transitive_closure(n, &less);
    assert!((0..n).all(|w| !less.contains(&(w, w))), "extracted CL order has a cycle");
    let pref = PrefModel {
        atoms: atoms.iter().cloned().collect(),
        worlds: n,
        less: less.clone(),
        val: worlds.iter().map(|w| w.atoms()).collect(),
    };
    let bimodal = ClPrefModel {
        pref: pref.clone(),
        acc: acc.clone(),
    };
    // State model: one state per world, labelled by its accessibility
    // successors.
    let label: Vec<BTreeSet<usize>> = (0..n)
        .map(|w| bimodal.successors(w).collect())
        .collect();
    let state = StateModel {
        atoms: pref.atoms.clone(),
        states: n,
        worlds: n,
        label,
        less,
        val: pref.val.clone(),
    };
    (bimodal, state, designated)
}

fn collect_piece(piece: &ClPiece, index: &mut WorldIndex, r_edges: &mut BTreeSet<(usize, usize)>, less_edges: &mut BTreeSet<(usize, usize)>) -> usize {
    let (i, _) = index.intern(piece.world.clone());
    for bad in &piece.l_children {
        let (j, _) = index.intern(bad.clone());
        r_edges.insert((i, j));
    }
    if let Some(child) = &piece.box_child {
        let j = collect_piece(child, index, r_edges, less_edges);
        less_edges.insert((j, i));
    }
    i
}

pub fn decide_cl(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> Decision {
    match options.engine {
        Engine::Default => decide_cl_default(gamma, options),
        Engine::Naive => super::p::decide_naive(gamma, Logic::Cl, options),
    }
}

fn decide_cl_default(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> Decision {
    let mut rec = Recorder::new(options);
    let root = TableauNode::root(gamma.clone());
    let atoms: BTreeSet<String> = gamma.iter().flat_map(|f| f.atoms()).collect();
    let tracing = options.record_trace;

    let mut branches = Vec::new();
    let mut trace = tracing.then(|| TraceNode::leaf("?", None));
    expand_static_rec(&root, Logic::Cl, &mut rec, &mut branches, &mut trace);

    let mut search = ClSearch::new(tracing);
    let mut failures = Vec::new();
    for branch in &branches {
        let negs: Vec<Formula> = project(branch, Selector::CondNeg).into_iter().collect();
        let mut failure = None;
        let mut pieces = Vec::new();
        match search.check_cl(branch, &mut rec) {
            ClResult::Sat(piece) => pieces.push(piece),
            ClResult::Closed(t) => {
                failure = Some(t.unwrap_or_else(|| TraceNode::leaf("closed", None)));
            }
        }
        if failure.is_none() {
            let premise_m = node_measure(branch, Logic::Cl);
            for neg in &negs {
                let sub = apply_neg_cond_cl(branch, neg).expect("negated conditional present");
                let ev = rec.event("(cond-)", node_measure(&sub, Logic::Cl) < premise_m);
                match search.check_cl(&sub, &mut rec) {
                    ClResult::Sat(piece) => pieces.push(piece),
                    ClResult::Closed(t) => {
                        rec.mark_closed(ev);
                        failure = Some(TraceNode {
                            rule: "(cond-)".to_string(),
                            principal: Some(neg.to_string()),
                            children: t.into_iter().collect(),
                        });
                        break;
                    }
                }
            }
        }
        match failure {
            None => {
                let mut index = WorldIndex::default();
                let mut r_edges = BTreeSet::new();
                let mut less_edges = BTreeSet::new();
                let mut designated = 0;
                for (k, piece) in pieces.iter().enumerate() {
                    let i = collect_piece(piece, &mut index, &mut r_edges, &mut less_edges);
                    if k == 0 {
                        designated = i;
                    }
                }
                let (bimodal, state, designated) =
                    assemble_cl_model(&index.worlds, &r_edges, &less_edges, designated, &atoms);
                debug_assert!(
                    gamma.iter().all(|f| bimodal.eval_at(designated, f)),
                    "extracted bimodal model fails the input"
                );
                return Decision {
                    verdict: Verdict::Sat {
                        model: Some(ModelRepr::State(state)),
                        point: designated,
                    },
                    stats: Stats {
                        nodes: rec.nodes,
                        labels: 0,
                    },
                    measure_events: rec.events,
                };
            }
            Some(f) => {
                if tracing {
                    failures.push(f);
                }
            }
        }
    }
    let trace = trace.map(|mut t| {
        let mut it = failures.into_iter();
        graft_failures(&mut t, &mut it);
        t
    });
    Decision {
        verdict: Verdict::Unsat { trace },
        stats: Stats {
            nodes: rec.nodes,
            labels: 0,
        },
        measure_events: rec.events,
    }
}

/// Naive-engine extraction: the literal worklist construction with steps for
/// negated conditionals, negated boxes and the two `(L-)` shapes.
pub(crate) fn naive_extract_cl(
    root: &TableauNode,
    rec: &mut Recorder,
    atoms: &BTreeSet<String>,
) -> (StateModel, usize) {
    use alloc::collections::BTreeMap;
    let mut memo: BTreeMap<TableauNode, Option<TableauNode>> = BTreeMap::new();
    let first = naive_sat_branch(root, rec, &mut memo).expect("extraction follows a SAT verdict");
    let mut index = WorldIndex::default();
    let mut nodes_by_world: Vec<TableauNode> = Vec::new();
    let mut r_edges = BTreeSet::new();
    let mut less_edges = BTreeSet::new();
    let (root_idx, _) = index.intern(WorldSet::of(&first));
    nodes_by_world.push(first);
    let mut unresolved = vec![root_idx];
    while let Some(i) = unresolved.pop() {
        let node = nodes_by_world[i].clone();
        for (rule, _, child) in super::p::naive_dynamic_children_for(&node, Logic::Cl) {
            let sat = naive_sat_branch(&child, rec, &mut memo).expect("open children stay open");
            let (j, fresh) = index.intern(WorldSet::of(&sat));
            if fresh {
                nodes_by_world.push(sat);
                unresolved.push(j);
            }
            match rule {
                "(box-)" => {
                    less_edges.insert((j, i));
                }
                "(L-)" | "(L-serial)" => {
                    r_edges.insert((i, j));
                }
                _ => {}
            }
        }
    }
    let (_, state, designated) =
        assemble_cl_model(&index.worlds, &r_edges, &less_edges, root_idx, atoms);
    (state, designated)
}

fn naive_sat_branch(
    node: &TableauNode,
    rec: &mut Recorder,
    memo: &mut alloc::collections::BTreeMap<TableauNode, Option<TableauNode>>,
) -> Option<TableauNode> {
    if let Some(hit) = memo.get(node) {
        return hit.clone();
    }
    let mut branches = Vec::new();
    expand_static_rec(node, Logic::Cl, rec, &mut branches, &mut None);
    let mut result = None;
    'branches: for branch in &branches {
        for (_, _, child) in super::p::naive_dynamic_children_for(branch, Logic::Cl) {
            if naive_sat_branch(&child, rec, memo).is_none() {
                continue 'branches;
            }
        }
        result = Some(branch.clone());
        break;
    }
    memo.insert(node.clone(), result.clone());
    result
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
        decide_cl(
            &gamma(items),
            &DecideOptions {
                engine,
                record_trace: true,
                record_measures: true,
                ..DecideOptions::default()
            },
        )
    }

    fn lnode(pos: &[&str], neg: &[&str]) -> TableauNode {
        let mut g: BTreeSet<Formula> = pos.iter().map(|s| pf(s).lmod()).collect();
        g.extend(neg.iter().map(|s| pf(s).lmod().neg()));
        TableauNode::root(g)
    }

    #[test]
    fn l_minus_rule() {
        let out = apply_l_minus(&lnode(&["a"], &["b"]));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].gamma, [pf("a"), pf("~b")].into_iter().collect());

        let out = apply_l_minus(&lnode(&["a", "b"], &[]));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].gamma, [pf("a"), pf("b")].into_iter().collect());

        let out = apply_l_minus(&lnode(&[], &["a", "b"]));
        assert_eq!(out.len(), 2);
        let sets: Vec<BTreeSet<Formula>> = out.into_iter().map(|n| n.gamma).collect();
        assert!(sets.contains(&[pf("~a")].into_iter().collect()));
        assert!(sets.contains(&[pf("~b")].into_iter().collect()));

        assert!(apply_l_minus(&TableauNode::root(gamma(&["p"]))).is_empty());
    }

    #[test]
    fn loop_instance_unsat() {
        for engine in [Engine::Default, Engine::Naive] {
            let d = decide(&["a0 |~ a1", "a1 |~ a2", "a2 |~ a0", "~(a0 |~ a2)"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
            assert!(d.measure_events.iter().all(|e| e.decreased || e.closed));
        }
    }

    #[test]
    fn cut_cycle_unsat_in_cl() {
        for engine in [Engine::Default, Engine::Naive] {
            let d = decide(&["~(C |~ B)", "C |~ A", "A |~ B", "B |~ C"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
        }
    }

    #[test]
    fn or_fails_in_cl() {
        for engine in [Engine::Default, Engine::Naive] {
            let d = decide(&["A |~ C", "B |~ C", "~(A | B |~ C)"], engine);
            match &d.verdict {
                Verdict::Sat { model: Some(ModelRepr::State(m)), point } => {
                    let g = gamma(&["A |~ C", "B |~ C", "~(A | B |~ C)"]);
                    for f in &g {
                        assert!(m.eval_at(*point, f), "{engine:?}: {f} fails in extracted state model");
                    }
                    let violations =
                        crate::models::validate_model(&ModelRepr::State(m.clone()), Logic::Cl, &BTreeSet::new());
                    assert!(violations.is_empty(), "{violations:?}");
                }
                other => panic!("expected SAT with state model, got {other:?}"),
            }
        }
    }

    #[test]
    fn engines_agree_on_small_inputs() {
        let cases: Vec<Vec<&str>> = vec![
            vec!["a |~ b", "~(a |~ b)"],
            vec!["a |~ b", "b |~ a", "~(a |~ a)"],
            vec!["a |~ b", "b |~ c", "~(a |~ c)"],
            vec!["a", "~(b |~ a)"],
            vec!["~(a |~ a)"],
        ];
        for case in cases {
            let d = decide(&case, Engine::Default);
            let n = decide(&case, Engine::Naive);
            assert_eq!(d.verdict.is_sat(), n.verdict.is_sat(), "{case:?}");
        }
    }
}
