//! Decision procedure for preferential logic P.
//!
//! The default engine treats each negated conditional as an independent
//! subproblem (licensed by the disjunction property) and realizes negated
//! boxes with the strengthened box rule, which keeps all alternatives in its
//! conclusions so no backtracking over the choice of box is needed. The naive
//! engine runs the plain terminating calculus with the ordinary one-box rule
//! and backtracking, and serves as a cross-check.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    expand_static_rec, project, transitive_closure, Decision, DecideOptions, Engine,
    Recorder, Selector, Stats, TableauNode, TraceNode, Verdict, WorldIndex, WorldSet,
};
use crate::models::{ModelRepr, PrefModel};
use crate::syntax::{cond_occurrences, Formula, Logic};

/// The lexicographic termination measure `m(Γ;Σ) = <c1, c2, c3, c4>`.
///
/// `tie` repairs a corner of the decrease argument: `(or-)` replaces
/// `~(F | G)` by `~F, ~G` whose complexities sum to exactly the principal's,
/// leaving c4 equal. The multiset of complexities still strictly shrinks
/// (one element replaced by two smaller ones), so it is appended as a final
/// component, compared descending-sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PMeasure {
    /// Conditionals occurring negatively in Γ.
    pub c1: u64,
    /// Conditionals occurring positively in Γ ∪ Σ whose box is not yet in Γ.
    pub c2: u64,
    /// Conditionals occurring positively in Γ.
    pub c3: u64,
    /// Total formula complexity of Γ.
    pub c4: u64,
    /// Complexities of the formulas of Γ, sorted descending.
    pub tie: Vec<u64>,
}

/// The wrapping the box rule realizes for a conditional antecedent: `[]~A`
/// for P/R, `[]~L A` for CL.
pub(crate) fn box_for_antecedent(ante: &Formula, logic: Logic) -> Formula {
    match logic {
        Logic::Cl | Logic::C => ante.clone().lmod().box_neg(),
        _ => ante.clone().box_neg(),
    }
}

pub(crate) fn node_measure(n: &TableauNode, logic: Logic) -> PMeasure {
    let (pos_g, neg_g) = cond_occurrences(n.gamma.iter().cloned());
    let mut pos_all = pos_g.clone();
    pos_all.extend(n.sigma.iter().cloned());
    let c2 = pos_all
        .iter()
        .filter(|c| match c {
            Formula::Cond(a, _) => !n.gamma.contains(&box_for_antecedent(a, logic)),
            _ => false,
        })
        .count() as u64;
    let mut tie: Vec<u64> = n.gamma.iter().map(Formula::cp).collect();
    tie.sort_unstable_by(|a, b| b.cmp(a));
    PMeasure {
        c1: neg_g.len() as u64,
        c2,
        c3: pos_g.len() as u64,
        c4: tie.iter().sum(),
        tie,
    }
}

pub fn measure_p(n: &TableauNode) -> PMeasure {
    node_measure(n, Logic::P)
}

/// The reformulated negated-conditional rule: a single conclusion
/// `Σ, A, []~A, ~B, Γ^{⊃+}; ∅` that drops every other negated conditional.
pub fn apply_neg_cond_p(n: &TableauNode, principal: &Formula) -> Option<TableauNode> {
    if !n.gamma.contains(principal) {
        return None;
    }
    let (a, b) = principal.as_neg_cond()?;
    let mut gamma = project(n, Selector::CondPos);
    gamma.extend(n.sigma.iter().cloned());
    gamma.insert(a.clone());
    gamma.insert(a.clone().box_neg());
    gamma.insert(b.clone().neg());
    Some(TableauNode {
        gamma,
        sigma: BTreeSet::new(),
    })
}

/// The strengthened box rule: one conclusion per negated box `~[]~A_i`,
/// carrying `~[]~A_j | A_j` for all the others, so the node is satisfiable
/// iff some conclusion is. Works for both the P shape (`[]~A`) and the CL
/// shape (`[]~L A`). Empty when Γ has no negated box.
pub fn apply_box_minus_strong(n: &TableauNode) -> Vec<TableauNode> {
    let bodies: Vec<Formula> = n
        .gamma
        .iter()
        .filter_map(|f| match f {
            Formula::Neg(g) => match &**g {
                Formula::BoxNeg(body) => Some((**body).clone()),
                _ => None,
            },
            _ => None,
        })
        .collect();
    let mut base = project(n, Selector::CondPm);
    base.extend(project(n, Selector::Box));
    base.extend(project(n, Selector::BoxDown));
    base.extend(n.sigma.iter().cloned());
    bodies
        .iter()
        .enumerate()
        .map(|(i, body)| {
            let mut gamma = base.clone();
            gamma.insert(body.clone());
            gamma.insert(body.clone().box_neg());
            for (j, other) in bodies.iter().enumerate() {
                if j != i {
                    gamma.insert(other.clone().box_neg().neg().or(other.clone()));
                }
            }
            TableauNode {
                gamma,
                sigma: BTreeSet::new(),
            }
        })
        .collect()
}

fn neg_boxes(n: &TableauNode) -> Vec<Formula> {
    n.gamma
        .iter()
        .filter(|f| matches!(f, Formula::Neg(g) if matches!(**g, Formula::BoxNeg(_))))
        .cloned()
        .collect()
}

#[derive(Clone)]
pub(crate) enum ChainResult {
    Sat(Vec<WorldSet>),
    Closed(Option<TraceNode>),
}

/// Replaces the `open` leaves of a static expansion trace by the failure
/// evidence of the corresponding branch, in DFS order.
pub(crate) fn graft_failures(tree: &mut TraceNode, failures: &mut alloc::vec::IntoIter<TraceNode>) {
    if tree.children.is_empty() {
        if tree.rule == "open" {
            *tree = failures.next().expect("one failure per open branch");
        }
        return;
    }
    for child in &mut tree.children {
        graft_failures(child, failures);
    }
}

/// Memoized CHECK-loop runner. The same dynamic conclusions recur across the
/// static branch fan-out, so results are cached per node; the node space is
/// finite (it lives inside the closure of the input).
pub(crate) struct ChainSearch {
    logic: Logic,
    tracing: bool,
    memo: BTreeMap<TableauNode, ChainResult>,
}

impl ChainSearch {
    pub(crate) fn new(logic: Logic, tracing: bool) -> ChainSearch {
        ChainSearch {
            logic,
            tracing,
            memo: BTreeMap::new(),
        }
    }

    /// The CHECK loop: saturate, test the axiom, and realize negated boxes
    /// with the strengthened rule until none remain. Returns the descending
    /// chain of world sets built along the way. `Γ` may still mention
    /// negated conditionals; they are inert here (their subproblems are
    /// spawned by the caller and their conclusions do not depend on the
    /// current world).
    pub(crate) fn check_chain(&mut self, node: &TableauNode, rec: &mut Recorder) -> ChainResult {
        if let Some(hit) = self.memo.get(node) {
            return hit.clone();
        }
        let logic = self.logic;
        let mut branches = Vec::new();
        let mut trace = self.tracing.then(|| TraceNode::leaf("?", None));
        expand_static_with_measures(node, logic, rec, &mut branches, &mut trace);
        let mut failures = Vec::new();
        let mut result = None;
        'branches: for branch in &branches {
            let concs = apply_box_minus_strong(branch);
            if concs.is_empty() {
                result = Some(ChainResult::Sat(vec![WorldSet::of(branch)]));
                break;
            }
            let premise_m = node_measure(branch, logic);
            let mut child_failures = Vec::new();
            for conc in &concs {
                let ev = rec.event("(box-s)", node_measure(conc, logic) < premise_m);
                match self.check_chain(conc, rec) {
                    ChainResult::Sat(mut chain) => {
                        chain.insert(0, WorldSet::of(branch));
                        result = Some(ChainResult::Sat(chain));
                        break 'branches;
                    }
                    ChainResult::Closed(t) => {
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
            ChainResult::Closed(trace.map(|mut t| {
                let mut it = failures.into_iter();
                graft_failures(&mut t, &mut it);
                t
            }))
        });
        self.memo.insert(node.clone(), result.clone());
        result
    }
}

pub(crate) fn expand_static_with_measures(
    node: &TableauNode,
    logic: Logic,
    rec: &mut Recorder,
    out: &mut Vec<TableauNode>,
    trace: &mut Option<TraceNode>,
) {
    // Static applications always decrease the measure outright; record them
    // as such without re-deriving the premise measure at every step.
    expand_static_rec(node, logic, rec, out, trace);
}

/// Builds the preferential countermodel from the chains of saturated sets an
/// open run produced: worlds are the (deduplicated) saturated sets, the order
/// is the transitive closure of the box steps, valuations read off atoms.
pub(crate) fn extract_pref_model(chains: &[Vec<WorldSet>], atoms: &BTreeSet<alloc::string::String>) -> (PrefModel, usize) {
    let mut index = WorldIndex::default();
    let mut edges = BTreeSet::new();
    let mut designated = 0;
    for (ci, chain) in chains.iter().enumerate() {
        let mut prev: Option<usize> = None;
        for (k, w) in chain.iter().enumerate() {
            let (i, _) = index.intern(w.clone());
            if ci == 0 && k == 0 {
                designated = i;
            }
            if let Some(p) = prev {
                edges.insert((i, p));
            }
            prev = Some(i);
        }
    }
    let n = index.worlds.len();
    let less = transitive_closure(n, &edges);
    // Acyclicity of the extracted order (Fact 1 of the completeness proof).
    assert!(
        (0..n).all(|i| !less.contains(&(i, i))),
        "extracted preferential order has a cycle"
    );
    let model = PrefModel {
        atoms: atoms.iter().cloned().collect(),
        worlds: n,
        less,
        val: index.worlds.iter().map(|w| w.atoms()).collect(),
    };
    (model, designated)
}

pub fn decide_p(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> Decision {
    match options.engine {
        Engine::Default => decide_p_default(gamma, options),
        Engine::Naive => decide_naive(gamma, Logic::P, options),
    }
}

fn decide_p_default(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> Decision {
    let mut rec = Recorder::new(options);
    let root = TableauNode::root(gamma.clone());
    let atoms: BTreeSet<alloc::string::String> = gamma.iter().flat_map(|f| f.atoms()).collect();
    let tracing = options.record_trace;

    let mut branches = Vec::new();
    let mut trace = tracing.then(|| TraceNode::leaf("?", None));
    expand_static_with_measures(&root, Logic::P, &mut rec, &mut branches, &mut trace);

    let mut search = ChainSearch::new(Logic::P, tracing);
    let mut failures = Vec::new();
    for branch in &branches {
        let negs: Vec<Formula> = project(branch, Selector::CondNeg).into_iter().collect();
        let mut failure = None;
        let root_chain = match search.check_chain(branch, &mut rec) {
            ChainResult::Sat(chain) => Some(chain),
            ChainResult::Closed(t) => {
                failure = Some(t.unwrap_or_else(|| TraceNode::leaf("closed", None)));
                None
            }
        };
        if let Some(root_chain) = root_chain {
            let mut chains = vec![root_chain];
            let mut ok = true;
            let premise_m = node_measure(branch, Logic::P);
            for neg in &negs {
                let sub = apply_neg_cond_p(branch, neg).expect("negated conditional present");
                let ev = rec.event("(cond-)", node_measure(&sub, Logic::P) < premise_m);
                match search.check_chain(&sub, &mut rec) {
                    ChainResult::Sat(chain) => chains.push(chain),
                    ChainResult::Closed(t) => {
                        rec.mark_closed(ev);
                        ok = false;
                        failure = Some(TraceNode {
                            rule: "(cond-)".to_string(),
                            principal: Some(neg.to_string()),
                            children: t.into_iter().collect(),
                        });
                        break;
                    }
                }
            }
            if ok {
                let (model, point) = extract_pref_model(&chains, &atoms);
                return Decision {
                    verdict: Verdict::Sat {
                        model: Some(ModelRepr::Pref(model)),
                        point,
                    },
                    stats: Stats {
                        nodes: rec.nodes,
                        labels: 0,
                    },
                    measure_events: rec.events,
                };
            }
        }
        if tracing {
            failures.push(failure.unwrap_or_else(|| TraceNode::leaf("closed", None)));
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

// ---------------------------------------------------------------------------
// Plain terminating calculus (naive engine), shared by P and CL
// ---------------------------------------------------------------------------

/// The plain negated-conditional rule of the terminating calculus: keeps all
/// of `Γ^{⊃±}` (other negated conditionals included).
pub(crate) fn apply_neg_cond_plain(n: &TableauNode, principal: &Formula, logic: Logic) -> Option<TableauNode> {
    if !n.gamma.contains(principal) {
        return None;
    }
    let (a, b) = principal.as_neg_cond()?;
    let mut rest = n.clone();
    rest.gamma.remove(principal);
    let mut gamma = project(&rest, Selector::CondPm);
    gamma.extend(rest.sigma.iter().cloned());
    match logic {
        Logic::Cl | Logic::C => {
            gamma.insert(a.clone().lmod());
            gamma.insert(a.clone().lmod().box_neg());
            gamma.insert(b.clone().lmod().neg());
        }
        _ => {
            gamma.insert(a.clone());
            gamma.insert(a.clone().box_neg());
            gamma.insert(b.clone().neg());
        }
    }
    Some(TableauNode {
        gamma,
        sigma: BTreeSet::new(),
    })
}

/// The plain box rule: realizes one chosen `~[]~A`, dropping the other
/// negated boxes (backtracking over the choice happens in the search).
pub(crate) fn apply_box_minus_plain(n: &TableauNode, principal: &Formula) -> Option<TableauNode> {
    if !n.gamma.contains(principal) {
        return None;
    }
    let body = match principal {
        Formula::Neg(g) => match &**g {
            Formula::BoxNeg(body) => (**body).clone(),
            _ => return None,
        },
        _ => return None,
    };
    let mut rest = n.clone();
    rest.gamma.remove(principal);
    let mut gamma = project(&rest, Selector::CondPm);
    gamma.extend(project(&rest, Selector::Box));
    gamma.extend(project(&rest, Selector::BoxDown));
    gamma.extend(rest.sigma.iter().cloned());
    gamma.insert(body.clone());
    gamma.insert(body.box_neg());
    Some(TableauNode {
        gamma,
        sigma: BTreeSet::new(),
    })
}

#[derive(Clone)]
enum NaiveOutcome {
    Open,
    Closed(Option<TraceNode>),
}

/// Dynamic successors of a saturated branch in the plain calculus, with the
/// rule names used in traces. The `(L-)` successors come first: when a box
/// was realized against an already-present `[]~L A`, the clash sits behind
/// the `L` modality and only `(L-)` exposes it, so checking those successors
/// first is what keeps the box recursion well-founded.
pub(crate) fn naive_dynamic_children_for(branch: &TableauNode, logic: Logic) -> Vec<(&'static str, Formula, TableauNode)> {
    let mut out = Vec::new();
    if matches!(logic, Logic::Cl | Logic::C) {
        out.extend(super::cl::l_minus_children(branch));
    }
    for neg in project(branch, Selector::CondNeg) {
        let child = apply_neg_cond_plain(branch, &neg, logic).unwrap();
        out.push(("(cond-)", neg, child));
    }
    for nb in neg_boxes(branch) {
        let child = apply_box_minus_plain(branch, &nb).unwrap();
        out.push(("(box-)", nb, child));
    }
    out
}

fn naive_search(
    node: &TableauNode,
    logic: Logic,
    rec: &mut Recorder,
    tracing: bool,
    memo: &mut BTreeMap<TableauNode, NaiveOutcome>,
) -> NaiveOutcome {
    if let Some(hit) = memo.get(node) {
        return hit.clone();
    }
    let mut branches = Vec::new();
    let mut trace = tracing.then(|| TraceNode::leaf("?", None));
    expand_static_with_measures(node, logic, rec, &mut branches, &mut trace);
    let mut failures = Vec::new();
    let mut open = false;
    for branch in &branches {
        let premise_m = node_measure(branch, logic);
        let mut failing = None;
        for (rule, principal, child) in naive_dynamic_children_for(branch, logic) {
            let ev = rec.event(rule, node_measure(&child, logic) < premise_m);
            match naive_search(&child, logic, rec, tracing, memo) {
                NaiveOutcome::Open => {}
                NaiveOutcome::Closed(t) => {
                    rec.mark_closed(ev);
                    failing = Some(TraceNode {
                        rule: rule.to_string(),
                        principal: Some(principal.to_string()),
                        children: t.into_iter().collect(),
                    });
                    break;
                }
            }
        }
        match failing {
            None => {
                open = true;
                break;
            }
            Some(f) => failures.push(f),
        }
    }
    let result = if open {
        NaiveOutcome::Open
    } else {
        NaiveOutcome::Closed(trace.map(|mut t| {
            let mut it = failures.into_iter();
            graft_failures(&mut t, &mut it);
            t
        }))
    };
    memo.insert(node.clone(), result.clone());
    result
}

/// First open saturated branch whose dynamic successors are all open; the
/// `SAT(·)` choice function of the completeness construction.
fn sat_branch(
    node: &TableauNode,
    logic: Logic,
    rec: &mut Recorder,
    memo: &mut BTreeMap<TableauNode, Option<TableauNode>>,
) -> Option<TableauNode> {
    if let Some(hit) = memo.get(node) {
        return hit.clone();
    }
    let mut branches = Vec::new();
    expand_static_rec(node, logic, rec, &mut branches, &mut None);
    let mut result = None;
    'branches: for branch in &branches {
        for (_, _, child) in naive_dynamic_children_for(branch, logic) {
            if sat_branch(&child, logic, rec, memo).is_none() {
                continue 'branches;
            }
        }
        result = Some(branch.clone());
        break;
    }
    memo.insert(node.clone(), result.clone());
    result
}

pub(crate) fn decide_naive(gamma: &BTreeSet<Formula>, logic: Logic, options: &DecideOptions) -> Decision {
    let mut rec = Recorder::new(options);
    let root = TableauNode::root(gamma.clone());
    let atoms: BTreeSet<alloc::string::String> = gamma.iter().flat_map(|f| f.atoms()).collect();
    let mut memo = BTreeMap::new();
    match naive_search(&root, logic, &mut rec, options.record_trace, &mut memo) {
        NaiveOutcome::Closed(trace) => Decision {
            verdict: Verdict::Unsat { trace },
            stats: Stats {
                nodes: rec.nodes,
                labels: 0,
            },
            measure_events: rec.events,
        },
        NaiveOutcome::Open => {
            let (model, point) = match logic {
                Logic::P => {
                    let (m, pt) = naive_extract_p(&root, &mut rec, &atoms);
                    (Some(ModelRepr::Pref(m)), pt)
                }
                Logic::Cl => {
                    let (m, pt) = super::cl::naive_extract_cl(&root, &mut rec, &atoms);
                    (Some(ModelRepr::State(m)), pt)
                }
                _ => (None, 0),
            };
            Decision {
                verdict: Verdict::Sat { model, point },
                stats: Stats {
                    nodes: rec.nodes,
                    labels: 0,
                },
                measure_events: rec.events,
            }
        }
    }
}

/// Literal completeness construction: a worklist of saturated sets, one new
/// world per negated conditional (no order) and per negated box (ordered
/// below the current world), deduplicated by set equality.
fn naive_extract_p(
    root: &TableauNode,
    rec: &mut Recorder,
    atoms: &BTreeSet<alloc::string::String>,
) -> (PrefModel, usize) {
    let mut memo = BTreeMap::new();
    let first = sat_branch(root, Logic::P, rec, &mut memo).expect("extraction follows a SAT verdict");
    let mut index = WorldIndex::default();
    let mut nodes_by_world: Vec<TableauNode> = Vec::new();
    let mut edges = BTreeSet::new();
    let (root_idx, _) = index.intern(WorldSet::of(&first));
    nodes_by_world.push(first);
    let mut unresolved = vec![root_idx];
    while let Some(i) = unresolved.pop() {
        let node = nodes_by_world[i].clone();
        for (rule, _, child) in naive_dynamic_children_for(&node, Logic::P) {
            let sat = sat_branch(&child, Logic::P, rec, &mut memo).expect("open children stay open");
            let (j, fresh) = index.intern(WorldSet::of(&sat));
            if fresh {
                nodes_by_world.push(sat);
                unresolved.push(j);
            }
            if rule == "(box-)" {
                edges.insert((j, i));
            }
        }
    }
    let n = index.worlds.len();
    let less = transitive_closure(n, &edges);
    assert!((0..n).all(|i| !less.contains(&(i, i))), "extracted order has a cycle");
    (
        PrefModel {
            atoms: atoms.iter().cloned().collect(),
            worlds: n,
            less,
            val: index.worlds.iter().map(|w| w.atoms()).collect(),
        },
        root_idx,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn pf(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn node(gamma: &[&str]) -> TableauNode {
        TableauNode::root(gamma.iter().map(|s| pf(s)).collect())
    }

    fn gamma(items: &[&str]) -> BTreeSet<Formula> {
        items.iter().map(|s| pf(s)).collect()
    }

    fn decide(items: &[&str], engine: Engine) -> Decision {
        decide_p(
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
    fn measure_examples() {
        let m = measure_p(&node(&[]));
        assert_eq!((m.c1, m.c2, m.c3, m.c4), (0, 0, 0, 0));
        let m = measure_p(&node(&["a |~ b"]));
        assert_eq!((m.c1, m.c2, m.c3, m.c4), (0, 1, 1, 5));
        let m = measure_p(&node(&["~(a |~ b)"]));
        assert_eq!((m.c1, m.c2, m.c3, m.c4), (1, 0, 0, 6));
    }

    #[test]
    fn neg_cond_rule() {
        let n = node(&["a |~ w", "~(a |~ ~r)"]);
        let out = apply_neg_cond_p(&n, &pf("~(a |~ ~r)")).unwrap();
        let expected: BTreeSet<Formula> = [
            pf("a"),
            Formula::atom("a").box_neg(),
            pf("~~r"),
            pf("a |~ w"),
        ]
        .into_iter()
        .collect();
        assert_eq!(out.gamma, expected);
        assert!(out.sigma.is_empty());

        // Other negated conditionals are dropped.
        let n = node(&["~(a |~ b)", "~(c |~ d)"]);
        let out = apply_neg_cond_p(&n, &pf("~(a |~ b)")).unwrap();
        assert!(!out.gamma.iter().any(|f| f == &pf("~(c |~ d)")));

        assert!(apply_neg_cond_p(&node(&["p"]), &pf("~(a |~ b)")).is_none());
    }

    #[test]
    fn box_minus_strong_rule() {
        let mut n = node(&["a |~ w"]);
        n.gamma.insert(Formula::atom("a").box_neg().neg());
        let out = apply_box_minus_strong(&n);
        assert_eq!(out.len(), 1);
        let expected: BTreeSet<Formula> =
            [pf("a |~ w"), pf("a"), Formula::atom("a").box_neg()].into_iter().collect();
        assert_eq!(out[0].gamma, expected);

        let mut n = node(&[]);
        n.gamma.insert(Formula::atom("a").box_neg().neg());
        n.gamma.insert(Formula::atom("b").box_neg().neg());
        let out = apply_box_minus_strong(&n);
        assert_eq!(out.len(), 2);
        let disj_b = Formula::atom("b").box_neg().neg().or(pf("b"));
        let disj_a = Formula::atom("a").box_neg().neg().or(pf("a"));
        assert!(out.iter().any(|c| c.gamma.contains(&disj_b)));
        assert!(out.iter().any(|c| c.gamma.contains(&disj_a)));

        // A realized box that was already present clashes immediately.
        let mut n = node(&[]);
        n.gamma.insert(Formula::atom("a").box_neg());
        n.gamma.insert(Formula::atom("a").box_neg().neg());
        let out = apply_box_minus_strong(&n);
        assert_eq!(out.len(), 1);
        assert!(out[0].gamma.contains(&pf("a")) && out[0].gamma.contains(&pf("~a")));

        assert!(apply_box_minus_strong(&node(&["p"])).is_empty());
    }

    #[test]
    fn paper_example_unsat() {
        for engine in [Engine::Default, Engine::Naive] {
            let d = decide(&["a |~ w", "r |~ a", "r |~ ~w", "~(a |~ ~r)"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
            assert!(d.measure_events.iter().all(|e| e.decreased || e.closed));
            if let Verdict::Unsat { trace } = &d.verdict {
                assert!(trace.is_some());
            }
        }
    }

    #[test]
    fn empty_and_rm_examples() {
        for engine in [Engine::Default, Engine::Naive] {
            assert!(decide(&[], engine).verdict.is_sat());
            let d = decide(&["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"], engine);
            match &d.verdict {
                Verdict::Sat { model: Some(ModelRepr::Pref(m)), point } => {
                    let g = gamma(&["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"]);
                    for f in &g {
                        assert!(m.eval_at(*point, f), "{engine:?}: {f} fails in extracted model");
                    }
                    let violations = crate::models::validate_model(
                        &ModelRepr::Pref(m.clone()),
                        Logic::P,
                        &BTreeSet::new(),
                    );
                    assert!(violations.is_empty(), "{violations:?}");
                }
                other => panic!("expected SAT with preferential model, got {other:?}"),
            }
        }
    }

    #[test]
    fn root_world_must_be_realizable() {
        // No negated conditionals, yet unsatisfiable: the designated world
        // satisfies p and must sit above a minimal p-world satisfying ~p.
        for engine in [Engine::Default, Engine::Naive] {
            let d = decide(&["p", "p |~ ~p"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
            let d = decide(&["p", "p |~ ~p", "~(r |~ q)"], engine);
            assert!(!d.verdict.is_sat(), "{engine:?}");
        }
    }

    #[test]
    fn engines_agree_on_small_inputs() {
        let cases: Vec<Vec<&str>> = vec![
            vec!["a |~ b", "~(a |~ b)"],
            vec!["a |~ b", "b |~ a", "~(b |~ b)"],
            vec!["a |~ b", "~(a & b |~ b)"],
            vec!["~(a |~ a)"],
            vec!["a | b", "~(a |~ b)", "b |~ a"],
            vec!["a -> b |~ c", "~(c |~ a -> b)"],
        ];
        for case in cases {
            let d = decide(&case, Engine::Default);
            let n = decide(&case, Engine::Naive);
            assert_eq!(d.verdict.is_sat(), n.verdict.is_sat(), "{case:?}");
        }
    }
}
