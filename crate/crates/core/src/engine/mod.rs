//! Tableau engines for the four logics.
//!
//! P and CL use unlabelled nodes `Γ;Σ` (a formula set plus the positive
//! conditionals already expanded in the current world), C uses a loop-checked
//! refutability search over its finite closure node space, and R uses a
//! labelled calculus with explicit relation formulas.


use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::models::ModelRepr;
use crate::syntax::{validate_language, Formula, Layer, Logic, Violation};

pub mod c;
pub mod cl;
pub mod p;
pub mod r;

/// Which decision procedure variant to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// The optimized procedures: per-negated-conditional split with the
    /// strengthened box rule for P/CL, minimal-world reuse for R. C has a
    /// single engine.
    Default,
    /// The plain terminating calculi, used as a cross-check: ordinary box
    /// rule with backtracking for P/CL, no world reuse for R.
    Naive,
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub engine: Engine,
    /// Record a closed-tableau trace on UNSAT.
    pub record_trace: bool,
    /// Record measure bookkeeping for every rule application.
    pub record_measures: bool,
    /// When set, applicable static rule instances are picked pseudo-randomly
    /// instead of first-match (order-insensitivity testing).
    pub shuffle_seed: Option<u64>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            engine: Engine::Default,
            record_trace: false,
            record_measures: false,
            shuffle_seed: None,
        }
    }
}

/// One node of a closed-tableau trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceNode {
    pub rule: String,
    pub principal: Option<String>,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub fn leaf(rule: &str, principal: Option<String>) -> TraceNode {
        TraceNode {
            rule: rule.to_string(),
            principal,
            children: Vec::new(),
        }
    }

    /// Does any node of the trace use the given rule name?
    pub fn uses_rule(&self, rule: &str) -> bool {
        self.rule == rule || self.children.iter().any(|c| c.uses_rule(rule))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat {
        /// Extracted countermodel (P, CL, R; none for C) and its designated
        /// point.
        model: Option<ModelRepr>,
        point: usize,
    },
    Unsat {
        trace: Option<TraceNode>,
    },
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    /// Tableau nodes visited / created.
    pub nodes: u64,
    /// Labels created (R only).
    pub labels: u32,
}

/// Measure bookkeeping for one rule application: either the lexicographic
/// measure strictly decreased, or the subtree under the conclusion closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureEvent {
    pub rule: &'static str,
    pub decreased: bool,
    pub closed: bool,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub verdict: Verdict,
    pub stats: Stats,
    pub measure_events: Vec<MeasureEvent>,
}

/// Shared bookkeeping threaded through a run.
pub(crate) struct Recorder {
    pub nodes: u64,
    pub labels: u32,
    pub record_measures: bool,
    pub events: Vec<MeasureEvent>,
    rng_state: u64,
    shuffle: bool,
}

impl Recorder {
    pub fn new(options: &DecideOptions) -> Recorder {
        Recorder {
            nodes: 0,
            labels: 0,
            record_measures: options.record_measures,
            events: Vec::new(),
            rng_state: options.shuffle_seed.unwrap_or(0) ^ 0x9e37_79b9_7f4a_7c15,
            shuffle: options.shuffle_seed.is_some(),
        }
    }

    pub fn visit(&mut self) {
        self.nodes += 1;
    }

    /// Index choice among `n` applicable instances.
    pub fn pick(&mut self, n: usize) -> usize {
        if !self.shuffle || n <= 1 {
            return 0;
        }
        // xorshift64*
        let mut x = self.rng_state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.rng_state = x;
        (x.wrapping_mul(0x2545_f491_4f6c_dd1d) >> 33) as usize % n
    }

    /// Records a measure event and returns its index for later patching.
    pub fn event(&mut self, rule: &'static str, decreased: bool) -> Option<usize> {
        if !self.record_measures {
            return None;
        }
        self.events.push(MeasureEvent {
            rule,
            decreased,
            closed: false,
        });
        Some(self.events.len() - 1)
    }

    pub fn mark_closed(&mut self, idx: Option<usize>) {
        if let Some(i) = idx {
            self.events[i].closed = true;
        }
    }
}

// ---------------------------------------------------------------------------
// Unlabelled nodes and projections
// ---------------------------------------------------------------------------

/// An unlabelled tableau node `Γ;Σ`: the current formula set plus the
/// positive conditionals already expanded in this world.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TableauNode {
    pub gamma: BTreeSet<Formula>,
    pub sigma: BTreeSet<Formula>,
}

impl TableauNode {
    pub fn root(gamma: BTreeSet<Formula>) -> TableauNode {
        TableauNode {
            gamma,
            sigma: BTreeSet::new(),
        }
    }

    /// All positive conditionals of the node, used or not.
    pub fn all_conditionals(&self) -> BTreeSet<Formula> {
        let mut out = project(self, Selector::CondPos);
        out.extend(self.sigma.iter().cloned());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// `Γ^□`: positive box formulas.
    Box,
    /// `Γ^{□↓}`: `~A` for each `[]~A` in Γ.
    BoxDown,
    /// `Γ^{⊐+}`: top-level positive conditionals.
    CondPos,
    /// `Γ^{⊐−}`: top-level negated conditionals.
    CondNeg,
    /// `Γ^{⊐±}`.
    CondPm,
    /// `Γ^{L↓}`: `A` for each `L A` in Γ.
    LDown,
}

pub fn project(n: &TableauNode, selector: Selector) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    for f in &n.gamma {
        match (selector, f) {
            (Selector::Box, Formula::BoxNeg(_)) => {
                out.insert(f.clone());
            }
            (Selector::BoxDown, Formula::BoxNeg(body)) => {
                out.insert((**body).clone().neg());
            }
            (Selector::CondPos, Formula::Cond(..)) => {
                out.insert(f.clone());
            }
            (Selector::CondNeg, Formula::Neg(g)) if matches!(**g, Formula::Cond(..)) => {
                out.insert(f.clone());
            }
            (Selector::CondPm, Formula::Cond(..)) => {
                out.insert(f.clone());
            }
            (Selector::CondPm, Formula::Neg(g)) if matches!(**g, Formula::Cond(..)) => {
                out.insert(f.clone());
            }
            (Selector::LDown, Formula::LMod(body)) => {
                out.insert((**body).clone());
            }
            _ => {}
        }
    }
    out
}

/// Axioms are restricted to atomic clashes: some atom occurs both plainly and
/// negated in Γ.
pub fn is_axiom(n: &TableauNode) -> bool {
    n.gamma.iter().any(|f| match f {
        Formula::Neg(g) => matches!(**g, Formula::Atom(_)) && n.gamma.contains(g),
        _ => false,
    })
}

/// One applicable rule instance of a static rule.
struct StaticInstance {
    rule: &'static str,
    principal: Formula,
    /// Additions per branch; the principal is consumed.
    branches: Vec<Vec<Formula>>,
    /// The principal moves to Σ instead of disappearing.
    to_sigma: bool,
}

fn boolean_instance(f: &Formula) -> Option<StaticInstance> {
    let inst = |rule, branches| {
        Some(StaticInstance {
            rule,
            principal: f.clone(),
            branches,
            to_sigma: false,
        })
    };
    match f {
        Formula::And(l, r) => inst("(and+)", vec![vec![(**l).clone(), (**r).clone()]]),
        Formula::Or(l, r) => inst("(or+)", vec![vec![(**l).clone()], vec![(**r).clone()]]),
        Formula::Implies(l, r) => inst("(->+)", vec![vec![(**l).clone().neg()], vec![(**r).clone()]]),
        Formula::Neg(g) => match &**g {
            Formula::Neg(h) => inst("(neg)", vec![vec![(**h).clone()]]),
            Formula::And(l, r) => inst(
                "(and-)",
                vec![vec![(**l).clone().neg()], vec![(**r).clone().neg()]],
            ),
            Formula::Or(l, r) => inst(
                "(or-)",
                vec![vec![(**l).clone().neg(), (**r).clone().neg()]],
            ),
            Formula::Implies(l, r) => inst(
                "(->-)",
                vec![vec![(**l).clone(), (**r).clone().neg()]],
            ),
            _ => None,
        },
        _ => None,
    }
}

/// The static conditional rule of the logic: `(⊃+)` introduces `~A | ~[]~A |
/// B` for P/R and the `L`-wrapped variants for CL. C's conditional rule is
/// not static and is handled by the C engine itself.
fn cond_plus_instance(logic: Logic, f: &Formula) -> Option<StaticInstance> {
    let (a, b) = match f {
        Formula::Cond(a, b) => ((**a).clone(), (**b).clone()),
        _ => return None,
    };
    let branches = match logic {
        Logic::P | Logic::R => vec![
            vec![a.clone().neg()],
            vec![a.box_neg().neg()],
            vec![b],
        ],
        Logic::Cl => vec![
            vec![a.clone().lmod().neg()],
            vec![a.lmod().box_neg().neg()],
            vec![b.lmod()],
        ],
        Logic::C => return None,
    };
    Some(StaticInstance {
        rule: "(cond+)",
        principal: f.clone(),
        branches,
        to_sigma: true,
    })
}

fn static_instances(node: &TableauNode, logic: Logic) -> Vec<StaticInstance> {
    let mut out = Vec::new();
    for f in &node.gamma {
        if let Some(i) = boolean_instance(f) {
            out.push(i);
        } else if let Some(i) = cond_plus_instance(logic, f) {
            out.push(i);
        }
    }
    out
}

fn apply_static_one(node: &TableauNode, inst: &StaticInstance, branch: usize) -> TableauNode {
    let mut child = node.clone();
    child.gamma.remove(&inst.principal);
    if inst.to_sigma {
        child.sigma.insert(inst.principal.clone());
    }
    child.gamma.extend(inst.branches[branch].iter().cloned());
    child
}

/// Exhaustively applies the boolean rules and the logic's static conditional
/// rule, honoring the Σ restriction. Returns every open saturated branch
/// (axiom branches are dropped). When `trace` is given, the full static
/// expansion tree is recorded there.
pub fn expand_static(node: &TableauNode, logic: Logic) -> Vec<TableauNode> {
    let mut out = Vec::new();
    let mut rec = Recorder::new(&DecideOptions::default());
    expand_static_rec(node, logic, &mut rec, &mut out, &mut None);
    out
}

pub(crate) fn expand_static_rec(
    node: &TableauNode,
    logic: Logic,
    rec: &mut Recorder,
    out: &mut Vec<TableauNode>,
    trace: &mut Option<TraceNode>,
) {
    rec.visit();
    let want_trace = trace.is_some();
    if is_axiom(node) {
        if want_trace {
            *trace = Some(TraceNode::leaf("(AX)", None));
        }
        return;
    }
    let inst = {
        let mut instances = static_instances(node, logic);
        if instances.is_empty() {
            if want_trace {
                *trace = Some(TraceNode::leaf("open", None));
            }
            out.push(node.clone());
            return;
        }
        instances.swap_remove(rec.pick(instances.len()))
    };
    let premise_m = rec.record_measures.then(|| p::node_measure(node, logic));
    let mut child_traces = Vec::new();
    // Branch subsumption: a branch whose additions are all present already
    // yields a conclusion included in every other branch's, so exploring it
    // alone is sound for both verdicts.
    let branch_range: Vec<usize> = match inst
        .branches
        .iter()
        .position(|adds| adds.iter().all(|f| node.gamma.contains(f)))
    {
        Some(b) => vec![b],
        None => (0..inst.branches.len()).collect(),
    };
    for branch in branch_range {
        let child = apply_static_one(node, &inst, branch);
        if let Some(pm) = &premise_m {
            rec.event(inst.rule, &p::node_measure(&child, logic) < pm);
        }
        let mut sub = if want_trace { Some(TraceNode::leaf("?", None)) } else { None };
        expand_static_rec(&child, logic, rec, out, &mut sub);
        if let Some(t) = sub {
            child_traces.push(t);
        }
    }
    if want_trace {
        *trace = Some(TraceNode {
            rule: inst.rule.to_string(),
            principal: Some(inst.principal.to_string()),
            children: child_traces,
        });
    }
}

/// The saturation conditions, checkable on a node: every static rule clause
/// is satisfied (vacuously when the principal was consumed).
pub fn is_saturated(node: &TableauNode, logic: Logic) -> bool {
    static_instances(node, logic).is_empty()
}

fn violations_of(gamma: &BTreeSet<Formula>) -> Vec<Violation> {
    let mut out = Vec::new();
    for f in gamma {
        out.extend(validate_language(f, Logic::P, Layer::Base));
    }
    out
}

/// Decides satisfiability of a base-language formula set in the given logic.
pub fn decide(gamma: &BTreeSet<Formula>, logic: Logic, options: &DecideOptions) -> Result<Decision, Vec<Violation>> {
    let violations = violations_of(gamma);
    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(match logic {
        Logic::P => p::decide_p(gamma, options),
        Logic::Cl => cl::decide_cl(gamma, options),
        Logic::C => c::decide_c(gamma, options),
        Logic::R => r::decide_r(gamma, options),
    })
}

/// Worlds extracted from open branches, shared by the P and CL engines.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct WorldSet(pub BTreeSet<Formula>);

impl WorldSet {
    pub fn of(node: &TableauNode) -> WorldSet {
        let mut set = node.gamma.clone();
        set.extend(node.sigma.iter().cloned());
        WorldSet(set)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.0
            .iter()
            .filter_map(|f| match f {
                Formula::Atom(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }
}

/// Index map for extracted worlds with set-equality deduplication.
#[derive(Default)]
pub(crate) struct WorldIndex {
    pub worlds: Vec<WorldSet>,
    by_set: BTreeMap<WorldSet, usize>,
}

impl WorldIndex {
    pub fn intern(&mut self, w: WorldSet) -> (usize, bool) {
        if let Some(&i) = self.by_set.get(&w) {
            return (i, false);
        }
        let i = self.worlds.len();
        self.by_set.insert(w.clone(), i);
        self.worlds.push(w);
        (i, true)
    }
}

/// Transitive closure over world indices.
pub(crate) fn transitive_closure(n: usize, edges: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut reach = vec![vec![false; n]; n];
    for &(u, v) in edges {
        reach[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, row) in reach.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if r {
                out.insert((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn node(gamma: &[&str]) -> TableauNode {
        TableauNode::root(gamma.iter().map(|s| p(s)).collect())
    }

    #[test]
    fn projections() {
        let mut n = node(&["~(b |~ c)", "d"]);
        n.gamma.insert(Formula::atom("a").box_neg());
        assert_eq!(project(&n, Selector::Box), [Formula::atom("a").box_neg()].into_iter().collect());
        assert_eq!(project(&n, Selector::BoxDown), [p("~a")].into_iter().collect());
        assert_eq!(project(&n, Selector::CondPm), [p("~(b |~ c)")].into_iter().collect());
        assert_eq!(project(&n, Selector::CondPos), BTreeSet::new());
        let mut ln = node(&[]);
        ln.gamma.insert(Formula::atom("x").lmod());
        assert_eq!(project(&ln, Selector::LDown), [p("x")].into_iter().collect());
    }

    #[test]
    fn axiom_detection() {
        assert!(is_axiom(&node(&["p", "~p", "q"])));
        // Closure on compound formulas needs expansion first.
        assert!(!is_axiom(&node(&["p & q", "~(p & q)"])));
        assert!(!is_axiom(&node(&[])));
    }

    #[test]
    fn expansion_examples() {
        let out = expand_static(&node(&["~~p"]), Logic::P);
        assert_eq!(out.len(), 1);
        assert!(out[0].gamma.contains(&p("p")));
        assert!(!out[0].gamma.contains(&p("~~p")));

        let out = expand_static(&node(&["p | q"]), Logic::P);
        assert_eq!(out.len(), 2);

        let out = expand_static(&node(&["a |~ b"]), Logic::P);
        assert_eq!(out.len(), 3);
        for branch in &out {
            assert!(branch.sigma.contains(&p("a |~ b")));
            assert!(is_saturated(branch, Logic::P));
        }
        let expected: BTreeSet<Formula> =
            [p("~a"), Formula::atom("a").box_neg().neg(), p("b")].into_iter().collect();
        let got: BTreeSet<Formula> = out.iter().flat_map(|b| b.gamma.iter().cloned()).collect();
        assert_eq!(got, expected);

        // CL wraps in L.
        let out = expand_static(&node(&["a |~ b"]), Logic::Cl);
        let got: BTreeSet<Formula> = out.iter().flat_map(|b| b.gamma.iter().cloned()).collect();
        let a = Formula::atom("a");
        let expected: BTreeSet<Formula> = [
            a.clone().lmod().neg(),
            a.lmod().box_neg().neg(),
            Formula::atom("b").lmod(),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expected);

        // Axiom branches are dropped.
        let out = expand_static(&node(&["p & ~p"]), Logic::P);
        assert!(out.is_empty());
    }

    #[test]
    fn expansion_is_order_insensitive_on_open_sets() {
        let n = node(&["(a | b) & (c -> d)", "~~(e & f)"]);
        let mut baseline: Vec<BTreeSet<Formula>> =
            expand_static(&n, Logic::P).into_iter().map(|b| b.gamma).collect();
        baseline.sort();
        for seed in 1..5u64 {
            let opts = DecideOptions {
                shuffle_seed: Some(seed),
                ..DecideOptions::default()
            };
            let mut rec = Recorder::new(&opts);
            let mut out = Vec::new();
            expand_static_rec(&n, Logic::P, &mut rec, &mut out, &mut None);
            let mut got: Vec<BTreeSet<Formula>> = out.into_iter().map(|b| b.gamma).collect();
            got.sort();
            assert_eq!(got, baseline);
        }
    }
}
