//! Decision procedure for cumulative logic C.
//!
//! The calculus folds the analytic cut needed for smoothness into a
//! three-conclusion conditional rule whose middle conclusion jumps to a new
//! world; it has no box rule and no negated box formulas. Because the rule
//! keeps its principal, plain proof search would loop, so satisfiability is
//! decided as a least fixpoint of refutability over the finite space of
//! nodes inside the closure of the input: a node is refutable iff it is an
//! axiom or some rule instance has all conclusions refutable; cycles resolve
//! to open.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{Decision, DecideOptions, Stats, TraceNode, Verdict};
use crate::syntax::{closure_set, Formula, Logic};

/// A C tableau node: a bare formula set in the C calculus language.
pub type CNode = BTreeSet<Formula>;

/// One rule instance: to refute the node, all conclusions must be refuted.
#[derive(Debug, Clone)]
pub struct CRuleInstance {
    pub rule: &'static str,
    pub principal: Option<Formula>,
    pub conclusions: Vec<CNode>,
}

/// Entry states of the refutability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refutability {
    Refutable,
    Open,
    Pending,
}

fn cond_pm(node: &CNode) -> BTreeSet<Formula> {
    node.iter()
        .filter(|f| match f {
            Formula::Cond(..) => true,
            Formula::Neg(g) => matches!(**g, Formula::Cond(..)),
            _ => false,
        })
        .cloned()
        .collect()
}

fn box_down(node: &CNode) -> BTreeSet<Formula> {
    node.iter()
        .filter_map(|f| match f {
            Formula::BoxNeg(body) => Some((**body).clone().neg()),
            _ => None,
        })
        .collect()
}

fn l_down(node: &CNode) -> BTreeSet<Formula> {
    node.iter()
        .filter_map(|f| match f {
            Formula::LMod(body) => Some((**body).clone()),
            _ => None,
        })
        .collect()
}

pub fn is_axiom_c(node: &CNode) -> bool {
    node.iter().any(|f| match f {
        Formula::Neg(g) => matches!(**g, Formula::Atom(_)) && node.contains(g),
        _ => false,
    })
}

/// Every applicable rule instance of the C calculus on this node.
pub fn applicable_rule_instances_c(node: &CNode) -> Vec<CRuleInstance> {
    let mut out = Vec::new();
    let has_neg_l = node
        .iter()
        .any(|f| matches!(f, Formula::Neg(g) if matches!(**g, Formula::LMod(_))));
    for f in node {
        // Boolean rules, consuming their principal.
        let mut bool_branches: Option<(&'static str, Vec<Vec<Formula>>)> = None;
        match f {
            Formula::And(l, r) => {
                bool_branches = Some(("(and+)", vec![vec![(**l).clone(), (**r).clone()]]));
            }
            Formula::Or(l, r) => {
                bool_branches = Some(("(or+)", vec![vec![(**l).clone()], vec![(**r).clone()]]));
            }
            Formula::Implies(l, r) => {
                bool_branches = Some(("(->+)", vec![vec![(**l).clone().neg()], vec![(**r).clone()]]));
            }
            Formula::Neg(g) => match &**g {
                Formula::Neg(h) => bool_branches = Some(("(neg)", vec![vec![(**h).clone()]])),
                Formula::And(l, r) => {
                    bool_branches = Some((
                        "(and-)",
                        vec![vec![(**l).clone().neg()], vec![(**r).clone().neg()]],
                    ));
                }
                Formula::Or(l, r) => {
                    bool_branches = Some((
                        "(or-)",
                        vec![vec![(**l).clone().neg(), (**r).clone().neg()]],
                    ));
                }
                Formula::Implies(l, r) => {
                    bool_branches = Some(("(->-)", vec![vec![(**l).clone(), (**r).clone().neg()]]));
                }
                Formula::Cond(a, b) => {
                    // (cond-): L A, []~L A, ~L B plus the conditionals of the
                    // rest.
                    let mut rest = node.clone();
                    rest.remove(f);
                    let mut conclusion = cond_pm(&rest);
                    conclusion.insert((**a).clone().lmod());
                    conclusion.insert((**a).clone().lmod().box_neg());
                    conclusion.insert((**b).clone().lmod().neg());
                    out.push(CRuleInstance {
                        rule: "(cond-)",
                        principal: Some(f.clone()),
                        conclusions: vec![conclusion],
                    });
                }
                Formula::LMod(body) => {
                    // (L-) with negated L-formulas present.
                    let mut rest = node.clone();
                    rest.remove(f);
                    let mut conclusion = l_down(&rest);
                    conclusion.insert((**body).clone().neg());
                    out.push(CRuleInstance {
                        rule: "(L-)",
                        principal: Some(f.clone()),
                        conclusions: vec![conclusion],
                    });
                }
                _ => {}
            },
            Formula::Cond(a, b) => {
                // (cond+) with the weak cut folded in: the middle conclusion
                // jumps to a fresh minimal world for L A.
                let mut left = node.clone();
                left.insert((**a).clone().lmod().neg());
                let mut middle = cond_pm(node);
                middle.extend(box_down(node));
                middle.insert(f.clone());
                middle.insert((**a).clone().lmod());
                middle.insert((**a).clone().lmod().box_neg());
                let mut right = node.clone();
                right.insert((**a).clone().lmod());
                right.insert((**a).clone().lmod().box_neg());
                right.insert((**b).clone().lmod());
                // A conclusion equal to the premise makes the instance a
                // self-loop that can never establish refutability.
                if left != *node && middle != *node && right != *node {
                    out.push(CRuleInstance {
                        rule: "(cond+)",
                        principal: Some(f.clone()),
                        conclusions: vec![left, middle, right],
                    });
                }
            }
            _ => {}
        }
        if let Some((rule, branches)) = bool_branches {
            let conclusions = branches
                .into_iter()
                .map(|adds| {
                    let mut child = node.clone();
                    child.remove(f);
                    child.extend(adds);
                    child
                })
                .collect();
            out.push(CRuleInstance {
                rule,
                principal: Some(f.clone()),
                conclusions,
            });
        }
    }
    // Serial (L-): only without negated L-formulas and with some L A present.
    if !has_neg_l && node.iter().any(|f| matches!(f, Formula::LMod(_))) {
        out.push(CRuleInstance {
            rule: "(L-serial)",
            principal: None,
            conclusions: vec![l_down(node)],
        });
    }
    out
}

fn strip_double_neg(f: &Formula) -> &Formula {
    let mut cur = f;
    loop {
        match cur {
            Formula::Neg(g) => match &**g {
                Formula::Neg(h) => cur = h,
                _ => return cur,
            },
            _ => return cur,
        }
    }
}

/// Exploration and fixpoint report, exposed for invariant checks.
#[derive(Debug, Clone)]
pub struct CReport {
    /// Distinct nodes reached.
    pub nodes: usize,
    /// Every formula of every reached node lies in the closure of the input
    /// (modulo leading double negations).
    pub closure_respected: bool,
    /// Final table, aligned with exploration order.
    pub table: Vec<Refutability>,
}

pub fn decide_c(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> Decision {
    let (decision, _) = decide_c_detailed(gamma, options);
    decision
}

pub fn decide_c_detailed(gamma: &BTreeSet<Formula>, options: &DecideOptions) -> (Decision, CReport) {
    let closure = closure_set(gamma, Logic::C);
    let root: CNode = gamma.clone();

    let mut ids: BTreeMap<CNode, usize> = BTreeMap::new();
    let mut nodes: Vec<CNode> = Vec::new();
    let mut instances: Vec<Vec<(&'static str, Option<Formula>, Vec<usize>)>> = Vec::new();
    let mut closure_respected = true;

    let intern = |node: CNode,
                      nodes: &mut Vec<CNode>,
                      ids: &mut BTreeMap<CNode, usize>,
                      queue: &mut Vec<usize>,
                      closure_respected: &mut bool| {
        if let Some(&i) = ids.get(&node) {
            return i;
        }
        if !node.iter().all(|f| closure.contains(strip_double_neg(f))) {
            *closure_respected = false;
        }
        let i = nodes.len();
        ids.insert(node.clone(), i);
        nodes.push(node);
        queue.push(i);
        i
    };

    let mut queue = Vec::new();
    intern(root, &mut nodes, &mut ids, &mut queue, &mut closure_respected);
    while let Some(i) = queue.pop() {
        let node = nodes[i].clone();
        let insts = if is_axiom_c(&node) {
            Vec::new()
        } else {
            applicable_rule_instances_c(&node)
        };
        let mut entry = Vec::new();
        for inst in insts {
            let child_ids: Vec<usize> = inst
                .conclusions
                .into_iter()
                .map(|c| intern(c, &mut nodes, &mut ids, &mut queue, &mut closure_respected))
                .collect();
            entry.push((inst.rule, inst.principal, child_ids));
        }
        while instances.len() <= i {
            instances.push(Vec::new());
        }
        instances[i] = entry;
    }
    while instances.len() < nodes.len() {
        instances.push(Vec::new());
    }

    // Least fixpoint by counting unrefuted conclusions per instance.
    let n = nodes.len();
    let mut table = vec![Refutability::Pending; n];
    let mut witness: Vec<Option<usize>> = vec![None; n];
    let mut remaining: Vec<Vec<usize>> = instances
        .iter()
        .map(|insts| insts.iter().map(|(_, _, cs)| cs.len()).collect())
        .collect();
    let mut rev: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, insts) in instances.iter().enumerate() {
        for (k, (_, _, cs)) in insts.iter().enumerate() {
            for &c in cs {
                rev.entry(c).or_default().push((i, k));
            }
        }
    }
    let mut work: Vec<usize> = (0..n).filter(|&i| is_axiom_c(&nodes[i])).collect();
    for &i in &work {
        table[i] = Refutability::Refutable;
    }
    while let Some(v) = work.pop() {
        if let Some(parents) = rev.get(&v) {
            for &(i, k) in parents {
                remaining[i][k] -= 1;
                if remaining[i][k] == 0 && table[i] != Refutability::Refutable {
                    table[i] = Refutability::Refutable;
                    witness[i] = Some(k);
                    work.push(i);
                }
            }
        }
    }
    for t in table.iter_mut() {
        if *t == Refutability::Pending {
            *t = Refutability::Open;
        }
    }

    fn build_trace(
        i: usize,
        nodes: &[CNode],
        instances: &[Vec<(&'static str, Option<Formula>, Vec<usize>)>],
        witness: &[Option<usize>],
    ) -> TraceNode {
        match witness[i] {
            None => TraceNode::leaf("(AX)", None),
            Some(k) => {
                let (rule, principal, children) = &instances[i][k];
                TraceNode {
                    rule: rule.to_string(),
                    principal: principal.as_ref().map(|p| p.to_string()),
                    children: children
                        .iter()
                        .map(|&c| build_trace(c, nodes, instances, witness))
                        .collect(),
                }
            }
        }
    }

    let refuted = table[0] == Refutability::Refutable;
    let verdict = if refuted {
        let trace = options
            .record_trace
            .then(|| build_trace(0, &nodes, &instances, &witness));
        Verdict::Unsat { trace }
    } else {
        // SAT answers carry no extracted model for C; callers may attach
        // oracle evidence.
        Verdict::Sat { model: None, point: 0 }
    };
    (
        Decision {
            verdict,
            stats: Stats {
                nodes: n as u64,
                labels: 0,
            },
            measure_events: Vec::new(),
        },
        CReport {
            nodes: n,
            closure_respected,
            table,
        },
    )
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

    fn decide(items: &[&str]) -> (Decision, CReport) {
        decide_c_detailed(
            &gamma(items),
            &DecideOptions {
                record_trace: true,
                ..DecideOptions::default()
            },
        )
    }

    #[test]
    fn rule_instances() {
        let node = gamma(&["a |~ b"]);
        let insts = applicable_rule_instances_c(&node);
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].rule, "(cond+)");
        assert_eq!(insts[0].conclusions.len(), 3);
        let middle = &insts[0].conclusions[1];
        assert!(middle.contains(&pf("a |~ b")));
        assert!(middle.contains(&Formula::atom("a").lmod()));
        assert!(middle.contains(&Formula::atom("a").lmod().box_neg()));
        assert!(!middle.contains(&Formula::atom("a").lmod().neg()));

        let node = gamma(&["~(a |~ c)", "a |~ b"]);
        let insts = applicable_rule_instances_c(&node);
        let neg = insts.iter().find(|i| i.rule == "(cond-)").unwrap();
        let conclusion = &neg.conclusions[0];
        assert!(conclusion.contains(&Formula::atom("a").lmod()));
        assert!(conclusion.contains(&Formula::atom("a").lmod().box_neg()));
        assert!(conclusion.contains(&Formula::atom("c").lmod().neg()));
        assert!(conclusion.contains(&pf("a |~ b")));
        assert!(!conclusion.contains(&pf("~(a |~ c)")));

        assert!(applicable_rule_instances_c(&gamma(&["p"])).is_empty());
    }

    #[test]
    fn weak_cut_example_unsat() {
        let (d, report) = decide(&["~(A |~ C)", "A |~ B", "B |~ A", "B |~ C"]);
        assert!(!d.verdict.is_sat());
        assert!(report.closure_respected);
        if let Verdict::Unsat { trace: Some(t) } = &d.verdict {
            // The refutation must go through the folded weak cut, i.e. a
            // (cond+) application whose middle (jump) conclusion is refuted.
            assert!(t.uses_rule("(cond+)"));
        } else {
            panic!("expected trace");
        }
    }

    #[test]
    fn cycle_sat_in_c() {
        let (d, report) = decide(&["~(C |~ B)", "C |~ A", "A |~ B", "B |~ C"]);
        assert!(d.verdict.is_sat());
        assert!(report.closure_respected);
        assert!(report.table.iter().all(|t| *t != Refutability::Pending));
    }

    #[test]
    fn cut_valid_in_c() {
        let (d, _) = decide(&["A |~ B", "A & B |~ C", "~(A |~ C)"]);
        assert!(!d.verdict.is_sat());
    }

    #[test]
    fn basic_cases() {
        assert!(decide(&[]).0.verdict.is_sat());
        assert!(decide(&["p", "~p"]).0.verdict.is_sat() == false);
        assert!(!decide(&["~(a |~ a)"]).0.verdict.is_sat());
        assert!(decide(&["a |~ b"]).0.verdict.is_sat());
        assert!(!decide(&["a |~ b", "~(a |~ b)"]).0.verdict.is_sat());
    }
}
