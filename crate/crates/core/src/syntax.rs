//! Formula AST, per-logic language validation, formula complexity and
//! subformula closure.
//!
//! The base language has atoms, the boolean connectives and the conditional
//! `A |~ B` whose operands are purely propositional. The calculi additionally
//! use two internal modalities: `BoxNeg(A)` stands for the G-style box applied
//! to a negation (written `[]~A`), and `LMod(A)` is the state modality `L A`
//! used by the CL and C systems.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// The four KLM systems, from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Logic {
    C,
    Cl,
    P,
    R,
}

impl Logic {
    pub const ALL: [Logic; 4] = [Logic::C, Logic::Cl, Logic::P, Logic::R];

    /// CL and C interpret conditionals over states; their calculi wrap
    /// antecedents and consequents in the `L` modality.
    pub fn uses_states(self) -> bool {
        matches!(self, Logic::C | Logic::Cl)
    }

    pub fn name(self) -> &'static str {
        match self {
            Logic::C => "C",
            Logic::Cl => "CL",
            Logic::P => "P",
            Logic::R => "R",
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Conditional assertion `ante |~ cons`.
    Cond(Box<Formula>, Box<Formula>),
    /// `[]~A`: every preferred world falsifies the body.
    BoxNeg(Box<Formula>),
    /// `L A`: every world of the current state satisfies the body.
    LMod(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Atom(name.to_string())
    }

    pub fn neg(self) -> Formula {
        Neg(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Implies(Box::new(self), Box::new(other))
    }

    pub fn cond(self, other: Formula) -> Formula {
        Cond(Box::new(self), Box::new(other))
    }

    pub fn box_neg(self) -> Formula {
        BoxNeg(Box::new(self))
    }

    pub fn lmod(self) -> Formula {
        LMod(Box::new(self))
    }

    /// `~F`, collapsing a leading negation instead of stacking a new one.
    pub fn complement(&self) -> Formula {
        match self {
            Neg(g) => (**g).clone(),
            other => other.clone().neg(),
        }
    }

    pub fn is_conditional(&self) -> bool {
        matches!(self, Cond(..))
    }

    /// `Some((ante, cons))` when the formula is `~(ante |~ cons)`.
    pub fn as_neg_cond(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Neg(g) => match &**g {
                Cond(a, b) => Some((a, b)),
                _ => None,
            },
            _ => None,
        }
    }

    /// No conditional, box or L modality anywhere inside.
    pub fn is_propositional(&self) -> bool {
        match self {
            Atom(_) => true,
            Neg(g) => g.is_propositional(),
            And(l, r) | Or(l, r) | Implies(l, r) => l.is_propositional() && r.is_propositional(),
            Cond(..) | BoxNeg(_) | LMod(_) => false,
        }
    }

    /// The complexity measure `cp`: atoms weigh 1, `~` and the binary boolean
    /// connectives add 1, a conditional adds 3, `[]~A` counts as box over
    /// `~A`, and `L` adds 1.
    pub fn cp(&self) -> u64 {
        match self {
            Atom(_) => 1,
            Neg(g) => 1 + g.cp(),
            And(l, r) | Or(l, r) | Implies(l, r) => 1 + l.cp() + r.cp(),
            Cond(a, b) => 3 + a.cp() + b.cp(),
            BoxNeg(a) => 2 + a.cp(),
            LMod(a) => 1 + a.cp(),
        }
    }

    pub fn atoms_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Atom(p) => {
                out.insert(p.clone());
            }
            Neg(g) | BoxNeg(g) | LMod(g) => g.atoms_into(out),
            And(l, r) | Or(l, r) | Implies(l, r) | Cond(l, r) => {
                l.atoms_into(out);
                r.atoms_into(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.atoms_into(&mut out);
        out
    }

    /// Every subformula including the formula itself.
    pub fn subformulas_into(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Atom(_) => {}
            Neg(g) | BoxNeg(g) | LMod(g) => g.subformulas_into(out),
            And(l, r) | Or(l, r) | Implies(l, r) | Cond(l, r) => {
                l.subformulas_into(out);
                r.subformulas_into(out);
            }
        }
    }

    /// Conditional subformulas occurring with the given polarity. Polarity
    /// flips under `~` and on the left of `->`; conditional operands are
    /// propositional so the walk stops at a conditional.
    fn cond_occurrences_into(&self, positive: bool, pos: &mut BTreeSet<Formula>, neg: &mut BTreeSet<Formula>) {
        match self {
            Cond(..) => {
                if positive {
                    pos.insert(self.clone());
                } else {
                    neg.insert(self.clone());
                }
            }
            Neg(g) => g.cond_occurrences_into(!positive, pos, neg),
            And(l, r) | Or(l, r) => {
                l.cond_occurrences_into(positive, pos, neg);
                r.cond_occurrences_into(positive, pos, neg);
            }
            Implies(l, r) => {
                l.cond_occurrences_into(!positive, pos, neg);
                r.cond_occurrences_into(positive, pos, neg);
            }
            Atom(_) | BoxNeg(_) | LMod(_) => {}
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Cond(..) => 1,
            Implies(..) => 2,
            Or(..) => 3,
            And(..) => 4,
            Neg(_) | BoxNeg(_) | LMod(_) => 5,
            Atom(_) => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Atom(name) => f.write_str(name),
            Neg(g) => {
                f.write_str("~")?;
                g.fmt_prec(f, 5)
            }
            BoxNeg(g) => {
                f.write_str("[]~")?;
                g.fmt_prec(f, 5)
            }
            LMod(g) => {
                f.write_str("L ")?;
                g.fmt_prec(f, 5)
            }
            And(l, r) => {
                l.fmt_prec(f, 4)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, 5)
            }
            Or(l, r) => {
                l.fmt_prec(f, 3)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, 4)
            }
            Implies(l, r) => {
                l.fmt_prec(f, 3)?;
                f.write_str(" -> ")?;
                r.fmt_prec(f, 2)
            }
            Cond(l, r) => {
                l.fmt_prec(f, 2)?;
                f.write_str(" |~ ")?;
                r.fmt_prec(f, 2)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Distinct conditionals occurring positively / negatively in a set.
pub fn cond_occurrences(gamma: impl IntoIterator<Item = Formula>) -> (BTreeSet<Formula>, BTreeSet<Formula>) {
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for f in gamma {
        f.cond_occurrences_into(true, &mut pos, &mut neg);
    }
    (pos, neg)
}

/// Which layer of the language a formula must live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    /// The input language: no box, no `L`.
    Base,
    /// The calculus-internal language of the given logic.
    Calculus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub offender: Formula,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.message, self.offender)
    }
}

/// Checks the shape invariants of `f` for the given logic and layer. Returns
/// every violation instead of stopping at the first.
pub fn validate_language(f: &Formula, logic: Logic, layer: Layer) -> Vec<Violation> {
    let mut out = Vec::new();
    walk_validate(f, logic, layer, &mut out);
    out
}

fn violation(out: &mut Vec<Violation>, f: &Formula, message: &str) {
    out.push(Violation {
        offender: f.clone(),
        message: message.to_string(),
    });
}

fn walk_validate(f: &Formula, logic: Logic, layer: Layer, out: &mut Vec<Violation>) {
    match f {
        Atom(_) => {}
        Neg(g) => {
            if layer == Layer::Calculus && logic == Logic::C {
                if let BoxNeg(_) = &**g {
                    violation(out, f, "negated box formulas are not allowed in the C calculus language");
                }
            }
            walk_validate(g, logic, layer, out);
        }
        And(l, r) | Or(l, r) | Implies(l, r) => {
            walk_validate(l, logic, layer, out);
            walk_validate(r, logic, layer, out);
        }
        Cond(a, b) => {
            if !a.is_propositional() {
                violation(out, f, "conditional antecedent must be propositional");
            }
            if !b.is_propositional() {
                violation(out, f, "conditional consequent must be propositional");
            }
        }
        BoxNeg(body) => {
            if layer == Layer::Base {
                violation(out, f, "box is calculus-internal and not allowed in the base language");
            } else {
                match logic {
                    Logic::P | Logic::R => {
                        if !body.is_propositional() {
                            violation(out, f, "box body must be propositional in the P/R calculus language");
                        }
                    }
                    Logic::Cl | Logic::C => match &**body {
                        LMod(inner) if inner.is_propositional() => {}
                        _ => violation(out, f, "box must apply to an L-formula in the CL/C calculus language"),
                    },
                }
            }
        }
        LMod(body) => {
            if layer == Layer::Base {
                violation(out, f, "L is calculus-internal and not allowed in the base language");
            } else if matches!(logic, Logic::P | Logic::R) {
                violation(out, f, "L is not part of the P/R calculus language");
            } else if !body.is_propositional() {
                violation(out, f, "L body must be propositional");
            }
        }
    }
}

/// The finite set of formulas that can appear in a tableau node rooted at the
/// given base-language formulas: all subformulas, the modal wrappings the
/// logic's rules introduce for conditional antecedents and consequents, and a
/// single complement of each. For C the negated box wrappings are omitted
/// (the C calculus language has no `~[]~L A`).
pub fn closure_set(kb_formulas: &BTreeSet<Formula>, logic: Logic) -> BTreeSet<Formula> {
    let mut pool = BTreeSet::new();
    for f in kb_formulas {
        f.subformulas_into(&mut pool);
    }
    let mut wrapped = BTreeSet::new();
    for f in pool.iter() {
        if let Cond(a, b) = f {
            match logic {
                Logic::P | Logic::R => {
                    wrapped.insert((**a).clone().box_neg());
                }
                Logic::Cl | Logic::C => {
                    wrapped.insert((**a).clone().lmod());
                    wrapped.insert((**a).clone().lmod().box_neg());
                    wrapped.insert((**b).clone().lmod());
                }
            }
        }
    }
    pool.extend(wrapped);
    let mut out = pool.clone();
    for f in pool {
        if logic == Logic::C && matches!(f, BoxNeg(_)) {
            continue;
        }
        out.insert(f.complement());
    }
    out
}

/// One KB line: a formula plus its 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub formula: Formula,
    pub line: usize,
}

/// A knowledge base: a finite list of base-language assertions, typically
/// conditionals or boolean combinations of them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub assertions: Vec<Assertion>,
}

impl KnowledgeBase {
    pub fn formulas(&self) -> BTreeSet<Formula> {
        self.assertions.iter().map(|a| a.formula.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }
}

/// Interns the atoms of a query so models can use dense indices.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl AtomTable {
    pub fn from_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> AtomTable {
        let mut set = BTreeSet::new();
        for f in formulas {
            f.atoms_into(&mut set);
        }
        let mut table = AtomTable::default();
        for name in set {
            table.insert(&name);
        }
        table
    }

    pub fn insert(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

pub fn format_set<'a>(set: impl IntoIterator<Item = &'a Formula>) -> String {
    let items: Vec<String> = set.into_iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn cp_matches_definition() {
        assert_eq!(p("p").cp(), 1);
        assert_eq!(p("p |~ q").cp(), 5);
        assert_eq!(Formula::atom("p").box_neg().cp(), 3);
        assert_eq!(p("~p").cp(), 2);
        assert_eq!(p("p & q").cp(), 3);
        // cp(L a) = 1 + cp(a), so (L-) strictly shrinks c4.
        assert_eq!(Formula::atom("p").lmod().cp(), 2);
        assert_eq!(Formula::atom("p").lmod().box_neg().cp(), 4);
    }

    #[test]
    fn cp_strictly_decreases_to_immediate_subformulas() {
        for s in ["~(a & b)", "a -> b | c", "~~a", "(a |~ b) & ~(c |~ d)"] {
            let f = p(s);
            let mut subs = BTreeSet::new();
            f.subformulas_into(&mut subs);
            for g in subs {
                if g != f {
                    assert!(g.cp() < f.cp(), "{g} not smaller than {f}");
                }
            }
        }
    }

    #[test]
    fn language_validation() {
        let box_l = Formula::atom("p").lmod().box_neg();
        assert!(validate_language(&box_l, Logic::Cl, Layer::Calculus).is_empty());
        assert!(!validate_language(&box_l.clone().neg(), Logic::C, Layer::Calculus).is_empty());
        assert!(validate_language(&box_l.neg(), Logic::Cl, Layer::Calculus).is_empty());
        let l = Formula::atom("p").lmod();
        assert!(!validate_language(&l, Logic::P, Layer::Calculus).is_empty());
        assert!(!validate_language(&l, Logic::Cl, Layer::Base).is_empty());
        let plain_box = Formula::atom("p").box_neg();
        assert!(validate_language(&plain_box, Logic::R, Layer::Calculus).is_empty());
        assert!(!validate_language(&plain_box, Logic::Cl, Layer::Calculus).is_empty());
        assert!(validate_language(&p("a |~ b"), Logic::C, Layer::Base).is_empty());
    }

    #[test]
    fn closure_contains_rule_material() {
        let mut kb = BTreeSet::new();
        kb.insert(p("a |~ b"));
        let cl = closure_set(&kb, Logic::P);
        for s in ["~a", "b", "a"] {
            assert!(cl.contains(&p(s)));
        }
        assert!(cl.contains(&Formula::atom("a").box_neg()));
        assert!(cl.contains(&Formula::atom("a").box_neg().neg()));

        let mut kb = BTreeSet::new();
        kb.insert(p("~(a |~ b)"));
        let cl = closure_set(&kb, Logic::Cl);
        assert!(cl.contains(&Formula::atom("a").lmod()));
        assert!(cl.contains(&Formula::atom("a").lmod().box_neg()));
        assert!(cl.contains(&Formula::atom("b").lmod().neg()));

        let cl_c = closure_set(&kb, Logic::C);
        assert!(!cl_c.contains(&Formula::atom("a").lmod().box_neg().neg()));
        assert!(cl_c.contains(&Formula::atom("a").lmod().box_neg()));
    }

    #[test]
    fn closure_is_monotone_and_idempotent() {
        let small: BTreeSet<_> = [p("a |~ b")].into_iter().collect();
        let big: BTreeSet<_> = [p("a |~ b"), p("~(c |~ ~a)")].into_iter().collect();
        for logic in Logic::ALL {
            let cs = closure_set(&small, logic);
            let cb = closure_set(&big, logic);
            assert!(cs.is_subset(&cb), "monotone for {logic}");
            assert_eq!(closure_set(&cb, logic), cb, "idempotent for {logic}");
        }
        assert!(closure_set(&BTreeSet::new(), Logic::P).is_empty());
    }

    #[test]
    fn polarity_occurrences() {
        let (pos, neg) = cond_occurrences([p("~((a |~ b) | c)"), p("(d |~ e) -> f")]);
        assert!(neg.contains(&p("a |~ b")));
        assert!(neg.contains(&p("d |~ e")));
        assert!(pos.is_empty());
        let (pos, neg) = cond_occurrences([p("~~(a |~ b)")]);
        assert!(pos.contains(&p("a |~ b")));
        assert!(neg.is_empty());
    }
}
