//! Finite models for the four logics, satisfaction, structural validation,
//! bounded enumeration and the brute-force satisfiability oracle.
//!
//! Preferential and ranked models (`P`, `R`) carry the order directly on
//! worlds. Loop-cumulative and cumulative models (`CL`, `C`) order *states*,
//! each labelled with a nonempty set of worlds; a state satisfies a
//! propositional formula when all of its worlds do.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::syntax::{cond_occurrences, AtomTable, Formula, Logic};

/// Worlds ordered by a preference relation. `less` holds pairs `(u, v)` with
/// `u < v`, i.e. `u` is preferred to `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefModel {
    pub atoms: Vec<String>,
    pub worlds: usize,
    pub less: BTreeSet<(usize, usize)>,
    /// Atom names true at each world.
    pub val: Vec<BTreeSet<String>>,
}

/// States over a pool of worlds; the order lives on states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateModel {
    pub atoms: Vec<String>,
    pub states: usize,
    pub worlds: usize,
    /// Nonempty world set for each state.
    pub label: Vec<BTreeSet<usize>>,
    pub less: BTreeSet<(usize, usize)>,
    /// Atom names true at each world of the pool.
    pub val: Vec<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelRepr {
    Pref(PrefModel),
    State(StateModel),
}

impl ModelRepr {
    pub fn points(&self) -> usize {
        match self {
            ModelRepr::Pref(m) => m.worlds,
            ModelRepr::State(m) => m.states,
        }
    }
}

/// Partition of a multi-linear preferential model into totally ordered,
/// pairwise incomparable components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLinearTag {
    pub partition: Vec<BTreeSet<usize>>,
}

impl MultiLinearTag {
    /// Recovers the component partition of `m` and checks that the order is
    /// total on each component and empty across components.
    pub fn of(m: &PrefModel) -> Result<MultiLinearTag, ModelViolation> {
        let n = m.worlds;
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut Vec<usize>, x: usize) -> usize {
            let mut root = x;
            while comp[root] != root {
                root = comp[root];
            }
            let mut cur = x;
            while comp[cur] != root {
                let next = comp[cur];
                comp[cur] = root;
                cur = next;
            }
            root
        }
        for &(u, v) in &m.less {
            let (ru, rv) = (find(&mut comp, u), find(&mut comp, v));
            if ru != rv {
                comp[ru] = rv;
            }
        }
        let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for w in 0..n {
            let r = find(&mut comp, w);
            match roots.iter().position(|&x| x == r) {
                Some(i) => {
                    blocks[i].insert(w);
                }
                None => {
                    roots.push(r);
                    let mut b = BTreeSet::new();
                    b.insert(w);
                    blocks.push(b);
                }
            }
        }
        for b in &blocks {
            for &u in b {
                for &v in b {
                    if u != v && !m.less.contains(&(u, v)) && !m.less.contains(&(v, u)) {
                        return Err(ModelViolation {
                            message: format!("order is not total on a component: worlds {u} and {v} are incomparable"),
                        });
                    }
                }
            }
        }
        Ok(MultiLinearTag { partition: blocks })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelViolation {
    pub message: String,
}

impl core::fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.message)
    }
}

fn eval_world(val: &BTreeSet<String>, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => val.contains(p),
        Formula::Neg(g) => !eval_world(val, g),
        Formula::And(l, r) => eval_world(val, l) && eval_world(val, r),
        Formula::Or(l, r) => eval_world(val, l) || eval_world(val, r),
        Formula::Implies(l, r) => !eval_world(val, l) || eval_world(val, r),
        _ => unreachable!("non-propositional formula evaluated at a single world"),
    }
}

impl PrefModel {
    fn below(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.worlds).filter(move |&u| self.less.contains(&(u, w)))
    }

    pub fn eval_at(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(_) => eval_world(&self.val[w], f),
            Formula::Neg(g) => !self.eval_at(w, g),
            Formula::And(l, r) => self.eval_at(w, l) && self.eval_at(w, r),
            Formula::Or(l, r) => self.eval_at(w, l) || self.eval_at(w, r),
            Formula::Implies(l, r) => !self.eval_at(w, l) || self.eval_at(w, r),
            Formula::Cond(a, b) => self.min_worlds(a).iter().all(|&m| self.eval_at(m, b)),
            Formula::BoxNeg(a) => self.below(w).all(|u| !self.eval_at(u, a)),
            Formula::LMod(_) => unreachable!("L formulas have no meaning in a plain preferential model"),
        }
    }

    /// Minimal worlds satisfying a propositional formula.
    pub fn min_worlds(&self, f: &Formula) -> BTreeSet<usize> {
        let sat: Vec<usize> = (0..self.worlds).filter(|&w| self.eval_at(w, f)).collect();
        sat.iter()
            .copied()
            .filter(|&w| !sat.iter().any(|&u| u != w && self.less.contains(&(u, w))))
            .collect()
    }
}

impl StateModel {
    /// State satisfaction: a purely propositional formula holds at a state
    /// when all of its worlds satisfy it; `L A` at a state reads as `A`;
    /// conditionals quantify over minimal states; boolean structure above
    /// those units recurses as usual.
    pub fn eval_at(&self, s: usize, f: &Formula) -> bool {
        if f.is_propositional() {
            return self.label[s].iter().all(|&w| eval_world(&self.val[w], f));
        }
        match f {
            Formula::Neg(g) => !self.eval_at(s, g),
            Formula::And(l, r) => self.eval_at(s, l) && self.eval_at(s, r),
            Formula::Or(l, r) => self.eval_at(s, l) || self.eval_at(s, r),
            Formula::Implies(l, r) => !self.eval_at(s, l) || self.eval_at(s, r),
            Formula::Cond(a, b) => self.min_states(a).iter().all(|&m| self.eval_at(m, b)),
            Formula::LMod(a) => self.label[s].iter().all(|&w| eval_world(&self.val[w], a)),
            _ => unreachable!("box formulas have no meaning at a state"),
        }
    }

    /// Minimal states satisfying a propositional (or `L`-wrapped) formula.
    pub fn min_states(&self, f: &Formula) -> BTreeSet<usize> {
        let f = match f {
            Formula::LMod(a) => a,
            other => other,
        };
        let sat: Vec<usize> = (0..self.states).filter(|&s| self.eval_at(s, f)).collect();
        sat.iter()
            .copied()
            .filter(|&s| !sat.iter().any(|&t| t != s && self.less.contains(&(t, s))))
            .collect()
    }
}

/// Evaluates `f` at a point (world or state) of the model.
pub fn eval_formula_at(m: &ModelRepr, point: usize, f: &Formula, _logic: Logic) -> bool {
    match m {
        ModelRepr::Pref(p) => p.eval_at(point, f),
        ModelRepr::State(s) => s.eval_at(point, f),
    }
}

/// Minimal points for a propositional formula.
pub fn min_worlds(m: &ModelRepr, f: &Formula, _logic: Logic) -> BTreeSet<usize> {
    match m {
        ModelRepr::Pref(p) => p.min_worlds(f),
        ModelRepr::State(s) => s.min_states(f),
    }
}

fn check_irreflexive(less: &BTreeSet<(usize, usize)>, out: &mut Vec<ModelViolation>) {
    for &(u, v) in less {
        if u == v {
            out.push(ModelViolation {
                message: format!("order is not irreflexive: {u} < {u}"),
            });
        }
    }
}

fn check_transitive(less: &BTreeSet<(usize, usize)>, out: &mut Vec<ModelViolation>) {
    for &(u, v) in less {
        for &(v2, w) in less {
            if v == v2 && !less.contains(&(u, w)) {
                out.push(ModelViolation {
                    message: format!("order is not transitive: {u} < {v} < {w} but not {u} < {w}"),
                });
            }
        }
    }
}

/// Checks the structural conditions the logic imposes on a model. For `C`,
/// smoothness is checked explicitly for each relevant antecedent: every
/// antecedent-satisfying state must be minimal or sit above a minimal one.
pub fn validate_model(m: &ModelRepr, logic: Logic, relevant_antecedents: &BTreeSet<Formula>) -> Vec<ModelViolation> {
    let mut out = Vec::new();
    match (m, logic) {
        (ModelRepr::Pref(p), Logic::P | Logic::R) => {
            check_irreflexive(&p.less, &mut out);
            check_transitive(&p.less, &mut out);
            if logic == Logic::R {
                for &(w1, w2) in &p.less {
                    for w in 0..p.worlds {
                        if !p.less.contains(&(w1, w)) && !p.less.contains(&(w, w2)) {
                            out.push(ModelViolation {
                                message: format!("order is not modular: {w1} < {w2} but neither {w1} < {w} nor {w} < {w2}"),
                            });
                        }
                    }
                }
            }
        }
        (ModelRepr::State(s), Logic::Cl | Logic::C) => {
            check_irreflexive(&s.less, &mut out);
            if logic == Logic::Cl {
                check_transitive(&s.less, &mut out);
            }
            for (i, l) in s.label.iter().enumerate() {
                if l.is_empty() {
                    out.push(ModelViolation {
                        message: format!("state {i} has an empty label"),
                    });
                }
                if let Some(&w) = l.iter().find(|&&w| w >= s.worlds) {
                    out.push(ModelViolation {
                        message: format!("state {i} labels unknown world {w}"),
                    });
                }
            }
            if logic == Logic::C {
                for a in relevant_antecedents {
                    let min = s.min_states(a);
                    for st in 0..s.states {
                        if s.eval_at(st, a)
                            && !min.contains(&st)
                            && !min.iter().any(|&mm| s.less.contains(&(mm, st)))
                        {
                            out.push(ModelViolation {
                                message: format!("smoothness fails for antecedent {a}: state {st} satisfies it but no minimal state lies below"),
                            });
                        }
                    }
                }
            }
        }
        (ModelRepr::Pref(_), _) => out.push(ModelViolation {
            message: "preferential models interpret only P and R".to_string(),
        }),
        (ModelRepr::State(_), _) => out.push(ModelViolation {
            message: "state models interpret only CL and C".to_string(),
        }),
    }
    out
}

// ---------------------------------------------------------------------------
// Order enumeration helpers
// ---------------------------------------------------------------------------

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    // Restricted growth strings.
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().copied().unwrap_or(0) + 1;
        let mut part: Vec<Vec<usize>> = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            part[b].push(i);
        }
        out.push(part);
        // next RGS
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let max_prefix = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest: Vec<usize> = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            let mut perm = vec![x];
            perm.append(&mut tail);
            out.push(perm);
        }
    }
    out
}

/// All multi-linear orders on `n` labelled worlds: partitions into disjoint
/// totally ordered chains (bottom to top), incomparable across chains.
pub fn multilinear_orders(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let mut out = Vec::new();
    for part in set_partitions(n) {
        let mut chain_choices: Vec<Vec<Vec<usize>>> = Vec::new();
        for block in &part {
            chain_choices.push(permutations(block));
        }
        let mut idx = vec![0usize; chain_choices.len()];
        loop {
            let mut less = BTreeSet::new();
            for (b, choice) in chain_choices.iter().enumerate() {
                let chain = &choice[idx[b]];
                for i in 0..chain.len() {
                    for j in (i + 1)..chain.len() {
                        less.insert((chain[i], chain[j]));
                    }
                }
            }
            out.push(less);
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < chain_choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        if chain_choices.is_empty() {
            // n == 0: the single empty order was already pushed.
        }
    }
    out
}

/// All ranked (modular) orders on `n` labelled worlds: ordered set
/// partitions; `u < v` iff `rank(u) < rank(v)`.
pub fn ranked_orders(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let mut out = Vec::new();
    for part in set_partitions(n) {
        let blocks: Vec<usize> = (0..part.len()).collect();
        for perm in permutations(&blocks) {
            let mut less = BTreeSet::new();
            for i in 0..perm.len() {
                for j in (i + 1)..perm.len() {
                    for &u in &part[perm[i]] {
                        for &v in &part[perm[j]] {
                            less.insert((u, v));
                        }
                    }
                }
            }
            out.push(less);
        }
    }
    out
}

fn relations_from_bits(n: usize, bits: u64) -> BTreeSet<(usize, usize)> {
    let mut less = BTreeSet::new();
    let mut k = 0;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                if bits >> k & 1 == 1 {
                    less.insert((u, v));
                }
                k += 1;
            }
        }
    }
    less
}

fn is_transitive(less: &BTreeSet<(usize, usize)>) -> bool {
    less.iter().all(|&(u, v)| {
        less.iter().filter(|&&(v2, _)| v2 == v).all(|&(_, w)| less.contains(&(u, w)))
    })
}

/// All strict partial orders (irreflexive, transitive) on `n` labelled points.
pub fn strict_partial_orders(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let pairs = n * (n - 1);
    (0..1u64 << pairs)
        .map(|bits| relations_from_bits(n, bits))
        .filter(is_transitive)
        .collect()
}

/// All irreflexive relations on `n` labelled points (the C order).
pub fn irreflexive_orders(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let pairs = n * (n - 1);
    (0..1u64 << pairs).map(|bits| relations_from_bits(n, bits)).collect()
}

/// All transitive irreflexive (not necessarily modular) orders; used by the
/// debug cross-check of the multi-linear P enumeration.
pub fn preferential_orders(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    strict_partial_orders(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// P models are enumerated as multi-linear by default; turning this off
    /// enumerates every strict partial order instead (debug cross-check).
    pub p_multilinear: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { p_multilinear: true }
    }
}

fn valuation_set(atoms: &[String], bits: u32) -> BTreeSet<String> {
    atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| bits >> *i & 1 == 1)
        .map(|(_, a)| a.clone())
        .collect()
}

fn world_pools(num_vals: usize, bound: usize) -> Vec<Vec<u32>> {
    // Labels pick subsets of the pool, so only maximal pools are needed: a
    // model over a smaller pool is literally a model over a larger one.
    let all: Vec<u32> = (0..num_vals as u32).collect();
    if num_vals <= bound {
        return vec![all];
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..bound).collect();
    loop {
        out.push(combo.iter().map(|&i| all[i]).collect());
        let mut i = bound;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] != i + num_vals - bound {
                combo[i] += 1;
                for j in (i + 1)..bound {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exhaustively yields every model of the logic's class with at most `bound`
/// points, valuations ranging over the given atoms. Smaller models come
/// first; within a size the enumeration order is deterministic.
pub fn enumerate_models(
    atoms: &[String],
    bound: usize,
    logic: Logic,
    options: EnumOptions,
) -> Box<dyn Iterator<Item = ModelRepr>> {
    assert!(bound >= 1, "enumeration bound must be at least 1");
    assert!(atoms.len() <= 16, "model enumeration supports at most 16 atoms");
    let atoms: Vec<String> = atoms.to_vec();
    let num_vals = 1usize << atoms.len();
    match logic {
        Logic::P | Logic::R => {
            let iter = (1..=bound).flat_map(move |n| {
                let atoms = atoms.clone();
                let orders = match logic {
                    Logic::R => ranked_orders(n),
                    _ if options.p_multilinear => multilinear_orders(n),
                    _ => preferential_orders(n),
                };
                orders.into_iter().flat_map(move |less| {
                    let atoms = atoms.clone();
                    (0..num_vals.pow(n as u32)).map(move |mut code| {
                        let mut val = Vec::with_capacity(n);
                        for _ in 0..n {
                            val.push(valuation_set(&atoms, (code % num_vals) as u32));
                            code /= num_vals;
                        }
                        ModelRepr::Pref(PrefModel {
                            atoms: atoms.clone(),
                            worlds: n,
                            less: less.clone(),
                            val,
                        })
                    })
                })
            });
            Box::new(iter)
        }
        Logic::Cl | Logic::C => {
            let iter = (1..=bound).flat_map(move |s| {
                let atoms = atoms.clone();
                let pools = world_pools(num_vals, bound);
                pools.into_iter().flat_map(move |pool| {
                    let atoms = atoms.clone();
                    let orders = match logic {
                        Logic::Cl => strict_partial_orders(s),
                        _ => irreflexive_orders(s),
                    };
                    orders.into_iter().flat_map(move |less| {
                        let atoms = atoms.clone();
                        let pool = pool.clone();
                        let labels_per_state = (1usize << pool.len()) - 1;
                        (0..labels_per_state.pow(s as u32)).map(move |mut code| {
                            let mut label = Vec::with_capacity(s);
                            for _ in 0..s {
                                let mask = (code % labels_per_state) + 1;
                                label.push((0..pool.len()).filter(|i| mask >> i & 1 == 1).collect());
                                code /= labels_per_state;
                            }
                            ModelRepr::State(StateModel {
                                atoms: atoms.clone(),
                                states: s,
                                worlds: pool.len(),
                                label,
                                less: less.clone(),
                                val: pool.iter().map(|&v| valuation_set(&atoms, v)).collect(),
                            })
                        })
                    })
                })
            });
            Box::new(iter)
        }
    }
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Sat { model: ModelRepr, point: usize },
    /// No model with at most `bound` points satisfies the input. Definitive
    /// (a proof of unsatisfiability) only for R with a large enough bound.
    NoModelWithinBound { definitive: bool },
}

impl OracleAnswer {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleAnswer::Sat { .. })
    }
}

/// Worlds needed for a satisfiable R set per the small-model construction:
/// one designated world plus one per conditional occurrence, and never more
/// than one world per distinct valuation.
pub fn r_small_model_bound(gamma: &BTreeSet<Formula>) -> usize {
    let (pos, neg) = cond_occurrences(gamma.iter().cloned());
    let atoms = AtomTable::from_formulas(gamma.iter());
    let by_occurrences = 1 + pos.len() + neg.len();
    let by_valuations = 1usize << atoms.len().min(20);
    by_occurrences.min(by_valuations)
}

/// Compiled query: members are boolean combinations over two kinds of units,
/// maximal propositional subformulas and conditionals.
struct Compiled {
    prop_units: Vec<Formula>,
    conds: Vec<(usize, usize)>,
    members: Vec<Expr>,
    point_dependent: bool,
    antecedent_units: Vec<usize>,
}

enum Expr {
    Prop(usize),
    Cond(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Compiled {
    fn new(gamma: &BTreeSet<Formula>) -> Compiled {
        let mut c = Compiled {
            prop_units: Vec::new(),
            conds: Vec::new(),
            members: Vec::new(),
            point_dependent: false,
            antecedent_units: Vec::new(),
        };
        let exprs: Vec<Expr> = gamma.iter().map(|f| c.compile(f)).collect();
        c.members = exprs;
        c.point_dependent = c.members.iter().any(Self::has_prop_leaf);
        c
    }

    fn has_prop_leaf(e: &Expr) -> bool {
        match e {
            Expr::Prop(_) => true,
            Expr::Cond(_) => false,
            Expr::Not(g) => Self::has_prop_leaf(g),
            Expr::And(l, r) | Expr::Or(l, r) => Self::has_prop_leaf(l) || Self::has_prop_leaf(r),
        }
    }

    fn prop_unit(&mut self, f: &Formula) -> usize {
        if let Some(i) = self.prop_units.iter().position(|g| g == f) {
            return i;
        }
        self.prop_units.push(f.clone());
        self.prop_units.len() - 1
    }

    fn compile(&mut self, f: &Formula) -> Expr {
        if f.is_propositional() {
            return Expr::Prop(self.prop_unit(f));
        }
        match f {
            Formula::Cond(a, b) => {
                let ua = self.prop_unit(a);
                let ub = self.prop_unit(b);
                if !self.antecedent_units.contains(&ua) {
                    self.antecedent_units.push(ua);
                }
                match self.conds.iter().position(|&c| c == (ua, ub)) {
                    Some(i) => Expr::Cond(i),
                    None => {
                        self.conds.push((ua, ub));
                        Expr::Cond(self.conds.len() - 1)
                    }
                }
            }
            Formula::Neg(g) => Expr::Not(Box::new(self.compile(g))),
            Formula::And(l, r) => Expr::And(Box::new(self.compile(l)), Box::new(self.compile(r))),
            Formula::Or(l, r) => Expr::Or(Box::new(self.compile(l)), Box::new(self.compile(r))),
            Formula::Implies(l, r) => Expr::Or(
                Box::new(Expr::Not(Box::new(self.compile(l)))),
                Box::new(self.compile(r)),
            ),
            _ => unreachable!("oracle input must be in the base language"),
        }
    }

    /// Bit `u` of the result: unit `u` holds under the valuation bits.
    fn unit_truth_table(&self, atoms: &AtomTable) -> Vec<u64> {
        assert!(self.prop_units.len() <= 64, "too many propositional units");
        let num_vals = 1usize << atoms.len();
        let mut table = vec![0u64; num_vals];
        for (v, entry) in table.iter_mut().enumerate() {
            for (u, f) in self.prop_units.iter().enumerate() {
                if eval_prop_bits(f, atoms, v as u32) {
                    *entry |= 1 << u;
                }
            }
        }
        table
    }
}

fn eval_prop_bits(f: &Formula, atoms: &AtomTable, bits: u32) -> bool {
    match f {
        Formula::Atom(p) => match atoms.get(p) {
            Some(i) => bits >> i & 1 == 1,
            None => false,
        },
        Formula::Neg(g) => !eval_prop_bits(g, atoms, bits),
        Formula::And(l, r) => eval_prop_bits(l, atoms, bits) && eval_prop_bits(r, atoms, bits),
        Formula::Or(l, r) => eval_prop_bits(l, atoms, bits) || eval_prop_bits(r, atoms, bits),
        Formula::Implies(l, r) => !eval_prop_bits(l, atoms, bits) || eval_prop_bits(r, atoms, bits),
        _ => unreachable!("propositional unit expected"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Unknown,
}

fn fold_expr(e: &Expr, cond_truth: &dyn Fn(usize) -> Tri) -> Tri {
    match e {
        Expr::Prop(_) => Tri::Unknown,
        Expr::Cond(i) => cond_truth(*i),
        Expr::Not(g) => match fold_expr(g, cond_truth) {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        },
        Expr::And(l, r) => match (fold_expr(l, cond_truth), fold_expr(r, cond_truth)) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        },
        Expr::Or(l, r) => match (fold_expr(l, cond_truth), fold_expr(r, cond_truth)) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        },
    }
}

fn eval_expr(e: &Expr, profile: u64, cond_val: &[bool]) -> bool {
    match e {
        Expr::Prop(u) => profile >> u & 1 == 1,
        Expr::Cond(i) => cond_val[*i],
        Expr::Not(g) => !eval_expr(g, profile, cond_val),
        Expr::And(l, r) => eval_expr(l, profile, cond_val) && eval_expr(r, profile, cond_val),
        Expr::Or(l, r) => eval_expr(l, profile, cond_val) || eval_expr(r, profile, cond_val),
    }
}

/// Bounded brute-force satisfiability. Returns the first satisfying model in
/// the oracle's deterministic scan order (smallest point count first), or
/// `NoModelWithinBound`. The answer is definitive UNSAT only for R when the
/// bound reaches [`r_small_model_bound`].
pub fn oracle_sat(gamma: &BTreeSet<Formula>, logic: Logic, bound: usize) -> OracleAnswer {
    assert!(bound >= 1, "oracle bound must be at least 1");
    let atoms = AtomTable::from_formulas(gamma.iter());
    assert!(atoms.len() <= 16, "oracle supports at most 16 atoms");
    let compiled = Compiled::new(gamma);
    let found = match logic {
        Logic::P | Logic::R => scan_pref(&compiled, &atoms, logic, bound),
        Logic::Cl | Logic::C => scan_state(&compiled, &atoms, logic, bound),
    };
    match found {
        Some((model, point)) => OracleAnswer::Sat { model, point },
        None => OracleAnswer::NoModelWithinBound {
            definitive: logic == Logic::R && bound >= r_small_model_bound(gamma),
        },
    }
}

fn pred_masks(n: usize, less: &BTreeSet<(usize, usize)>) -> Vec<u32> {
    let mut pred = vec![0u32; n];
    for &(u, v) in less {
        pred[v] |= 1 << u;
    }
    pred
}

/// Truth of conditional `(ua, ub)` on a point structure with unit `profiles`
/// and predecessor masks: all minimal `ua`-points satisfy `ub`.
fn cond_holds(profiles: &[u64], pred: &[u32], ua: usize, ub: usize) -> bool {
    let mut sat_a = 0u32;
    let mut sat_b = 0u32;
    for (i, &p) in profiles.iter().enumerate() {
        sat_a |= ((p >> ua & 1) as u32) << i;
        sat_b |= ((p >> ub & 1) as u32) << i;
    }
    let mut min = 0u32;
    let mut rest = sat_a;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if pred[i] & sat_a == 0 {
            min |= 1 << i;
        }
    }
    min & !sat_b == 0
}

fn smooth_for(profiles: &[u64], pred: &[u32], ua: usize) -> bool {
    let mut sat_a = 0u32;
    for (i, &p) in profiles.iter().enumerate() {
        sat_a |= ((p >> ua & 1) as u32) << i;
    }
    let mut min = 0u32;
    let mut rest = sat_a;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if pred[i] & sat_a == 0 {
            min |= 1 << i;
        }
    }
    let mut nonmin = sat_a & !min;
    while nonmin != 0 {
        let i = nonmin.trailing_zeros() as usize;
        nonmin &= nonmin - 1;
        if pred[i] & min == 0 {
            return false;
        }
    }
    true
}

fn members_hold(compiled: &Compiled, profiles: &[u64], cond_val: &[bool]) -> Option<usize> {
    if !compiled.point_dependent {
        let dummy = 0u64;
        if compiled.members.iter().all(|m| eval_expr(m, dummy, cond_val)) {
            return Some(0);
        }
        return None;
    }
    (0..profiles.len()).find(|&i| compiled.members.iter().all(|m| eval_expr(m, profiles[i], cond_val)))
}

fn scan_pref(compiled: &Compiled, atoms: &AtomTable, logic: Logic, bound: usize) -> Option<(ModelRepr, usize)> {
    let unit_truth = compiled.unit_truth_table(atoms);
    let num_vals = unit_truth.len();
    for n in 1..=bound {
        let orders = if logic == Logic::R { ranked_orders(n) } else { multilinear_orders(n) };
        for less in orders {
            let pred = pred_masks(n, &less);
            let mut vals = vec![0usize; n];
            loop {
                let profiles: Vec<u64> = vals.iter().map(|&v| unit_truth[v]).collect();
                let cond_val: Vec<bool> = compiled
                    .conds
                    .iter()
                    .map(|&(ua, ub)| cond_holds(&profiles, &pred, ua, ub))
                    .collect();
                if let Some(point) = members_hold(compiled, &profiles, &cond_val) {
                    let model = PrefModel {
                        atoms: atoms.names().to_vec(),
                        worlds: n,
                        less: less.clone(),
                        val: vals.iter().map(|&v| valuation_set(atoms.names(), v as u32)).collect(),
                    };
                    return Some((ModelRepr::Pref(model), point));
                }
                // odometer
                let mut k = 0;
                loop {
                    if k == n {
                        break;
                    }
                    vals[k] += 1;
                    if vals[k] < num_vals {
                        break;
                    }
                    vals[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
    }
    None
}

fn scan_state(compiled: &Compiled, atoms: &AtomTable, logic: Logic, bound: usize) -> Option<(ModelRepr, usize)> {
    let unit_truth = compiled.unit_truth_table(atoms);
    let num_vals = unit_truth.len();
    for s in 1..=bound {
        for pool in world_pools(num_vals, bound) {
            // Distinct label profiles: a label satisfies a unit when all of
            // its worlds do, so the profile is the AND over member worlds.
            // Labels with equal profiles are interchangeable for the query.
            let mut profiles_seen: Vec<u64> = Vec::new();
            let mut rep_label: Vec<u32> = Vec::new();
            for mask in 1u32..1 << pool.len() {
                let mut prof = !0u64;
                for (i, &v) in pool.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        prof &= unit_truth[v as usize];
                    }
                }
                if !profiles_seen.contains(&prof) {
                    profiles_seen.push(prof);
                    rep_label.push(mask);
                }
            }
            let d = profiles_seen.len();
            let orders = if logic == Logic::Cl { strict_partial_orders(s) } else { irreflexive_orders(s) };
            // Tuples of profile indices; members whose truth is already
            // forced (antecedent empty or included in the consequent makes a
            // conditional true under every order) prune whole tuples.
            let mut tuple = vec![0usize; s];
            let mut alive: Vec<(Vec<usize>, Vec<u64>)> = Vec::new();
            loop {
                let profiles: Vec<u64> = tuple.iter().map(|&i| profiles_seen[i]).collect();
                let forced = |ci: usize| -> Tri {
                    let (ua, ub) = compiled.conds[ci];
                    let mut sat_a = 0u32;
                    let mut sat_b = 0u32;
                    for (i, &p) in profiles.iter().enumerate() {
                        sat_a |= ((p >> ua & 1) as u32) << i;
                        sat_b |= ((p >> ub & 1) as u32) << i;
                    }
                    if sat_a & !sat_b == 0 {
                        Tri::True
                    } else {
                        Tri::Unknown
                    }
                };
                let dead = !compiled.point_dependent
                    && compiled.members.iter().any(|m| fold_expr(m, &forced) == Tri::False);
                if !dead {
                    alive.push((tuple.clone(), profiles));
                }
                let mut k = 0;
                loop {
                    if k == s {
                        break;
                    }
                    tuple[k] += 1;
                    if tuple[k] < d {
                        break;
                    }
                    tuple[k] = 0;
                    k += 1;
                }
                if k == s {
                    break;
                }
            }
            for less in orders {
                let pred = pred_masks(s, &less);
                for (tuple, profiles) in &alive {
                    if logic == Logic::C
                        && !compiled.antecedent_units.iter().all(|&ua| smooth_for(profiles, &pred, ua))
                    {
                        continue;
                    }
                    let cond_val: Vec<bool> = compiled
                        .conds
                        .iter()
                        .map(|&(ua, ub)| cond_holds(profiles, &pred, ua, ub))
                        .collect();
                    if let Some(point) = members_hold(compiled, profiles, &cond_val) {
                        let label: Vec<BTreeSet<usize>> = tuple
                            .iter()
                            .map(|&ti| {
                                let mask = rep_label[ti];
                                (0..pool.len()).filter(|i| mask >> i & 1 == 1).collect()
                            })
                            .collect();
                        let model = StateModel {
                            atoms: atoms.names().to_vec(),
                            states: s,
                            worlds: pool.len(),
                            label,
                            less: less.clone(),
                            val: pool.iter().map(|&v| valuation_set(atoms.names(), v)).collect(),
                        };
                        return Some((ModelRepr::State(model), point));
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn gamma(items: &[&str]) -> BTreeSet<Formula> {
        items.iter().map(|s| p(s)).collect()
    }

    fn single_world(atoms: &[&str], true_atoms: &[&str]) -> PrefModel {
        PrefModel {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            worlds: 1,
            less: BTreeSet::new(),
            val: vec![true_atoms.iter().map(|s| s.to_string()).collect()],
        }
    }

    #[test]
    fn eval_single_world() {
        let m = single_world(&["a", "b"], &["a"]);
        // The only world is the minimal a-world and b fails there.
        assert!(!m.eval_at(0, &p("a |~ b")));
        // No b-worlds at all: vacuous.
        assert!(m.eval_at(0, &p("b |~ c")));
        // Unknown atoms evaluate false.
        assert!(!m.eval_at(0, &p("zzz")));
    }

    #[test]
    fn eval_two_world_chain() {
        // w1 < w0, val(w0) = {a, m}, val(w1) = {a, w}: Min(a) = {w1}.
        let m = PrefModel {
            atoms: ["a", "m", "w"].iter().map(|s| s.to_string()).collect(),
            worlds: 2,
            less: [(1usize, 0usize)].into_iter().collect(),
            val: vec![
                ["a", "m"].iter().map(|s| s.to_string()).collect(),
                ["a", "w"].iter().map(|s| s.to_string()).collect(),
            ],
        };
        assert_eq!(m.min_worlds(&p("a")), [1usize].into_iter().collect());
        assert!(m.eval_at(0, &p("a |~ w")));
        // Min(a) = {w1} and m is false there, so a |~ ~m holds (the order is
        // modular, so the RM premises cannot all hold here).
        assert!(m.eval_at(0, &p("a |~ ~m")));
        assert!(!m.eval_at(0, &p("a & m |~ w")));
        // Conditional truth is point-independent.
        for f in ["a |~ w", "a |~ ~m", "a & m |~ w"] {
            assert_eq!(m.eval_at(0, &p(f)), m.eval_at(1, &p(f)));
        }
    }

    #[test]
    fn min_worlds_cases() {
        let empty = PrefModel {
            atoms: vec!["a".to_string()],
            worlds: 1,
            less: BTreeSet::new(),
            val: vec![BTreeSet::new()],
        };
        assert!(empty.min_worlds(&p("a")).is_empty());

        let antichain = PrefModel {
            atoms: vec!["a".to_string()],
            worlds: 2,
            less: BTreeSet::new(),
            val: vec![
                ["a".to_string()].into_iter().collect(),
                ["a".to_string()].into_iter().collect(),
            ],
        };
        assert_eq!(antichain.min_worlds(&p("a")).len(), 2);

        let chain = PrefModel {
            less: [(1usize, 0usize)].into_iter().collect(),
            ..antichain
        };
        assert_eq!(chain.min_worlds(&p("a")), [1usize].into_iter().collect());
    }

    #[test]
    fn validation() {
        let mut m = single_world(&["a"], &["a"]);
        m.worlds = 3;
        m.val = vec![BTreeSet::new(); 3];
        m.less = [(0usize, 1usize), (1, 2), (0, 2)].into_iter().collect();
        assert!(validate_model(&ModelRepr::Pref(m.clone()), Logic::R, &BTreeSet::new()).is_empty());

        // A 2-cycle is irreflexive but not transitive.
        let cyc = PrefModel {
            atoms: vec![],
            worlds: 2,
            less: [(0usize, 1usize), (1, 0)].into_iter().collect(),
            val: vec![BTreeSet::new(), BTreeSet::new()],
        };
        let violations = validate_model(&ModelRepr::Pref(cyc), Logic::P, &BTreeSet::new());
        assert!(violations.iter().any(|v| v.message.contains("transitive")));

        // Non-modular: two incomparable worlds beside a chain.
        let nm = PrefModel {
            atoms: vec![],
            worlds: 3,
            less: [(0usize, 1usize)].into_iter().collect(),
            val: vec![BTreeSet::new(); 3],
        };
        assert!(validate_model(&ModelRepr::Pref(nm.clone()), Logic::P, &BTreeSet::new()).is_empty());
        assert!(!validate_model(&ModelRepr::Pref(nm), Logic::R, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn c_smoothness_violation_detected() {
        // Cycle of two states both satisfying a: no minimal a-state exists.
        let m = StateModel {
            atoms: vec!["a".to_string()],
            states: 2,
            worlds: 1,
            label: vec![[0usize].into_iter().collect(), [0usize].into_iter().collect()],
            less: [(0usize, 1usize), (1, 0)].into_iter().collect(),
            val: vec![["a".to_string()].into_iter().collect()],
        };
        let mut ants = BTreeSet::new();
        ants.insert(p("a"));
        let violations = validate_model(&ModelRepr::State(m), Logic::C, &ants);
        assert!(violations.iter().any(|v| v.message.contains("smoothness")));
    }

    #[test]
    fn enumeration_counts() {
        let atoms = vec!["p".to_string()];
        let count = |logic, bound| enumerate_models(&atoms, bound, logic, EnumOptions::default()).count();
        // One world, p true or false.
        assert_eq!(count(Logic::R, 1), 2);
        assert_eq!(enumerate_models(&[], 1, Logic::P, EnumOptions::default()).count(), 1);
        // Frozen regression: 2 one-world models + 3 ranked orders on two
        // labelled worlds x 4 valuations.
        assert_eq!(count(Logic::R, 2), 14);
        assert_eq!(count(Logic::P, 2), 14);
        // Orders on labelled points.
        assert_eq!(multilinear_orders(3).len(), 13);
        assert_eq!(ranked_orders(3).len(), 13);
        assert_eq!(strict_partial_orders(3).len(), 19);
        assert_eq!(irreflexive_orders(3).len(), 64);
    }

    #[test]
    fn multilinear_tags() {
        for m in enumerate_models(&["p".to_string()], 3, Logic::P, EnumOptions::default()) {
            if let ModelRepr::Pref(pm) = m {
                MultiLinearTag::of(&pm).unwrap();
            }
        }
    }

    #[test]
    fn oracle_rm_fails_in_p_but_not_r() {
        let g = gamma(&["a |~ w", "~(a |~ ~m)", "~(a & m |~ w)"]);
        match oracle_sat(&g, Logic::P, 4) {
            OracleAnswer::Sat { model, point } => {
                for f in &g {
                    assert!(eval_formula_at(&model, point, f, Logic::P));
                }
                if let ModelRepr::Pref(pm) = &model {
                    MultiLinearTag::of(pm).unwrap();
                    assert!(validate_model(&model, Logic::P, &BTreeSet::new()).is_empty());
                } else {
                    panic!("expected a preferential model");
                }
            }
            _ => panic!("RM failure must be satisfiable in P"),
        }
        let bound = r_small_model_bound(&g);
        assert!(bound <= 4, "bound {bound}");
        assert_eq!(
            oracle_sat(&g, Logic::R, bound),
            OracleAnswer::NoModelWithinBound { definitive: true }
        );
    }

    #[test]
    fn oracle_cut_cycle_sat_in_c_only() {
        let g = gamma(&["~(C |~ B)", "C |~ A", "A |~ B", "B |~ C"]);
        match oracle_sat(&g, Logic::C, 4) {
            OracleAnswer::Sat { model, point } => {
                let ants: BTreeSet<Formula> = ["A", "B", "C"].iter().map(|s| p(s)).collect();
                assert!(validate_model(&model, Logic::C, &ants).is_empty());
                for f in &g {
                    assert!(eval_formula_at(&model, point, f, Logic::C));
                }
            }
            _ => panic!("cycle set must be satisfiable in C"),
        }
        assert!(!oracle_sat(&g, Logic::Cl, 3).is_sat());
    }

    #[test]
    fn oracle_matches_enumeration_on_small_inputs() {
        let sets = [
            gamma(&["a |~ b"]),
            gamma(&["~(a |~ a)"]),
            gamma(&["a |~ b", "~(a |~ b)"]),
            gamma(&["a", "~(b |~ a)"]),
            gamma(&["a |~ b", "b |~ a", "~(a |~ ~b)"]),
        ];
        for g in &sets {
            let atoms = AtomTable::from_formulas(g.iter());
            for logic in Logic::ALL {
                let fast = oracle_sat(g, logic, 2).is_sat();
                let slow = enumerate_models(atoms.names(), 2, logic, EnumOptions::default()).any(|m| {
                    let ants: BTreeSet<Formula> = g
                        .iter()
                        .flat_map(|f| {
                            let (pos, neg) = cond_occurrences([f.clone()]);
                            pos.into_iter().chain(neg).map(|c| match c {
                                Formula::Cond(a, _) => (*a).clone(),
                                _ => unreachable!(),
                            })
                        })
                        .collect();
                    if !validate_model(&m, logic, &ants).is_empty() {
                        return false;
                    }
                    (0..m.points()).any(|pt| g.iter().all(|f| eval_formula_at(&m, pt, f, logic)))
                });
                assert_eq!(fast, slow, "oracle vs enumeration for {logic} on {g:?}");
            }
        }
    }

    #[test]
    fn p_multilinear_matches_full_partial_orders() {
        let sets = [
            gamma(&["a |~ b", "~(a |~ b)"]),
            gamma(&["a |~ b", "~(b |~ a)"]),
            gamma(&["~(a |~ a)"]),
            gamma(&["a |~ ~a", "~(a |~ b)"]),
        ];
        for g in &sets {
            let atoms = AtomTable::from_formulas(g.iter());
            let sat_via = |opts: EnumOptions| {
                enumerate_models(atoms.names(), 3, Logic::P, opts)
                    .any(|m| (0..m.points()).any(|pt| g.iter().all(|f| eval_formula_at(&m, pt, f, Logic::P))))
            };
            assert_eq!(
                sat_via(EnumOptions { p_multilinear: true }),
                sat_via(EnumOptions { p_multilinear: false }),
                "multi-linear enumeration changes P verdict on {g:?}"
            );
        }
    }
}
