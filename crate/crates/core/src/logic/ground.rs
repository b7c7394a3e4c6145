//! Grounding of closed formulas over a fixed pair of universe sizes into
//! propositional clauses over predicate-table bits.
//!
//! Quantifiers are expanded, equalities between constants are decided on the
//! spot, and the result is put in clause form. Subformulas that do not flatten
//! into a single clause are named by auxiliary variables with one-directional
//! definitions (`aux → subformula`), so the clause set is satisfiable under a
//! given table valuation exactly when the source formula is true there.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::eval::EvalError;
use super::formula::{Element, Formula, Sort, Term};
use super::model::{all_tuples, FiniteModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error("formula is not closed: variable {0} is free")]
    Unbound(String),
    #[error("formula mentions sort World but the skeleton has no worlds")]
    EmptyWorldUniverse,
    #[error("the thing universe must be non-empty")]
    EmptyThings,
    #[error("constant {0:?} is outside the skeleton")]
    ConstantOutOfRange(Element),
}

/// Universe sizes with no tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skeleton {
    pub things: usize,
    pub worlds: usize,
}

impl Skeleton {
    pub fn new(things: usize, worlds: usize) -> Self {
        Skeleton { things, worlds }
    }

    pub fn of(model: &FiniteModel) -> Self {
        Skeleton {
            things: model.size(Sort::Thing),
            worlds: model.size(Sort::World),
        }
    }

    pub fn size(&self, sort: Sort) -> usize {
        match sort {
            Sort::Thing => self.things,
            Sort::World => self.worlds,
        }
    }
}

/// A propositional literal: variable index plus polarity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        Lit(((var as u32) << 1) | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "¬x{}", self.var())
        }
    }
}

pub type Clause = Vec<Lit>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<Element>,
}

impl GroundAtom {
    pub fn indices(&self) -> Vec<usize> {
        self.args.iter().map(|e| e.index).collect()
    }
}

/// An auxiliary variable and the clauses `¬aux ∨ C` that define it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxDef {
    pub var: usize,
    pub clauses: std::ops::Range<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundConstraintSet {
    /// Indexed by variable; `None` marks an auxiliary variable.
    vars: Vec<Option<GroundAtom>>,
    clauses: Vec<Clause>,
    aux: Vec<AuxDef>,
}

impl GroundConstraintSet {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn atom(&self, var: usize) -> Option<&GroundAtom> {
        self.vars.get(var).and_then(Option::as_ref)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (usize, &GroundAtom)> {
        self.vars
            .iter()
            .enumerate()
            .filter_map(|(v, a)| a.as_ref().map(|a| (v, a)))
    }

    pub fn aux_defs(&self) -> &[AuxDef] {
        &self.aux
    }

    /// Clauses that are not auxiliary definitions.
    pub fn top_level_clauses(&self) -> impl Iterator<Item = &Clause> {
        let defs: BTreeSet<usize> = self.aux.iter().flat_map(|d| d.clauses.clone()).collect();
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(i, _)| !defs.contains(i))
            .map(|(_, c)| c)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    /// Truth of the clause set when every atom takes the value `atom_value`
    /// gives it; auxiliary variables take the value of the subformula they name.
    pub fn satisfied_by(&self, atom_value: impl Fn(&GroundAtom) -> bool) -> bool {
        let mut values: Vec<bool> = self
            .vars
            .iter()
            .map(|a| a.as_ref().is_some_and(&atom_value))
            .collect();
        let lit_true = |values: &[bool], l: Lit| values[l.var()] == l.is_positive();
        for def in &self.aux {
            let v = self.clauses[def.clauses.clone()].iter().all(|c| {
                c.iter()
                    .any(|&l| l.var() != def.var && lit_true(&values, l))
            });
            values[def.var] = v;
        }
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| lit_true(&values, l)))
    }
}

enum GExpr {
    Const(bool),
    Lit(Lit),
    And(Vec<GExpr>),
    Or(Vec<GExpr>),
}

fn mk_and(parts: Vec<GExpr>) -> GExpr {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match p {
            GExpr::Const(true) => {}
            GExpr::Const(false) => return GExpr::Const(false),
            GExpr::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => GExpr::Const(true),
        1 => out.pop().unwrap(),
        _ => GExpr::And(out),
    }
}

fn mk_or(parts: Vec<GExpr>) -> GExpr {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match p {
            GExpr::Const(false) => {}
            GExpr::Const(true) => return GExpr::Const(true),
            GExpr::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => GExpr::Const(false),
        1 => out.pop().unwrap(),
        _ => GExpr::Or(out),
    }
}

/// Sorts and dedups a clause; `None` if it is a tautology.
fn normalize(mut c: Clause) -> Option<Clause> {
    c.sort_unstable();
    c.dedup();
    if c.windows(2).any(|w| w[0].var() == w[1].var()) {
        None
    } else {
        Some(c)
    }
}

/// Incrementally grounds formulas on one skeleton.
pub struct Grounder {
    skeleton: Skeleton,
    set: GroundConstraintSet,
    index: HashMap<(String, Vec<Element>), usize>,
    /// When set, only these predicates get variables; all others are false.
    support: Option<BTreeSet<String>>,
}

impl Grounder {
    /// A grounder that allocates a variable for every atom it meets.
    pub fn new(skeleton: Skeleton) -> Self {
        Grounder {
            skeleton,
            set: GroundConstraintSet::default(),
            index: HashMap::new(),
            support: None,
        }
    }

    /// A grounder whose variables `0..n` are exactly the atoms of the given
    /// predicates, in the given predicate order and lexicographic tuple order.
    /// Atoms of any other predicate are fixed false.
    pub fn with_support(skeleton: Skeleton, support: &[(String, Vec<Sort>)]) -> Self {
        let mut g = Grounder::new(skeleton);
        for (pred, sorts) in support {
            let sizes: Vec<usize> = sorts.iter().map(|&s| skeleton.size(s)).collect();
            for t in all_tuples(&sizes) {
                let args = t
                    .iter()
                    .zip(sorts)
                    .map(|(&index, &sort)| Element { sort, index })
                    .collect();
                g.atom_var(pred, args);
            }
        }
        g.support = Some(support.iter().map(|(p, _)| p.clone()).collect());
        g
    }

    pub fn skeleton(&self) -> Skeleton {
        self.skeleton
    }

    fn atom_var(&mut self, pred: &str, args: Vec<Element>) -> usize {
        let key = (pred.to_string(), args);
        if let Some(&v) = self.index.get(&key) {
            return v;
        }
        let v = self.set.vars.len();
        self.set.vars.push(Some(GroundAtom {
            pred: key.0.clone(),
            args: key.1.clone(),
        }));
        self.index.insert(key, v);
        v
    }

    /// Asserts `formula` (closed) as part of the constraint set.
    pub fn assert(&mut self, formula: &Formula) -> Result<(), GroundError> {
        self.assert_polarity(formula, true)
    }

    /// Asserts the negation of `formula`.
    pub fn assert_negated(&mut self, formula: &Formula) -> Result<(), GroundError> {
        self.assert_polarity(formula, false)
    }

    fn assert_polarity(&mut self, formula: &Formula, positive: bool) -> Result<(), GroundError> {
        if self.skeleton.things == 0 {
            return Err(GroundError::EmptyThings);
        }
        if self.skeleton.worlds == 0 && formula.mentions_world() {
            return Err(GroundError::EmptyWorldUniverse);
        }
        let expr = self.ground(formula, positive, &mut Vec::new())?;
        let clauses = self.cnf(expr);
        for c in clauses {
            if let Some(c) = normalize(c) {
                self.set.clauses.push(c);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> GroundConstraintSet {
        self.set
    }

    fn term(&self, t: &Term, env: &[(String, Element)]) -> Result<Element, GroundError> {
        let e = match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| GroundError::Unbound(v.clone()))?,
            Term::Const(e) => *e,
        };
        if e.index >= self.skeleton.size(e.sort) {
            return Err(GroundError::ConstantOutOfRange(e));
        }
        Ok(e)
    }

    /// Grounds `f` in negation normal form; `positive == false` grounds `¬f`.
    fn ground(
        &mut self,
        f: &Formula,
        positive: bool,
        env: &mut Vec<(String, Element)>,
    ) -> Result<GExpr, GroundError> {
        Ok(match f {
            Formula::True => GExpr::Const(positive),
            Formula::False => GExpr::Const(!positive),
            Formula::Pred(name, args) => {
                let args = args
                    .iter()
                    .map(|t| self.term(t, env))
                    .collect::<Result<Vec<_>, _>>()?;
                let frozen = self.support.as_ref().is_some_and(|s| !s.contains(name));
                if frozen {
                    GExpr::Const(!positive)
                } else {
                    GExpr::Lit(Lit::new(self.atom_var(name, args), positive))
                }
            }
            Formula::Equal(a, b) => {
                let same = self.term(a, env)? == self.term(b, env)?;
                GExpr::Const(same == positive)
            }
            Formula::Not(a) => self.ground(a, !positive, env)?,
            Formula::And(a, b) | Formula::Or(a, b) => {
                let l = self.ground(a, positive, env)?;
                let r = self.ground(b, positive, env)?;
                if matches!(f, Formula::And(..)) == positive {
                    mk_and(vec![l, r])
                } else {
                    mk_or(vec![l, r])
                }
            }
            Formula::Implies(a, b) => {
                let l = self.ground(a, !positive, env)?;
                let r = self.ground(b, positive, env)?;
                if positive {
                    mk_or(vec![l, r])
                } else {
                    mk_and(vec![l, r])
                }
            }
            Formula::Iff(a, b) => {
                // a ↔ b  ≡ (¬a ∨ b) ∧ (a ∨ ¬b);  ¬(a ↔ b) ≡ (a ∨ b) ∧ (¬a ∨ ¬b)
                let na = self.ground(a, false, env)?;
                let pa = self.ground(a, true, env)?;
                let b1 = self.ground(b, positive, env)?;
                let b2 = self.ground(b, !positive, env)?;
                mk_and(vec![mk_or(vec![na, b1]), mk_or(vec![pa, b2])])
            }
            Formula::ForAll(v, s, body) | Formula::Exists(v, s, body) => {
                let conj = matches!(f, Formula::ForAll(..)) == positive;
                let mut parts = Vec::new();
                for index in 0..self.skeleton.size(*s) {
                    env.push((v.clone(), Element { sort: *s, index }));
                    let part = self.ground(body, positive, env);
                    env.pop();
                    let part = part?;
                    match (&part, conj) {
                        (GExpr::Const(false), true) => return Ok(GExpr::Const(false)),
                        (GExpr::Const(true), false) => return Ok(GExpr::Const(true)),
                        _ => parts.push(part),
                    }
                }
                if conj {
                    mk_and(parts)
                } else {
                    mk_or(parts)
                }
            }
        })
    }

    fn new_aux(&mut self, defining: Vec<Clause>) -> Lit {
        let var = self.set.vars.len();
        self.set.vars.push(None);
        let start = self.set.clauses.len();
        let neg = Lit::new(var, false);
        for mut c in defining {
            c.push(neg);
            if let Some(c) = normalize(c) {
                self.set.clauses.push(c);
            }
        }
        let end = self.set.clauses.len();
        self.set.aux.push(AuxDef {
            var,
            clauses: start..end,
        });
        Lit::new(var, true)
    }

    fn cnf(&mut self, e: GExpr) -> Vec<Clause> {
        match e {
            GExpr::Const(true) => vec![],
            GExpr::Const(false) => vec![vec![]],
            GExpr::Lit(l) => vec![vec![l]],
            GExpr::And(parts) => parts.into_iter().flat_map(|p| self.cnf(p)).collect(),
            GExpr::Or(parts) => {
                let mut base = Vec::new();
                for p in parts {
                    match p {
                        GExpr::Lit(l) => base.push(l),
                        other => {
                            let mut sub = self.cnf(other);
                            match sub.len() {
                                0 => return vec![],
                                1 => base.append(&mut sub[0]),
                                _ => base.push(self.new_aux(sub)),
                            }
                        }
                    }
                }
                vec![base]
            }
        }
    }
}

/// Grounds a closed formula on the given universe sizes.
pub fn ground(formula: &Formula, skeleton: Skeleton) -> Result<GroundConstraintSet, GroundError> {
    let mut g = Grounder::new(skeleton);
    g.assert(formula)?;
    Ok(g.finish())
}

/// Truth of a closed formula in `model`, computed by grounding on the model's
/// universes and substituting its tables into the atoms. Agrees with
/// [`super::eval::evaluate`].
pub fn evaluate_via_grounding(formula: &Formula, model: &FiniteModel) -> Result<bool, EvalError> {
    if model.worlds().is_empty() && formula.mentions_world() {
        return Err(EvalError::EmptyWorldUniverse(model.name.clone()));
    }
    let set = ground(formula, Skeleton::of(model)).map_err(|e| match e {
        GroundError::Unbound(v) => EvalError::Unbound(v),
        GroundError::ConstantOutOfRange(c) => EvalError::ConstantOutOfRange(c),
        GroundError::EmptyWorldUniverse => EvalError::EmptyWorldUniverse(model.name.clone()),
        GroundError::EmptyThings => unreachable!("models have a non-empty thing universe"),
    })?;
    Ok(set.satisfied_by(|a| model.holds(&a.pred, &a.indices())))
}
