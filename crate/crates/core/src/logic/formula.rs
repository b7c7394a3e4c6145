//! First-order formulas with equality over the two-sorted (Thing, World) signature.
//!
//! Terms are variables or universe-element constants; there are no function
//! symbols. Formulas are immutable trees built with the constructor helpers on
//! [`Formula`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// The two sorts of the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sort {
    Thing,
    World,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Thing => f.write_str("Thing"),
            Sort::World => f.write_str("World"),
        }
    }
}

/// A universe element: a sort plus a position in that sort's universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub sort: Sort,
    pub index: usize,
}

impl Element {
    pub fn thing(index: usize) -> Self {
        Element {
            sort: Sort::Thing,
            index,
        }
    }

    pub fn world(index: usize) -> Self {
        Element {
            sort: Sort::World,
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Element),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(e) => match e.sort {
                Sort::Thing => write!(f, "#t{}", e.index),
                Sort::World => write!(f, "#w{}", e.index),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Pred(String, Vec<Term>),
    Equal(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Sort, Box<Formula>),
    Exists(String, Sort, Box<Formula>),
}

impl Formula {
    pub fn pred<I, T>(name: &str, args: I) -> Formula
    where
        I: IntoIterator<Item = T>,
        T: Into<Term>,
    {
        Formula::Pred(name.to_string(), args.into_iter().map(Into::into).collect())
    }

    pub fn eq(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Formula {
        Formula::Equal(lhs.into(), rhs.into())
    }

    pub fn neq(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Formula {
        Formula::not(Formula::eq(lhs, rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: &str, sort: Sort, body: Formula) -> Formula {
        Formula::ForAll(var.to_string(), sort, Box::new(body))
    }

    pub fn exists(var: &str, sort: Sort, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), sort, Box::new(body))
    }

    /// Right-nested conjunction; `True` for an empty list.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::True;
        };
        while let Some(next) = parts.pop() {
            acc = Formula::and(next, acc);
        }
        acc
    }

    /// Curried implication `h1 → h2 → … → conclusion`.
    pub fn implies_chain(hyps: impl IntoIterator<Item = Formula>, conclusion: Formula) -> Formula {
        let hyps: Vec<Formula> = hyps.into_iter().collect();
        hyps.into_iter()
            .rev()
            .fold(conclusion, |acc, h| Formula::implies(h, acc))
    }

    /// `∀ v₁ … vₙ, body` with the first variable outermost.
    pub fn forall_many(vars: &[(&str, Sort)], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, (v, s)| Formula::forall(v, *s, acc))
    }

    pub fn exists_many(vars: &[(&str, Sort)], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, (v, s)| Formula::exists(v, *s, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => args.iter().for_each(|t| term(t, bound)),
            Formula::Equal(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(v, _, body) | Formula::Exists(v, _, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name appearing anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Pred(_, args) => {
                out.extend(args.iter().filter_map(|t| t.as_var().map(str::to_string)))
            }
            Formula::Equal(a, b) => {
                out.extend([a, b].iter().filter_map(|t| t.as_var().map(str::to_string)))
            }
            Formula::ForAll(v, _, _) | Formula::Exists(v, _, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Names of every predicate applied in the formula.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Pred(name, _) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) => a.visit(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::ForAll(_, _, body) | Formula::Exists(_, _, body) => body.visit(f),
            _ => {}
        }
    }

    /// True when a quantifier ranges over `World` or a constant of sort `World` occurs.
    pub fn mentions_world(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| match f {
            Formula::ForAll(_, Sort::World, _) | Formula::Exists(_, Sort::World, _) => found = true,
            Formula::Pred(_, args)
                if args
                    .iter()
                    .any(|t| matches!(t, Term::Const(e) if e.sort == Sort::World)) =>
            {
                found = true
            }
            _ => {}
        });
        found
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        let sub_term = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Pred(name, args) => {
                Formula::Pred(name.clone(), args.iter().map(sub_term).collect())
            }
            Formula::Equal(a, b) => Formula::Equal(sub_term(a), sub_term(b)),
            Formula::Not(a) => Formula::not(a.substitute(map)),
            Formula::And(a, b) => Formula::and(a.substitute(map), b.substitute(map)),
            Formula::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(map), b.substitute(map)),
            Formula::ForAll(v, s, body) | Formula::Exists(v, s, body) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body_free = body.free_vars();
                inner.retain(|k, _| body_free.contains(k));
                let captures = inner
                    .values()
                    .any(|t| t.as_var().is_some_and(|name| name == v));
                let (v, body) = if captures {
                    let mut avoid = body.all_vars();
                    avoid.extend(
                        inner
                            .values()
                            .filter_map(|t| t.as_var().map(str::to_string)),
                    );
                    let fresh = fresh_name(v, &avoid);
                    let renamed =
                        body.substitute(&BTreeMap::from([(v.clone(), Term::var(&fresh))]));
                    (fresh, renamed)
                } else {
                    (v.clone(), (**body).clone())
                };
                let body = Box::new(body.substitute(&inner));
                match self {
                    Formula::ForAll(..) => Formula::ForAll(v, *s, body),
                    _ => Formula::Exists(v, *s, body),
                }
            }
        }
    }

    /// Renames binders that shadow an enclosing binder of the same name, so that
    /// each variable is bound at most once on every root-to-leaf path.
    pub fn rename_apart(&self) -> Formula {
        self.rename_apart_in(&mut Vec::new())
    }

    fn rename_apart_in(&self, scope: &mut Vec<String>) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Pred(..) | Formula::Equal(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.rename_apart_in(scope)),
            Formula::And(a, b) => Formula::and(a.rename_apart_in(scope), b.rename_apart_in(scope)),
            Formula::Or(a, b) => Formula::or(a.rename_apart_in(scope), b.rename_apart_in(scope)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_apart_in(scope), b.rename_apart_in(scope))
            }
            Formula::Iff(a, b) => Formula::iff(a.rename_apart_in(scope), b.rename_apart_in(scope)),
            Formula::ForAll(v, s, body) | Formula::Exists(v, s, body) => {
                let (v, body) = if scope.contains(v) {
                    let mut avoid: BTreeSet<String> = scope.iter().cloned().collect();
                    avoid.extend(body.all_vars());
                    let fresh = fresh_name(v, &avoid);
                    let renamed =
                        body.substitute(&BTreeMap::from([(v.clone(), Term::var(&fresh))]));
                    (fresh, renamed)
                } else {
                    (v.clone(), (**body).clone())
                };
                scope.push(v.clone());
                let body = Box::new(body.rename_apart_in(scope));
                scope.pop();
                match self {
                    Formula::ForAll(..) => Formula::ForAll(v, *s, body),
                    _ => Formula::Exists(v, *s, body),
                }
            }
        }
    }

    /// Splits off the outermost block of universal quantifiers.
    pub fn universal_prefix(&self) -> (Vec<(String, Sort)>, &Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Formula::ForAll(v, s, body) = cur {
            vars.push((v.clone(), *s));
            cur = body;
        }
        (vars, cur)
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { base } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded name supply")
}

impl From<&str> for Term {
    fn from(v: &str) -> Self {
        Term::var(v)
    }
}

impl From<String> for Term {
    fn from(v: String) -> Self {
        Term::Var(v)
    }
}

impl From<Element> for Term {
    fn from(e: Element) -> Self {
        Term::Const(e)
    }
}

impl From<&Term> for Term {
    fn from(t: &Term) -> Self {
        t.clone()
    }
}

// Binding strength, loosest first: quantifiers, ↔, →, ∨, ∧, ¬.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::ForAll(..) | Formula::Exists(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, min: u8) -> fmt::Result {
    if precedence(child) < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("⊤"),
            Formula::False => f.write_str("⊥"),
            Formula::Pred(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Equal(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(inner) => match &**inner {
                Formula::Equal(a, b) => write!(f, "{a} ≠ {b}"),
                other => {
                    f.write_str("¬")?;
                    write_child(f, other, 5)
                }
            },
            Formula::And(a, b) => {
                write_child(f, a, 4)?;
                f.write_str(" ∧ ")?;
                write_child(f, b, 4)
            }
            Formula::Or(a, b) => {
                write_child(f, a, 3)?;
                f.write_str(" ∨ ")?;
                write_child(f, b, 3)
            }
            Formula::Implies(a, b) => {
                write_child(f, a, 3)?;
                f.write_str(" → ")?;
                write_child(f, b, 2)
            }
            Formula::Iff(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(" ↔ ")?;
                write_child(f, b, 2)
            }
            Formula::ForAll(..) | Formula::Exists(..) => {
                let is_forall = matches!(self, Formula::ForAll(..));
                let mut vars = Vec::new();
                let mut cur = self;
                loop {
                    match cur {
                        Formula::ForAll(v, s, body) if is_forall => {
                            vars.push((v, *s));
                            cur = body;
                        }
                        Formula::Exists(v, s, body) if !is_forall => {
                            vars.push((v, *s));
                            cur = body;
                        }
                        _ => break,
                    }
                }
                f.write_str(if is_forall { "∀" } else { "∃" })?;
                let mut i = 0;
                while i < vars.len() {
                    let sort = vars[i].1;
                    let mut j = i;
                    while j < vars.len() && vars[j].1 == sort {
                        write!(f, " {}", vars[j].0)?;
                        j += 1;
                    }
                    if sort == Sort::World || j < vars.len() || i > 0 {
                        write!(f, " : {sort}")?;
                    }
                    i = j;
                }
                write!(f, ", {cur}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_avoids_capture() {
        // ∃a, p(x, a)  with x := a
        let f = Formula::exists("a", Sort::Thing, Formula::pred("p", ["x", "a"]));
        let g = f.substitute(&BTreeMap::from([("x".to_string(), Term::var("a"))]));
        let Formula::Exists(bound, _, body) = &g else {
            panic!()
        };
        assert_ne!(bound, "a");
        assert_eq!(**body, Formula::pred("p", ["a", bound.as_str()]));
        assert_eq!(g.free_vars(), BTreeSet::from(["a".to_string()]));
    }

    #[test]
    fn substitution_leaves_bound_occurrences() {
        let f = Formula::forall("x", Sort::Thing, Formula::pred("p", ["x"]));
        let g = f.substitute(&BTreeMap::from([("x".to_string(), Term::var("y"))]));
        assert_eq!(f, g);
    }

    #[test]
    fn rename_apart_removes_shadowing() {
        let f = Formula::forall(
            "a",
            Sort::Thing,
            Formula::and(
                Formula::pred("p", ["a"]),
                Formula::exists("a", Sort::Thing, Formula::pred("q", ["a"])),
            ),
        );
        let g = f.rename_apart();
        assert_eq!(g.to_string(), "∀ a, p(a) ∧ (∃ a1, q(a1))");
    }

    #[test]
    fn display_groups_quantifiers() {
        let f = Formula::forall_many(
            &[("s1", Sort::Thing), ("s2", Sort::Thing)],
            Formula::implies_chain([Formula::pred("p", ["s1"])], Formula::eq("s1", "s2")),
        );
        assert_eq!(f.to_string(), "∀ s1 s2, p(s1) → s1 = s2");
        let g = Formula::forall("w", Sort::World, Formula::pred("e", ["x", "w"]));
        assert_eq!(g.to_string(), "∀ w : World, e(x, w)");
    }

    #[test]
    fn universal_prefix_stops_at_first_non_forall() {
        let f = Formula::forall_many(
            &[("a", Sort::Thing), ("b", Sort::Thing)],
            Formula::exists("c", Sort::Thing, Formula::True),
        );
        let (vars, matrix) = f.universal_prefix();
        assert_eq!(vars.len(), 2);
        assert!(matches!(matrix, Formula::Exists(..)));
    }
}
