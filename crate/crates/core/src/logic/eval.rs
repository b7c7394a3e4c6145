use thiserror::Error;

use super::formula::{Element, Formula, Sort, Term};
use super::model::FiniteModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable {0} is not assigned")]
    Unbound(String),
    #[error("formula mentions sort World but model {0} has no world universe")]
    EmptyWorldUniverse(String),
    #[error("constant {0:?} is outside the model's universe")]
    ConstantOutOfRange(Element),
    #[error("variable {var} is assigned an element of sort {found} where {expected} is required")]
    AssignmentSort {
        var: String,
        expected: Sort,
        found: Sort,
    },
}

/// A partial map from variables to universe elements. Later bindings shadow
/// earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: Vec<(String, Element)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, e: Element) -> Self {
        self.bind(var, e);
        self
    }

    pub fn bind(&mut self, var: &str, e: Element) {
        self.bindings.push((var.to_string(), e));
    }

    fn unbind(&mut self) {
        self.bindings.pop();
    }

    pub fn get(&self, var: &str) -> Option<Element> {
        self.bindings
            .iter()
            .rev()
            .find(|(v, _)| v == var)
            .map(|(_, e)| *e)
    }
}

fn resolve(t: &Term, model: &FiniteModel, asg: &Assignment) -> Result<Element, EvalError> {
    let e = match t {
        Term::Var(v) => asg.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Term::Const(e) => *e,
    };
    if e.index >= model.size(e.sort) {
        return Err(EvalError::ConstantOutOfRange(e));
    }
    Ok(e)
}

/// Tarskian truth of `formula` in `model` under `assignment`. Quantifiers
/// expand over the finite universe of their sort.
///
/// A formula that mentions sort World is an error on a model without worlds;
/// it is never treated as vacuously true.
pub fn evaluate(
    formula: &Formula,
    model: &FiniteModel,
    assignment: &Assignment,
) -> Result<bool, EvalError> {
    if model.worlds().is_empty() && formula.mentions_world() {
        return Err(EvalError::EmptyWorldUniverse(model.name.clone()));
    }
    let mut asg = assignment.clone();
    eval(formula, model, &mut asg)
}

fn eval(f: &Formula, model: &FiniteModel, asg: &mut Assignment) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Pred(name, args) => {
            let mut tuple = Vec::with_capacity(args.len());
            for a in args {
                tuple.push(resolve(a, model, asg)?.index);
            }
            model.holds(name, &tuple)
        }
        Formula::Equal(a, b) => resolve(a, model, asg)? == resolve(b, model, asg)?,
        Formula::Not(a) => !eval(a, model, asg)?,
        Formula::And(a, b) => eval(a, model, asg)? && eval(b, model, asg)?,
        Formula::Or(a, b) => eval(a, model, asg)? || eval(b, model, asg)?,
        Formula::Implies(a, b) => !eval(a, model, asg)? || eval(b, model, asg)?,
        Formula::Iff(a, b) => eval(a, model, asg)? == eval(b, model, asg)?,
        Formula::ForAll(v, s, body) | Formula::Exists(v, s, body) => {
            let universal = matches!(f, Formula::ForAll(..));
            for index in 0..model.size(*s) {
                asg.bind(v, Element { sort: *s, index });
                let r = eval(body, model, asg);
                asg.unbind();
                if r? != universal {
                    return Ok(!universal);
                }
            }
            universal
        }
    })
}

/// Evaluates `formula` with the given variables bound, checking that each
/// bound element has the sort the caller expects.
pub fn evaluate_at(
    formula: &Formula,
    model: &FiniteModel,
    bindings: &[(String, Sort, Element)],
) -> Result<bool, EvalError> {
    let mut asg = Assignment::new();
    for (v, s, e) in bindings {
        if e.sort != *s {
            return Err(EvalError::AssignmentSort {
                var: v.clone(),
                expected: *s,
                found: e.sort,
            });
        }
        asg.bind(v, *e);
    }
    evaluate(formula, model, &asg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::Sort;

    fn model() -> FiniteModel {
        let mut m = FiniteModel::with_sizes("m", 3, 0).unwrap();
        m.set_table_indices("p", &[Sort::Thing], [vec![0], vec![2]])
            .unwrap();
        m
    }

    #[test]
    fn reflexivity_holds() {
        let f = Formula::forall("x", Sort::Thing, Formula::eq("x", "x"));
        assert_eq!(evaluate(&f, &model(), &Assignment::new()), Ok(true));
    }

    #[test]
    fn quantifiers_expand_over_universe() {
        let m = model();
        let all = Formula::forall("x", Sort::Thing, Formula::pred("p", ["x"]));
        let some = Formula::exists("x", Sort::Thing, Formula::pred("p", ["x"]));
        assert_eq!(evaluate(&all, &m, &Assignment::new()), Ok(false));
        assert_eq!(evaluate(&some, &m, &Assignment::new()), Ok(true));
    }

    #[test]
    fn unbound_variable_is_an_error() {
        assert_eq!(
            evaluate(&Formula::pred("p", ["x"]), &model(), &Assignment::new()),
            Err(EvalError::Unbound("x".into()))
        );
        let asg = Assignment::new().with("x", Element::thing(1));
        assert_eq!(
            evaluate(&Formula::pred("p", ["x"]), &model(), &asg),
            Ok(false)
        );
    }

    #[test]
    fn world_quantifier_on_worldless_model_is_rejected() {
        let f = Formula::forall("w", Sort::World, Formula::True);
        assert_eq!(
            evaluate(&f, &model(), &Assignment::new()),
            Err(EvalError::EmptyWorldUniverse("m".into()))
        );
    }

    #[test]
    fn distinct_constants_are_unequal() {
        let m = model();
        let ne = Formula::eq(Element::thing(0), Element::thing(1));
        let eq = Formula::eq(Element::thing(2), Element::thing(2));
        assert_eq!(evaluate(&ne, &m, &Assignment::new()), Ok(false));
        assert_eq!(evaluate(&eq, &m, &Assignment::new()), Ok(true));
        let out = Formula::pred("p", [Element::thing(7)]);
        assert!(matches!(
            evaluate(&out, &m, &Assignment::new()),
            Err(EvalError::ConstantOutOfRange(_))
        ));
    }
}
