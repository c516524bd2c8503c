//! Attribute expressions, conditions and their evaluation.
//!
//! Attribute values are 64-bit signed integers; arithmetic wraps on overflow.
//! Division and `mod` are truncated (round toward zero, like the host `/` and
//! `%`), so `(a / b) * b + (a mod b) == a` whenever `b != 0`. Comparisons and
//! boolean operators return `1` or `0`; any nonzero value counts as true.
//! `and`/`or` short-circuit, so a guard like `not(b == 0) and a / b > 0` never
//! divides by zero once the first conjunct settles the answer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn spelling(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter. Unary operators sit above all
    /// of these.
    fn precedence(self) -> u8 {
        match self {
            BinOp::Mul | BinOp::Div | BinOp::Mod => 5,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::And => 2,
            BinOp::Or => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttrExpr {
    Var(String),
    Lit(i64),
    Neg(Box<AttrExpr>),
    Not(Box<AttrExpr>),
    Bin(BinOp, Box<AttrExpr>, Box<AttrExpr>),
}

impl AttrExpr {
    pub fn var(name: &str) -> Self {
        AttrExpr::Var(name.to_string())
    }

    pub fn lit(v: i64) -> Self {
        AttrExpr::Lit(v)
    }

    pub fn neg(e: AttrExpr) -> Self {
        AttrExpr::Neg(Box::new(e))
    }

    pub fn not(e: AttrExpr) -> Self {
        AttrExpr::Not(Box::new(e))
    }

    pub fn bin(op: BinOp, a: AttrExpr, b: AttrExpr) -> Self {
        AttrExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            AttrExpr::Var(v) => {
                out.insert(v.clone());
            }
            AttrExpr::Lit(_) => {}
            AttrExpr::Neg(e) | AttrExpr::Not(e) => e.collect_vars(out),
            AttrExpr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Rewrites every variable through `map`. Unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> AttrExpr {
        match self {
            AttrExpr::Var(v) => AttrExpr::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            AttrExpr::Lit(i) => AttrExpr::Lit(*i),
            AttrExpr::Neg(e) => AttrExpr::neg(e.rename(map)),
            AttrExpr::Not(e) => AttrExpr::not(e.rename(map)),
            AttrExpr::Bin(op, a, b) => AttrExpr::bin(*op, a.rename(map), b.rename(map)),
        }
    }

    /// Integer literals collected from the tree, used to seed boundary-value
    /// sampling in the disjointness check.
    pub fn literals(&self) -> Vec<i64> {
        let mut out = Vec::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals(&self, out: &mut Vec<i64>) {
        match self {
            AttrExpr::Var(_) => {}
            AttrExpr::Lit(i) => out.push(*i),
            AttrExpr::Neg(e) | AttrExpr::Not(e) => e.collect_literals(out),
            AttrExpr::Bin(_, a, b) => {
                a.collect_literals(out);
                b.collect_literals(out);
            }
        }
    }
}

/// Environment binding attribute variables to values.
pub type Env = BTreeMap<String, i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound attribute variable `{0}`")]
    Unbound(String),
    #[error("division by zero")]
    DivByZero,
}

/// Truthiness of an attribute value: false is 0, true is anything else.
pub fn is_true(v: i64) -> bool {
    v != 0
}

/// Evaluates `e` under `env` with wrapping integer semantics.
pub fn eval(e: &AttrExpr, env: &Env) -> Result<i64, EvalError> {
    match e {
        AttrExpr::Var(v) => env.get(v).copied().ok_or_else(|| EvalError::Unbound(v.clone())),
        AttrExpr::Lit(i) => Ok(*i),
        AttrExpr::Neg(e) => Ok(eval(e, env)?.wrapping_neg()),
        AttrExpr::Not(e) => Ok(if is_true(eval(e, env)?) { 0 } else { 1 }),
        AttrExpr::Bin(op, a, b) => {
            // Short-circuit before touching the right operand.
            match op {
                BinOp::And => {
                    return Ok(if !is_true(eval(a, env)?) {
                        0
                    } else if is_true(eval(b, env)?) {
                        1
                    } else {
                        0
                    });
                }
                BinOp::Or => {
                    return Ok(if is_true(eval(a, env)?) {
                        1
                    } else if is_true(eval(b, env)?) {
                        1
                    } else {
                        0
                    });
                }
                _ => {}
            }
            let x = eval(a, env)?;
            let y = eval(b, env)?;
            Ok(match op {
                BinOp::Add => x.wrapping_add(y),
                BinOp::Sub => x.wrapping_sub(y),
                BinOp::Mul => x.wrapping_mul(y),
                BinOp::Div => {
                    if y == 0 {
                        return Err(EvalError::DivByZero);
                    }
                    x.wrapping_div(y)
                }
                BinOp::Mod => {
                    if y == 0 {
                        return Err(EvalError::DivByZero);
                    }
                    x.wrapping_rem(y)
                }
                BinOp::Eq => (x == y) as i64,
                BinOp::Ne => (x != y) as i64,
                BinOp::Lt => (x < y) as i64,
                BinOp::Le => (x <= y) as i64,
                BinOp::Gt => (x > y) as i64,
                BinOp::Ge => (x >= y) as i64,
                BinOp::And | BinOp::Or => unreachable!(),
            })
        }
    }
}

/// A guard attached to an active pair or a connection.
///
/// `Otherwise` keeps the conditions of its guard-group siblings so it can be
/// evaluated on its own: it holds exactly when every sibling is false. The
/// siblings are resolved once, when the guard group is desugared, which keeps
/// rules self-contained after flattening moves them between rule sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    True,
    Expr(AttrExpr),
    Otherwise { negates: Vec<AttrExpr> },
}

impl Condition {
    /// Evaluates the condition to a boolean under `env`.
    pub fn holds(&self, env: &Env) -> Result<bool, EvalError> {
        match self {
            Condition::True => Ok(true),
            Condition::Expr(e) => Ok(is_true(eval(e, env)?)),
            Condition::Otherwise { negates } => {
                for sib in negates {
                    if is_true(eval(sib, env)?) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// The condition as a plain expression: `true` becomes `1`, `otherwise`
    /// becomes the negated disjunction of its siblings.
    pub fn semantics(&self) -> AttrExpr {
        match self {
            Condition::True => AttrExpr::Lit(1),
            Condition::Expr(e) => e.clone(),
            Condition::Otherwise { negates } => match negates.split_first() {
                None => AttrExpr::Lit(1),
                Some((first, rest)) => {
                    let mut acc = first.clone();
                    for e in rest {
                        acc = AttrExpr::bin(BinOp::Or, acc, e.clone());
                    }
                    AttrExpr::not(acc)
                }
            },
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Condition::True => BTreeSet::new(),
            Condition::Expr(e) => e.free_vars(),
            Condition::Otherwise { negates } => {
                let mut out = BTreeSet::new();
                for e in negates {
                    e.collect_vars(&mut out);
                }
                out
            }
        }
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Condition {
        match self {
            Condition::True => Condition::True,
            Condition::Expr(e) => Condition::Expr(e.rename(map)),
            Condition::Otherwise { negates } => Condition::Otherwise {
                negates: negates.iter().map(|e| e.rename(map)).collect(),
            },
        }
    }

    pub fn is_otherwise(&self) -> bool {
        matches!(self, Condition::Otherwise { .. })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::True => write!(f, "true"),
            Condition::Expr(e) => write!(f, "{}", e),
            Condition::Otherwise { .. } => write!(f, "otherwise"),
        }
    }
}

impl fmt::Display for AttrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl AttrExpr {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, enclosing: u8) -> fmt::Result {
        match self {
            AttrExpr::Var(v) => write!(f, "{}", v),
            AttrExpr::Lit(i) => {
                if *i < 0 && enclosing >= 6 {
                    write!(f, "({})", i)
                } else {
                    write!(f, "{}", i)
                }
            }
            AttrExpr::Neg(e) => {
                // `-(5)` keeps a negated literal distinct from one literal.
                if matches!(**e, AttrExpr::Lit(_)) {
                    write!(f, "-(")?;
                    e.fmt_prec(f, 0)?;
                    write!(f, ")")
                } else {
                    write!(f, "-")?;
                    e.fmt_prec(f, 6)
                }
            }
            AttrExpr::Not(e) => {
                write!(f, "not ")?;
                e.fmt_prec(f, 6)
            }
            AttrExpr::Bin(op, a, b) => {
                let p = op.precedence();
                if p < enclosing {
                    write!(f, "(")?;
                }
                // Left-associative: the left child may reuse this level.
                a.fmt_prec(f, p)?;
                write!(f, " {} ", op.spelling())?;
                b.fmt_prec(f, p + 1)?;
                if p < enclosing {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}
