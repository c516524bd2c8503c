//! Whole-program handling: parse a `.inet` file, expand its rule sentences,
//! check the rule set, translate it to flat rules, and print it back.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::check::{check_pairwise_distinct, CheckOptions, CheckReport};
use crate::cnap::{Rule, RuleSet};
use crate::expr::{AttrExpr, Condition};
use crate::flatten::translate_ruleset;
use crate::net::Net;
use crate::notation::{t_r, Guard, NotationError, RuleNotation, Spray};
use crate::symbol::{SymbolId, SymbolTable};
use crate::text::lexer::ParseError;
use crate::text::parser::parse_program;
use crate::text::pretty::print_program_parts;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("rule {pair}: {source}")]
    Notation {
        pair: String,
        source: NotationError,
    },
}

/// A parsed program: the rule sentences as written, the rules they expand
/// to, and the named initial nets.
#[derive(Debug)]
pub struct Program {
    pub notations: Vec<RuleNotation>,
    pub rules: RuleSet,
    pub nets: Vec<(String, Net<i64>)>,
}

impl Program {
    pub fn parse(text: &str) -> Result<Program, LoadError> {
        let parsed = parse_program(text)?;
        let mut rules: Vec<Rule> = Vec::new();
        for rn in &parsed.notations {
            let expanded = t_r(rn, &parsed.symbols).map_err(|source| LoadError::Notation {
                pair: format!(
                    "{} >< {}",
                    parsed.symbols.name(rn.left.symbol),
                    parsed.symbols.name(rn.right.symbol)
                ),
                source,
            })?;
            rules.extend(expanded);
        }
        // Sentences for one pair may come from several rules; number the
        // expanded rules per pair across the whole program.
        let mut ordinals: BTreeMap<(SymbolId, SymbolId), usize> = BTreeMap::new();
        for r in rules.iter_mut() {
            let pair = (r.lhs.left.symbol, r.lhs.right.symbol);
            let n = ordinals.entry(pair).or_insert(0);
            *n += 1;
            r.name = format!(
                "{}_{}_{}",
                parsed.symbols.name(pair.0),
                parsed.symbols.name(pair.1),
                n
            );
        }
        Ok(Program {
            notations: parsed.notations,
            rules: RuleSet::new(parsed.symbols, rules),
            nets: parsed.nets,
        })
    }

    pub fn symbols(&self) -> &SymbolTable {
        self.rules.symbols()
    }

    pub fn net(&self, name: &str) -> Option<&Net<i64>> {
        self.nets.iter().find(|(n, _)| n == name).map(|(_, net)| net)
    }

    /// Runs the pairwise-distinctness check over the expanded rules.
    pub fn check(&self, opts: &CheckOptions) -> CheckReport {
        CheckReport {
            diagnostics: check_pairwise_distinct(self.rules.rules(), self.symbols(), opts),
        }
    }

    /// Translates to flat rules, returning the flat program and the
    /// introduced symbols. Nets carry over unchanged; the flat program's
    /// sentences are rebuilt from the flat rules so it prints and re-parses.
    pub fn translate(&self) -> (Program, Vec<SymbolId>) {
        let (flat, introduced) = translate_ruleset(&self.rules);
        let notations = flat_rules_to_notations(&flat);
        (
            Program {
                notations,
                rules: flat,
                nets: self.nets.clone(),
            },
            introduced,
        )
    }

    /// Prints the program in `.inet` syntax.
    pub fn render(&self) -> String {
        print_program_parts(self.symbols(), &self.notations, &self.nets)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn or_chain(exprs: &[AttrExpr]) -> AttrExpr {
    let mut it = exprs.iter();
    let first = it.next().expect("nonempty").clone();
    it.fold(first, |acc, e| {
        AttrExpr::bin(crate::expr::BinOp::Or, acc, e.clone())
    })
}

fn guard_semantics(g: &Guard) -> AttrExpr {
    match g {
        Guard::True | Guard::Otherwise => AttrExpr::Lit(1),
        Guard::Expr(e) => e.clone(),
    }
}

/// Tries to read a condition sequence back as the desugaring of one guard
/// group. Returns `None` when the conditions do not have the chain shape.
fn rebuild_guards(conds: &[&Condition]) -> Option<Vec<Guard>> {
    let mut out: Vec<Guard> = Vec::new();
    let mut priors: Vec<AttrExpr> = Vec::new();
    for (k, cond) in conds.iter().enumerate() {
        let guard = if k == 0 {
            match cond {
                Condition::True => Guard::True,
                Condition::Expr(e) => Guard::Expr(e.clone()),
                Condition::Otherwise { negates } if negates.is_empty() => Guard::Otherwise,
                Condition::Otherwise { .. } => return None,
            }
        } else {
            let disj = or_chain(&priors);
            match cond {
                Condition::Otherwise { negates } if *negates == priors => Guard::Otherwise,
                Condition::Expr(AttrExpr::Bin(crate::expr::BinOp::And, l, r))
                    if **l == AttrExpr::not(disj.clone()) =>
                {
                    Guard::Expr((**r).clone())
                }
                Condition::Expr(AttrExpr::Not(inner)) if **inner == disj => Guard::True,
                _ => return None,
            }
        };
        priors.push(guard_semantics(&guard));
        out.push(guard);
    }
    Some(out)
}

/// A guard equivalent to the condition on its own, outside any group.
fn standalone_guard(cond: &Condition) -> Guard {
    match cond {
        Condition::True => Guard::True,
        Condition::Expr(e) => Guard::Expr(e.clone()),
        Condition::Otherwise { negates } if negates.is_empty() => Guard::True,
        other => Guard::Expr(other.semantics()),
    }
}

/// Regroups flat rules into printable sentences: rules for one active pair
/// whose patterns coincide and whose guards form a desugaring chain become a
/// single sentence; anything else prints one sentence per rule.
fn flat_rules_to_notations(rules: &RuleSet) -> Vec<RuleNotation> {
    let mut groups: Vec<((SymbolId, SymbolId), Vec<&Rule>)> = Vec::new();
    for r in rules.rules() {
        debug_assert!(r.lhs.connections.is_empty(), "flat rules have no connections");
        let pair = (r.lhs.left.symbol, r.lhs.right.symbol);
        match groups.iter_mut().find(|(p, g)| {
            *p == pair && g[0].lhs.left == r.lhs.left && g[0].lhs.right == r.lhs.right
        }) {
            Some((_, g)) => g.push(r),
            None => groups.push((pair, vec![r])),
        }
    }
    let mut out = Vec::new();
    for (_, group) in groups {
        let conds: Vec<&Condition> = group.iter().map(|r| &r.lhs.cond).collect();
        match rebuild_guards(&conds) {
            Some(guards) => out.push(RuleNotation {
                left: group[0].lhs.left.clone(),
                right: group[0].lhs.right.clone(),
                groups: guards
                    .into_iter()
                    .zip(group.iter())
                    .map(|(g, r)| (g, Spray::Arrow(r.rhs.clone())))
                    .collect(),
            }),
            None => {
                for r in group {
                    out.push(RuleNotation {
                        left: r.lhs.left.clone(),
                        right: r.lhs.right.clone(),
                        groups: vec![(standalone_guard(&r.lhs.cond), Spray::Arrow(r.rhs.clone()))],
                    });
                }
            }
        }
    }
    out
}
