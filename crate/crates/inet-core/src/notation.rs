//! The guard/case rule notation and its expansion into rules on
//! conditional NAPs.
//!
//! A rule sentence gives an active pair, then guard groups; each guard leads
//! either straight to a right-hand-side net or into a `case` split on a free
//! port, whose branches are agents with their own guard groups. Expansion
//! walks this tree, threading a growing conditional NAP: guards desugar into
//! a disjoint chain (each guard adds the negation of its predecessors), and
//! every case branch extends the NAP by one connection. Expansion fails when
//! a constructed pattern breaks the NAP construction rules, e.g. a `case` on
//! a port an earlier branch already consumed.

use std::collections::HashSet;

use thiserror::Error;

use crate::cnap::{ConditionalNap, NapError, PatternAgent, Rule, RuleError};
use crate::expr::{AttrExpr, BinOp, Condition};
use crate::net::Net;
use crate::symbol::SymbolTable;

/// A guard as written: `true` (possibly omitted), an expression, or
/// `otherwise`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    True,
    Expr(AttrExpr),
    Otherwise,
}

/// Branch body: either a right-hand-side net template or a case split.
#[derive(Debug, Clone)]
pub enum Spray {
    Arrow(Net<AttrExpr>),
    Case {
        port: String,
        branches: Vec<Branch>,
    },
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub agent: PatternAgent,
    pub groups: Vec<(Guard, Spray)>,
}

/// One parsed rule sentence.
#[derive(Debug, Clone)]
pub struct RuleNotation {
    pub left: PatternAgent,
    pub right: PatternAgent,
    pub groups: Vec<(Guard, Spray)>,
}

#[derive(Debug, Error, Clone)]
pub enum NotationError {
    #[error("`otherwise` must be the last guard of its group")]
    OtherwiseNotLast,
    #[error("case branches repeat the symbol `{0}`")]
    DuplicateBranchSymbol(String),
    #[error("invalid pattern: {0}")]
    Pattern(#[from] NapError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("the same pattern arose twice with different bodies during expansion")]
    SprayCollision,
}

/// Desugars one guard group into disjoint conditions: the k-th guard becomes
/// `not(c1 or ... or c_{k-1}) and c_k`, and a trailing `otherwise` keeps its
/// form, remembering the guards it negates.
pub fn desugar_guards(guards: &[Guard]) -> Result<Vec<Condition>, NotationError> {
    for (i, g) in guards.iter().enumerate() {
        if *g == Guard::Otherwise && i + 1 != guards.len() {
            return Err(NotationError::OtherwiseNotLast);
        }
    }
    let mut out = Vec::with_capacity(guards.len());
    let mut priors: Vec<AttrExpr> = Vec::new();
    for g in guards {
        let cond = match g {
            Guard::Otherwise => Condition::Otherwise {
                negates: priors.clone(),
            },
            Guard::True if priors.is_empty() => Condition::True,
            Guard::Expr(e) if priors.is_empty() => Condition::Expr(e.clone()),
            g => {
                // not(c1 or c2 or ...) and ck
                let mut disj = priors[0].clone();
                for p in &priors[1..] {
                    disj = AttrExpr::bin(BinOp::Or, disj, p.clone());
                }
                let negated = AttrExpr::not(disj);
                match g {
                    Guard::True => Condition::Expr(negated),
                    Guard::Expr(e) => {
                        Condition::Expr(AttrExpr::bin(BinOp::And, negated, e.clone()))
                    }
                    Guard::Otherwise => unreachable!(),
                }
            }
        };
        priors.push(match g {
            Guard::True => AttrExpr::Lit(1),
            Guard::Expr(e) => e.clone(),
            Guard::Otherwise => AttrExpr::Lit(1),
        });
        out.push(cond);
    }
    Ok(out)
}

/// Expands a rule sentence into rules on conditional NAPs.
pub fn t_r(rn: &RuleNotation, table: &SymbolTable) -> Result<Vec<Rule>, NotationError> {
    let mut rules: Vec<Rule> = Vec::new();
    // Each pattern may arise only once during expansion; a repeat would mean
    // two bodies compete for the same pattern.
    let mut seen: HashSet<String> = HashSet::new();

    let base_conds = desugar_guards(
        &rn.groups.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>(),
    )?;
    for (cond, (_, spray)) in base_conds.into_iter().zip(rn.groups.iter()) {
        let nap = ConditionalNap::pair(table, rn.left.clone(), rn.right.clone(), cond)?;
        t_s(nap, spray, table, &mut rules, &mut seen)?;
    }
    // Name rules by their pair and position.
    let lname = table.name(rn.left.symbol);
    let rname = table.name(rn.right.symbol);
    for (i, r) in rules.iter_mut().enumerate() {
        r.name = format!("{}_{}_{}", lname, rname, i + 1);
    }
    Ok(rules)
}

fn t_s(
    nap: ConditionalNap,
    spray: &Spray,
    table: &SymbolTable,
    rules: &mut Vec<Rule>,
    seen: &mut HashSet<String>,
) -> Result<(), NotationError> {
    if !seen.insert(nap.canon_key(table)) {
        return Err(NotationError::SprayCollision);
    }
    match spray {
        Spray::Arrow(net) => {
            rules.push(Rule::new("", nap, net.clone())?);
            Ok(())
        }
        Spray::Case { port, branches } => {
            for (i, b) in branches.iter().enumerate() {
                for other in &branches[..i] {
                    if other.agent.symbol == b.agent.symbol {
                        return Err(NotationError::DuplicateBranchSymbol(
                            table.name(b.agent.symbol).to_string(),
                        ));
                    }
                }
            }
            for b in branches {
                let conds = desugar_guards(
                    &b.groups.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>(),
                )?;
                for (cond, (_, inner)) in conds.into_iter().zip(b.groups.iter()) {
                    let extended = nap.clone().extend(table, port, b.agent.clone(), cond)?;
                    t_s(extended, inner, table, rules, seen)?;
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Env;
    use crate::net::PortRef;
    use crate::symbol::TermKind;
    use crate::testutil;

    fn b_eq_0() -> AttrExpr {
        AttrExpr::bin(BinOp::Eq, AttrExpr::var("b"), AttrExpr::lit(0))
    }

    #[test]
    fn desugar_keeps_first_guard() {
        let out = desugar_guards(&[Guard::True]).unwrap();
        assert_eq!(out, vec![Condition::True]);
    }

    #[test]
    fn desugar_trailing_otherwise() {
        let out = desugar_guards(&[Guard::Expr(b_eq_0()), Guard::Otherwise]).unwrap();
        assert_eq!(out[0], Condition::Expr(b_eq_0()));
        assert_eq!(
            out[1],
            Condition::Otherwise {
                negates: vec![b_eq_0()]
            }
        );
        // Semantically not(b == 0).
        let env: Env = [("b".to_string(), 0)].into_iter().collect();
        assert_eq!(out[1].holds(&env), Ok(false));
        let env: Env = [("b".to_string(), 5)].into_iter().collect();
        assert_eq!(out[1].holds(&env), Ok(true));
    }

    #[test]
    fn desugar_builds_the_negation_chain() {
        let c = |v: &str| AttrExpr::bin(BinOp::Gt, AttrExpr::var(v), AttrExpr::lit(0));
        let out =
            desugar_guards(&[Guard::Expr(c("a")), Guard::Expr(c("b")), Guard::Expr(c("c"))])
                .unwrap();
        assert_eq!(out[0], Condition::Expr(c("a")));
        assert_eq!(
            out[1],
            Condition::Expr(AttrExpr::bin(
                BinOp::And,
                AttrExpr::not(c("a")),
                c("b")
            ))
        );
        assert_eq!(
            out[2],
            Condition::Expr(AttrExpr::bin(
                BinOp::And,
                AttrExpr::not(AttrExpr::bin(BinOp::Or, c("a"), c("b"))),
                c("c")
            ))
        );
    }

    #[test]
    fn otherwise_must_be_last() {
        let err = desugar_guards(&[Guard::Otherwise, Guard::True]).unwrap_err();
        assert!(matches!(err, NotationError::OtherwiseNotLast));
    }

    /// The gcd sentence: `gcd(r) >< Pair(p1, p2) -> case p2 of { Int(b) |
    /// b == 0 -> N1 | otherwise -> case p1 of { Int(a) -> N2 } }`.
    fn gcd_notation(table: &SymbolTable) -> RuleNotation {
        let gcd = table.lookup("gcd").unwrap();
        let pair = table.lookup("Pair").unwrap();
        let int = table.lookup("Int").unwrap();

        let mut n1: Net<AttrExpr> = Net::new();
        let r = n1.add_interface("r").unwrap();
        let p1 = n1.add_interface("p1").unwrap();
        n1.connect(r, p1).unwrap();

        let mut n2: Net<AttrExpr> = Net::new();
        let r = n2.add_interface("r").unwrap();
        let g = n2.add_agent(table, gcd, vec![]).unwrap();
        let p = n2.add_agent(table, pair, vec![]).unwrap();
        let ib = n2.add_agent(table, int, vec![AttrExpr::var("b")]).unwrap();
        let im = n2
            .add_agent(
                table,
                int,
                vec![AttrExpr::bin(BinOp::Mod, AttrExpr::var("a"), AttrExpr::var("b"))],
            )
            .unwrap();
        n2.connect(PortRef::aux(g, 1), r).unwrap();
        n2.connect(PortRef::principal(g), PortRef::principal(p)).unwrap();
        n2.connect(PortRef::aux(p, 1), PortRef::principal(ib)).unwrap();
        n2.connect(PortRef::aux(p, 2), PortRef::principal(im)).unwrap();

        let inner_case = Spray::Case {
            port: "p1".into(),
            branches: vec![Branch {
                agent: PatternAgent::new(table, int, vec!["a".into()], vec![]).unwrap(),
                groups: vec![(Guard::True, Spray::Arrow(n2))],
            }],
        };
        RuleNotation {
            left: PatternAgent::new(table, gcd, vec![], vec!["r".into()]).unwrap(),
            right: PatternAgent::new(table, pair, vec![], vec!["p1".into(), "p2".into()])
                .unwrap(),
            groups: vec![(
                Guard::True,
                Spray::Case {
                    port: "p2".into(),
                    branches: vec![Branch {
                        agent: PatternAgent::new(table, int, vec!["b".into()], vec![]).unwrap(),
                        groups: vec![
                            (Guard::Expr(b_eq_0()), Spray::Arrow(n1)),
                            (Guard::Otherwise, inner_case),
                        ],
                    }],
                },
            )],
        }
    }

    #[test]
    fn gcd_notation_expands_to_the_two_nap_rules() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let rules = t_r(&gcd_notation(table), table).unwrap();
        assert_eq!(rules.len(), 2);
        // Structurally the rules of the hand-built fixture, up to renaming.
        assert!(crate::cnap::rule_canon_eq(&rules[0], &fx.rules.rules()[0], table));
        assert!(crate::cnap::rule_canon_eq(&rules[1], &fx.rules.rules()[1], table));
        // Rule 2 keeps `otherwise` on its middle connection.
        assert!(rules[1].lhs.connections[0].cond.is_otherwise());
        assert_eq!(rules[1].lhs.connections.len(), 2);
    }

    #[test]
    fn case_on_consumed_port_fails() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let int = table.lookup("Int").unwrap();
        let mut rn = gcd_notation(table);
        // Rewrite the inner case to probe p2 again instead of p1.
        if let Spray::Case { branches, .. } = &mut rn.groups[0].1 {
            if let (_, Spray::Case { port, .. }) = &mut branches[0].groups[1] {
                *port = "p2".into();
            }
        }
        let err = t_r(&rn, table).unwrap_err();
        assert!(
            matches!(err, NotationError::Pattern(NapError::PortNotFree(ref p)) if p == "p2"),
            "got {:?}",
            err
        );
        let _ = int;
    }

    #[test]
    fn duplicate_branch_symbols_fail() {
        let fx = testutil::lastelt_fixture();
        let table = fx.rules.symbols();
        let last = table.lookup("lastElt").unwrap();
        let cons = table.lookup("Cons").unwrap();
        let int = table.lookup("Int").unwrap();
        let mut n: Net<AttrExpr> = Net::new();
        let r = n.add_interface("r").unwrap();
        let i = n.add_agent(table, int, vec![AttrExpr::var("j")]).unwrap();
        n.connect(r, PortRef::principal(i)).unwrap();
        let rn = RuleNotation {
            left: PatternAgent::new(table, last, vec![], vec!["r".into()]).unwrap(),
            right: PatternAgent::new(table, cons, vec!["j".into()], vec!["xs".into()]).unwrap(),
            groups: vec![(
                Guard::True,
                Spray::Case {
                    port: "xs".into(),
                    branches: vec![
                        Branch {
                            agent: PatternAgent::new(table, table.lookup("Nil").unwrap(), vec![], vec![])
                                .unwrap(),
                            groups: vec![(Guard::True, Spray::Arrow(n.clone()))],
                        },
                        Branch {
                            agent: PatternAgent::new(table, table.lookup("Nil").unwrap(), vec![], vec![])
                                .unwrap(),
                            groups: vec![(Guard::True, Spray::Arrow(n.clone()))],
                        },
                    ],
                },
            )],
        };
        let err = t_r(&rn, table).unwrap_err();
        assert!(matches!(err, NotationError::DuplicateBranchSymbol(ref s) if s == "Nil"));
    }

    #[test]
    fn lastelt_as_one_sentence_expands_to_two_rules() {
        let fx = testutil::lastelt_fixture();
        let table = fx.rules.symbols();
        let last = table.lookup("lastElt").unwrap();
        let cons = table.lookup("Cons").unwrap();
        let nil = table.lookup("Nil").unwrap();
        let int = table.lookup("Int").unwrap();

        let mut n1: Net<AttrExpr> = Net::new();
        let r = n1.add_interface("r").unwrap();
        let i = n1.add_agent(table, int, vec![AttrExpr::var("j")]).unwrap();
        n1.connect(r, PortRef::principal(i)).unwrap();

        let mut n2: Net<AttrExpr> = Net::new();
        let r = n2.add_interface("r").unwrap();
        let ys = n2.add_interface("ys").unwrap();
        let l = n2.add_agent(table, last, vec![]).unwrap();
        let c = n2.add_agent(table, cons, vec![AttrExpr::var("k")]).unwrap();
        n2.connect(PortRef::aux(l, 1), r).unwrap();
        n2.connect(PortRef::principal(l), PortRef::principal(c)).unwrap();
        n2.connect(PortRef::aux(c, 1), ys).unwrap();

        let rn = RuleNotation {
            left: PatternAgent::new(table, last, vec![], vec!["r".into()]).unwrap(),
            right: PatternAgent::new(table, cons, vec!["j".into()], vec!["xs".into()]).unwrap(),
            groups: vec![(
                Guard::True,
                Spray::Case {
                    port: "xs".into(),
                    branches: vec![
                        Branch {
                            agent: PatternAgent::new(table, nil, vec![], vec![]).unwrap(),
                            groups: vec![(Guard::True, Spray::Arrow(n1))],
                        },
                        Branch {
                            agent: PatternAgent::new(table, cons, vec!["k".into()], vec!["ys".into()])
                                .unwrap(),
                            groups: vec![(Guard::True, Spray::Arrow(n2))],
                        },
                    ],
                },
            )],
        };
        let rules = t_r(&rn, table).unwrap();
        assert_eq!(rules.len(), 2);
        assert!(crate::cnap::rule_canon_eq(&rules[0], &fx.rules.rules()[0], table));
        assert!(crate::cnap::rule_canon_eq(&rules[1], &fx.rules.rules()[1], table));
    }

    #[test]
    fn expanded_sets_satisfy_sequentiality_and_distinctness() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let rules = t_r(&gcd_notation(table), table).unwrap();
        let mut union = Vec::new();
        for r in &rules {
            union.extend(r.lhs.all_sub());
        }
        let opts = crate::check::CheckOptions::default();
        assert!(crate::check::check_local_sequentiality(&union, table, &opts).is_empty());
        assert!(crate::check::check_pairwise_distinct(&rules, table, &opts).is_empty());
    }

    #[test]
    fn guard_groups_on_the_base_pair_make_sibling_rules() {
        // sumup-style: two guard groups on one active pair.
        let mut table = SymbolTable::with_builtins();
        let sumup = table.declare("sumup", 1, 0, TermKind::Fn).unwrap();
        let int = table.lookup("Int").unwrap();
        let mut n1: Net<AttrExpr> = Net::new();
        let r = n1.add_interface("r").unwrap();
        let z = n1.add_agent(&table, int, vec![AttrExpr::lit(0)]).unwrap();
        n1.connect(r, PortRef::principal(z)).unwrap();
        let mut n2: Net<AttrExpr> = Net::new();
        let r = n2.add_interface("r").unwrap();
        let i = n2.add_agent(&table, int, vec![AttrExpr::var("n")]).unwrap();
        n2.connect(r, PortRef::principal(i)).unwrap();
        let rn = RuleNotation {
            left: PatternAgent::new(&table, sumup, vec![], vec!["r".into()]).unwrap(),
            right: PatternAgent::new(&table, int, vec!["n".into()], vec![]).unwrap(),
            groups: vec![
                (
                    Guard::Expr(AttrExpr::bin(BinOp::Eq, AttrExpr::var("n"), AttrExpr::lit(0))),
                    Spray::Arrow(n1),
                ),
                (Guard::Otherwise, Spray::Arrow(n2)),
            ],
        };
        let rules = t_r(&rn, &table).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].lhs.connections.len(), 0);
        assert!(rules[1].lhs.cond.is_otherwise());
        let opts = crate::check::CheckOptions::default();
        assert!(crate::check::check_pairwise_distinct(&rules, &table, &opts).is_empty());
    }
}
