//! Hand-built rule sets and nets shared by unit tests.

use crate::cnap::{ConditionalNap, PatternAgent, Rule, RuleSet};
use crate::expr::{AttrExpr, BinOp, Condition};
use crate::net::{Net, PortRef};
use crate::symbol::{SymbolTable, TermKind};

pub struct Fixture {
    pub rules: RuleSet,
}

fn b_is_zero() -> AttrExpr {
    AttrExpr::bin(BinOp::Eq, AttrExpr::var("b"), AttrExpr::lit(0))
}

/// The two gcd rules over conditional NAPs:
///
/// 1. `<gcd(r) >< Pair(p1,p2) if true, p2 - Int(b) if b == 0> -> r ~ p1`
/// 2. `<gcd(r) >< Pair(p1,p2) if true, p2 - Int(b) if otherwise,
///     p1 - Int(a) if true> -> r ~ gcd(Pair(Int(b), Int(a mod b)))`
pub fn gcd_fixture() -> Fixture {
    let mut table = SymbolTable::with_builtins();
    let gcd = table.declare("gcd", 1, 0, TermKind::Fn).unwrap();
    let pair = table.declare("Pair", 2, 0, TermKind::Data).unwrap();
    let int = table.lookup("Int").unwrap();

    let base = |table: &SymbolTable| {
        ConditionalNap::pair(
            table,
            PatternAgent::new(table, gcd, vec![], vec!["r".into()]).unwrap(),
            PatternAgent::new(table, pair, vec![], vec!["p1".into(), "p2".into()]).unwrap(),
            Condition::True,
        )
        .unwrap()
    };

    let lhs1 = base(&table)
        .extend(
            &table,
            "p2",
            PatternAgent::new(&table, int, vec!["b".into()], vec![]).unwrap(),
            Condition::Expr(b_is_zero()),
        )
        .unwrap();
    let mut rhs1: Net<AttrExpr> = Net::new();
    let r = rhs1.add_interface("r").unwrap();
    let p1 = rhs1.add_interface("p1").unwrap();
    rhs1.connect(r, p1).unwrap();
    let rule1 = Rule::new("gcd_Pair_1", lhs1, rhs1).unwrap();

    let lhs2 = base(&table)
        .extend(
            &table,
            "p2",
            PatternAgent::new(&table, int, vec!["b".into()], vec![]).unwrap(),
            Condition::Otherwise {
                negates: vec![b_is_zero()],
            },
        )
        .unwrap()
        .extend(
            &table,
            "p1",
            PatternAgent::new(&table, int, vec!["a".into()], vec![]).unwrap(),
            Condition::True,
        )
        .unwrap();
    let mut rhs2: Net<AttrExpr> = Net::new();
    let r = rhs2.add_interface("r").unwrap();
    let g = rhs2.add_agent(&table, gcd, vec![]).unwrap();
    let p = rhs2.add_agent(&table, pair, vec![]).unwrap();
    let ib = rhs2.add_agent(&table, int, vec![AttrExpr::var("b")]).unwrap();
    let im = rhs2
        .add_agent(
            &table,
            int,
            vec![AttrExpr::bin(BinOp::Mod, AttrExpr::var("a"), AttrExpr::var("b"))],
        )
        .unwrap();
    rhs2.connect(PortRef::aux(g, 1), r).unwrap();
    rhs2.connect(PortRef::principal(g), PortRef::principal(p)).unwrap();
    rhs2.connect(PortRef::aux(p, 1), PortRef::principal(ib)).unwrap();
    rhs2.connect(PortRef::aux(p, 2), PortRef::principal(im)).unwrap();
    let rule2 = Rule::new("gcd_Pair_2", lhs2, rhs2).unwrap();

    Fixture {
        rules: RuleSet::new(table, vec![rule1, rule2]),
    }
}

/// `r ~ gcd(Pair(Int(a), Int(b)))`.
pub fn gcd_net(table: &SymbolTable, a: i64, b: i64) -> Net<i64> {
    let gcd = table.lookup("gcd").unwrap();
    let pair = table.lookup("Pair").unwrap();
    let int = table.lookup("Int").unwrap();
    let mut net = Net::new();
    let r = net.add_interface("r").unwrap();
    let g = net.add_agent(table, gcd, vec![]).unwrap();
    let p = net.add_agent(table, pair, vec![]).unwrap();
    let ia = net.add_agent(table, int, vec![a]).unwrap();
    let ib = net.add_agent(table, int, vec![b]).unwrap();
    net.connect(PortRef::aux(g, 1), r).unwrap();
    net.connect(PortRef::principal(g), PortRef::principal(p)).unwrap();
    net.connect(PortRef::aux(p, 1), PortRef::principal(ia)).unwrap();
    net.connect(PortRef::aux(p, 2), PortRef::principal(ib)).unwrap();
    net
}

/// The lastElt rules over plain (all-true) NAPs:
///
/// 1. `<lastElt(r) >< Cons(j)(xs), xs - Nil> -> r ~ Int(j)`
/// 2. `<lastElt(r) >< Cons(j)(xs), xs - Cons(k)(ys)> -> r ~ lastElt(Cons(k)(ys))`
pub fn lastelt_fixture() -> Fixture {
    let mut table = SymbolTable::with_builtins();
    let last = table.declare("lastElt", 1, 0, TermKind::Fn).unwrap();
    let cons = table.lookup("Cons").unwrap();
    let nil = table.lookup("Nil").unwrap();
    let int = table.lookup("Int").unwrap();

    let base = |table: &SymbolTable| {
        ConditionalNap::pair(
            table,
            PatternAgent::new(table, last, vec![], vec!["r".into()]).unwrap(),
            PatternAgent::new(table, cons, vec!["j".into()], vec!["xs".into()]).unwrap(),
            Condition::True,
        )
        .unwrap()
    };

    let lhs1 = base(&table)
        .extend(
            &table,
            "xs",
            PatternAgent::new(&table, nil, vec![], vec![]).unwrap(),
            Condition::True,
        )
        .unwrap();
    let mut rhs1: Net<AttrExpr> = Net::new();
    let r = rhs1.add_interface("r").unwrap();
    let ij = rhs1.add_agent(&table, int, vec![AttrExpr::var("j")]).unwrap();
    rhs1.connect(r, PortRef::principal(ij)).unwrap();
    let rule1 = Rule::new("lastElt_Cons_1", lhs1, rhs1).unwrap();

    let lhs2 = base(&table)
        .extend(
            &table,
            "xs",
            PatternAgent::new(&table, cons, vec!["k".into()], vec!["ys".into()]).unwrap(),
            Condition::True,
        )
        .unwrap();
    let mut rhs2: Net<AttrExpr> = Net::new();
    let r = rhs2.add_interface("r").unwrap();
    let ys = rhs2.add_interface("ys").unwrap();
    let l = rhs2.add_agent(&table, last, vec![]).unwrap();
    let c = rhs2.add_agent(&table, cons, vec![AttrExpr::var("k")]).unwrap();
    rhs2.connect(PortRef::aux(l, 1), r).unwrap();
    rhs2.connect(PortRef::principal(l), PortRef::principal(c)).unwrap();
    rhs2.connect(PortRef::aux(c, 1), ys).unwrap();
    let rule2 = Rule::new("lastElt_Cons_2", lhs2, rhs2).unwrap();

    Fixture {
        rules: RuleSet::new(table, vec![rule1, rule2]),
    }
}

/// `r ~ lastElt([items...])`.
pub fn lastelt_net(table: &SymbolTable, items: &[i64]) -> Net<i64> {
    let last = table.lookup("lastElt").unwrap();
    let cons = table.lookup("Cons").unwrap();
    let nil = table.lookup("Nil").unwrap();
    let mut net = Net::new();
    let r = net.add_interface("r").unwrap();
    let l = net.add_agent(table, last, vec![]).unwrap();
    net.connect(PortRef::aux(l, 1), r).unwrap();
    let mut hole = PortRef::principal(l);
    for &x in items {
        let c = net.add_agent(table, cons, vec![x]).unwrap();
        net.connect(PortRef::principal(c), hole).unwrap();
        hole = PortRef::aux(c, 1);
    }
    let n = net.add_agent(table, nil, vec![]).unwrap();
    net.connect(PortRef::principal(n), hole).unwrap();
    net
}

/// The non-confluent map `f(0,y) = 0, f(x,0) = 1` over a pair, with `del`
/// erasing the unexamined integer. Its two rules probe different ports of the
/// same prefix, so the rule set is not local sequential.
pub fn por_fixture() -> Fixture {
    let mut table = SymbolTable::with_builtins();
    let f = table.declare("f", 1, 0, TermKind::Fn).unwrap();
    let pair = table.declare("Pair", 2, 0, TermKind::Data).unwrap();
    let del = table.declare("del", 0, 0, TermKind::Data).unwrap();
    let int = table.lookup("Int").unwrap();

    let base = |table: &SymbolTable| {
        ConditionalNap::pair(
            table,
            PatternAgent::new(table, f, vec![], vec!["r".into()]).unwrap(),
            PatternAgent::new(table, pair, vec![], vec!["x".into(), "y".into()]).unwrap(),
            Condition::True,
        )
        .unwrap()
    };

    // f(0, y) = 0: probe x.
    let lhs1 = base(&table)
        .extend(
            &table,
            "x",
            PatternAgent::new(&table, int, vec!["a".into()], vec![]).unwrap(),
            Condition::Expr(AttrExpr::bin(BinOp::Eq, AttrExpr::var("a"), AttrExpr::lit(0))),
        )
        .unwrap();
    let mut rhs1: Net<AttrExpr> = Net::new();
    let r = rhs1.add_interface("r").unwrap();
    let y = rhs1.add_interface("y").unwrap();
    let zero = rhs1.add_agent(&table, int, vec![AttrExpr::lit(0)]).unwrap();
    let d = rhs1.add_agent(&table, del, vec![]).unwrap();
    rhs1.connect(r, PortRef::principal(zero)).unwrap();
    rhs1.connect(y, PortRef::principal(d)).unwrap();
    let rule1 = Rule::new("f_Pair_1", lhs1, rhs1).unwrap();

    // f(x, 0) = 1: probe y.
    let lhs2 = base(&table)
        .extend(
            &table,
            "y",
            PatternAgent::new(&table, int, vec!["b".into()], vec![]).unwrap(),
            Condition::Expr(AttrExpr::bin(BinOp::Eq, AttrExpr::var("b"), AttrExpr::lit(0))),
        )
        .unwrap();
    let mut rhs2: Net<AttrExpr> = Net::new();
    let r = rhs2.add_interface("r").unwrap();
    let x = rhs2.add_interface("x").unwrap();
    let one = rhs2.add_agent(&table, int, vec![AttrExpr::lit(1)]).unwrap();
    let d = rhs2.add_agent(&table, del, vec![]).unwrap();
    rhs2.connect(r, PortRef::principal(one)).unwrap();
    rhs2.connect(x, PortRef::principal(d)).unwrap();
    let rule2 = Rule::new("f_Pair_2", lhs2, rhs2).unwrap();

    // del >< Int(i) -> (empty)
    let del_lhs = ConditionalNap::pair(
        &table,
        PatternAgent::new(&table, del, vec![], vec![]).unwrap(),
        PatternAgent::new(&table, int, vec!["i".into()], vec![]).unwrap(),
        Condition::True,
    )
    .unwrap();
    let del_rule = Rule::new("del_Int_1", del_lhs, Net::new()).unwrap();

    Fixture {
        rules: RuleSet::new(table, vec![rule1, rule2, del_rule]),
    }
}

/// `r ~ f(Pair(Int(a), Int(b)))`.
pub fn por_net(table: &SymbolTable, a: i64, b: i64) -> Net<i64> {
    let f = table.lookup("f").unwrap();
    let pair = table.lookup("Pair").unwrap();
    let int = table.lookup("Int").unwrap();
    let mut net = Net::new();
    let r = net.add_interface("r").unwrap();
    let g = net.add_agent(table, f, vec![]).unwrap();
    let p = net.add_agent(table, pair, vec![]).unwrap();
    let ia = net.add_agent(table, int, vec![a]).unwrap();
    let ib = net.add_agent(table, int, vec![b]).unwrap();
    net.connect(PortRef::aux(g, 1), r).unwrap();
    net.connect(PortRef::principal(g), PortRef::principal(p)).unwrap();
    net.connect(PortRef::aux(p, 1), PortRef::principal(ia)).unwrap();
    net.connect(PortRef::aux(p, 2), PortRef::principal(ib)).unwrap();
    net
}
