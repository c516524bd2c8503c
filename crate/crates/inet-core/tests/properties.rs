//! Property suites: expression laws, isomorphism as an equivalence relation
//! checked against a brute-force oracle, active-pair stability under id
//! renaming, and the AllSub cardinality law.

use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use inet_core::cnap::{ConditionalNap, PatternAgent};
use inet_core::expr::{eval, is_true, AttrExpr, BinOp, Condition, Env};
use inet_core::iso::iso;
use inet_core::net::{ActivePair, AgentId, Net, PortRef};
use inet_core::symbol::{SymbolTable, TermKind};

fn pool() -> SymbolTable {
    let mut t = SymbolTable::with_builtins();
    t.declare("F", 2, 0, TermKind::Fn).unwrap();
    t.declare("G", 1, 0, TermKind::Fn).unwrap();
    t.declare("C", 1, 1, TermKind::Data).unwrap();
    t.declare("D", 2, 0, TermKind::Data).unwrap();
    t.declare("K", 0, 0, TermKind::Data).unwrap();
    t
}

/// A random net: agents from the pool, ports paired off randomly, a few
/// left free as named interface ports.
fn random_net(table: &SymbolTable, rng: &mut ChaCha8Rng, max_agents: usize) -> Net<i64> {
    let ids: Vec<_> = table.ids().collect();
    let n = rng.gen_range(1..=max_agents);
    let mut net = Net::new();
    let mut ports: Vec<PortRef> = Vec::new();
    for _ in 0..n {
        let sym = ids[rng.gen_range(0..ids.len())];
        let attrs = (0..table.attr_arity(sym)).map(|_| rng.gen_range(-3..=3)).collect();
        let id = net.add_agent(table, sym, attrs).unwrap();
        for slot in 0..=table.arity(sym) {
            ports.push(PortRef::Agent { id, slot });
        }
    }
    // Shuffle and pair; a random prefix becomes interface ports.
    for i in (1..ports.len()).rev() {
        let j = rng.gen_range(0..=i);
        ports.swap(i, j);
    }
    let free = rng.gen_range(0..=ports.len().min(3));
    for (k, port) in ports.iter().take(free).enumerate() {
        let iface = net.add_interface(&format!("i{}", k)).unwrap();
        net.connect(iface, *port).unwrap();
    }
    let rest = &ports[free..];
    for pair in rest.chunks(2) {
        if let [a, b] = pair {
            net.connect(*a, *b).unwrap();
        }
    }
    net
}

/// Rebuilds `net` with agents inserted in a permuted order, preserving
/// structure: the result must be isomorphic.
fn permuted_copy(table: &SymbolTable, net: &Net<i64>, rng: &mut ChaCha8Rng) -> Net<i64> {
    let mut ids: Vec<AgentId> = net.agents().map(|(id, _)| id).collect();
    for i in (1..ids.len()).rev() {
        let j = rng.gen_range(0..=i);
        ids.swap(i, j);
    }
    let mut out = Net::new();
    let mut map = HashMap::new();
    for &id in &ids {
        let agent = net.agent(id).unwrap();
        map.insert(id, out.add_agent(table, agent.symbol, agent.attrs.clone()).unwrap());
    }
    for name in net.interface() {
        out.add_interface(name).unwrap();
    }
    for (a, b) in net.wire_pairs() {
        let remap = |p: PortRef| match p {
            PortRef::Agent { id, slot } => PortRef::Agent { id: map[&id], slot },
            PortRef::Iface(i) => PortRef::Iface(i),
        };
        out.connect(remap(a), remap(b)).unwrap();
    }
    out
}

/// Exhaustive bijection search; independent of the library's pruned search.
fn brute_force_iso(a: &Net<i64>, b: &Net<i64>) -> bool {
    if a.agent_count() != b.agent_count() {
        return false;
    }
    let mut names_a: Vec<&String> = a.interface().iter().collect();
    let mut names_b: Vec<&String> = b.interface().iter().collect();
    names_a.sort();
    names_b.sort();
    if names_a != names_b {
        return false;
    }
    let ids_a: Vec<AgentId> = a.agents().map(|(id, _)| id).collect();
    let ids_b: Vec<AgentId> = b.agents().map(|(id, _)| id).collect();

    fn check(a: &Net<i64>, b: &Net<i64>, map: &HashMap<AgentId, AgentId>) -> bool {
        for (id, agent) in a.agents() {
            let other = b.agent(map[&id]).unwrap();
            if agent.symbol != other.symbol || agent.attrs != other.attrs {
                return false;
            }
            for slot in 0..=agent.arity {
                let pa = a.partner(PortRef::Agent { id, slot });
                let pb = b.partner(PortRef::Agent { id: map[&id], slot });
                let expect = match pa {
                    None => None,
                    Some(PortRef::Agent { id: q, slot: s }) => {
                        Some(PortRef::Agent { id: map[&q], slot: s })
                    }
                    Some(PortRef::Iface(i)) => {
                        let name = &a.interface()[i];
                        b.interface().iter().position(|n| n == name).map(PortRef::Iface)
                    }
                };
                if pb != expect {
                    return false;
                }
            }
        }
        true
    }

    fn permute(
        a: &Net<i64>,
        b: &Net<i64>,
        ids_a: &[AgentId],
        ids_b: &[AgentId],
        used: &mut Vec<bool>,
        map: &mut HashMap<AgentId, AgentId>,
        k: usize,
    ) -> bool {
        if k == ids_a.len() {
            return check(a, b, map);
        }
        for i in 0..ids_b.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            map.insert(ids_a[k], ids_b[i]);
            if permute(a, b, ids_a, ids_b, used, map, k + 1) {
                return true;
            }
            used[i] = false;
        }
        false
    }

    let mut used = vec![false; ids_b.len()];
    let mut map = HashMap::new();
    permute(a, b, &ids_a, &ids_b, &mut used, &mut map, 0)
}

#[test]
fn iso_is_an_equivalence_relation_on_random_nets() {
    let table = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let net = random_net(&table, &mut rng, 8);
        let b = permuted_copy(&table, &net, &mut rng);
        let c = permuted_copy(&table, &b, &mut rng);
        // Reflexive, symmetric, transitive along the permutation chain.
        assert!(iso(&net, &net));
        assert!(iso(&net, &b));
        assert!(iso(&b, &net));
        assert!(iso(&b, &c));
        assert!(iso(&net, &c));
    }
}

#[test]
fn iso_agrees_with_the_brute_force_oracle() {
    let table = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..200 {
        let a = random_net(&table, &mut rng, 5);
        let b = if round % 2 == 0 {
            permuted_copy(&table, &a, &mut rng)
        } else {
            random_net(&table, &mut rng, 5)
        };
        assert_eq!(
            iso(&a, &b),
            brute_force_iso(&a, &b),
            "disagreement on round {}",
            round
        );
    }
}

#[test]
fn changing_an_attribute_breaks_iso() {
    let table = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tested = 0;
    while tested < 100 {
        let net = random_net(&table, &mut rng, 6);
        let Some((victim, _)) = net.agents().find(|(_, a)| !a.attrs.is_empty()) else {
            continue;
        };
        let mut out = Net::new();
        let mut map = HashMap::new();
        for (aid, a) in net.agents() {
            let mut attrs = a.attrs.clone();
            if aid == victim {
                attrs[0] = attrs[0].wrapping_add(1);
            }
            map.insert(aid, out.add_agent(&table, a.symbol, attrs).unwrap());
        }
        for name in net.interface() {
            out.add_interface(name).unwrap();
        }
        for (x, y) in net.wire_pairs() {
            let remap = |p: PortRef| match p {
                PortRef::Agent { id, slot } => PortRef::Agent { id: map[&id], slot },
                PortRef::Iface(i) => PortRef::Iface(i),
            };
            out.connect(remap(x), remap(y)).unwrap();
        }
        assert!(!iso(&net, &out), "attr change must break iso");
        tested += 1;
    }
}

#[test]
fn active_pairs_stable_under_id_renaming() {
    let table = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let net = random_net(&table, &mut rng, 8);
        let copy = permuted_copy(&table, &net, &mut rng);
        // Compare as multisets of symbol pairs, the id-free view.
        let view = |n: &Net<i64>| {
            let mut pairs: Vec<(u32, u32)> = n
                .find_active_pairs()
                .iter()
                .map(|ActivePair { left, right }| {
                    let a = n.agent(*left).unwrap().symbol.0;
                    let b = n.agent(*right).unwrap().symbol.0;
                    (a.min(b), a.max(b))
                })
                .collect();
            pairs.sort();
            pairs
        };
        assert_eq!(view(&net), view(&copy));
    }
}

// Expression properties.

fn arb_expr(depth: u32) -> BoxedStrategy<AttrExpr> {
    if depth == 0 {
        prop_oneof![
            (-20i64..=20).prop_map(AttrExpr::Lit),
            prop_oneof![Just("a"), Just("b"), Just("c")]
                .prop_map(|v| AttrExpr::Var(v.to_string())),
        ]
        .boxed()
    } else {
        let sub = arb_expr(depth - 1);
        prop_oneof![
            arb_expr(0),
            sub.clone().prop_map(AttrExpr::neg),
            sub.clone().prop_map(AttrExpr::not),
            (
                prop_oneof![
                    Just(BinOp::Add),
                    Just(BinOp::Sub),
                    Just(BinOp::Mul),
                    Just(BinOp::Eq),
                    Just(BinOp::Ne),
                    Just(BinOp::Lt),
                    Just(BinOp::Le),
                    Just(BinOp::Gt),
                    Just(BinOp::Ge),
                    Just(BinOp::And),
                    Just(BinOp::Or),
                ],
                sub.clone(),
                sub
            )
                .prop_map(|(op, a, b)| AttrExpr::bin(op, a, b)),
        ]
        .boxed()
    }
}

proptest! {
    #[test]
    fn division_identity(a in any::<i64>(), b in any::<i64>().prop_filter("nonzero", |b| *b != 0)) {
        let e = inet_core::text::parser::parse_expr_str("(a / b) * b + (a mod b)").unwrap();
        let env: Env = [("a".to_string(), a), ("b".to_string(), b)].into_iter().collect();
        prop_assert_eq!(eval(&e, &env), Ok(a));
    }

    #[test]
    fn not_is_an_involution_on_truth(e in arb_expr(3), a in -5i64..=5, b in -5i64..=5, c in -5i64..=5) {
        let env: Env = [
            ("a".to_string(), a),
            ("b".to_string(), b),
            ("c".to_string(), c),
        ]
        .into_iter()
        .collect();
        // Division-free generators keep evaluation total.
        let v = eval(&e, &env).unwrap();
        let notted = eval(&AttrExpr::not(e.clone()), &env).unwrap();
        prop_assert_eq!(is_true(notted), !is_true(v));
        let e2 = AttrExpr::not(AttrExpr::not(e));
        prop_assert_eq!(is_true(eval(&e2, &env).unwrap()), is_true(v));
    }

    #[test]
    fn eval_is_deterministic(e in arb_expr(3), a in -5i64..=5, b in -5i64..=5, c in -5i64..=5) {
        let env: Env = [
            ("a".to_string(), a),
            ("b".to_string(), b),
            ("c".to_string(), c),
        ]
        .into_iter()
        .collect();
        prop_assert_eq!(eval(&e, &env), eval(&e, &env));
    }

    #[test]
    fn expr_display_reparses(e in arb_expr(3)) {
        let printed = e.to_string();
        let reparsed = inet_core::text::parser::parse_expr_str(&printed)
            .unwrap_or_else(|err| panic!("`{}` failed to reparse: {}", printed, err));
        prop_assert_eq!(e, reparsed);
    }
}

/// Builds a random conditional NAP with `k` connections and checks the
/// AllSub cardinality law.
#[test]
fn all_sub_has_one_entry_per_prefix() {
    let table = pool();
    let f = table.lookup("F").unwrap();
    let d = table.lookup("D").unwrap();
    let c = table.lookup("C").unwrap();
    let k_sym = table.lookup("K").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let mut fresh = 0;
        let mut names = || {
            fresh += 1;
            format!("p{}", fresh)
        };
        let mut nap = ConditionalNap::pair(
            &table,
            PatternAgent::new(&table, f, vec![], vec![names(), names()]).unwrap(),
            PatternAgent::new(&table, d, vec![], vec![names(), names()]).unwrap(),
            Condition::True,
        )
        .unwrap();
        let want = rng.gen_range(0..5);
        let mut added = 0;
        for _ in 0..want {
            let free = nap.free_ports();
            if free.is_empty() {
                break;
            }
            let at = free[rng.gen_range(0..free.len())].clone();
            let agent = if rng.gen_bool(0.5) {
                fresh += 1;
                PatternAgent::new(&table, c, vec![format!("v{}", fresh)], vec![{
                    fresh += 1;
                    format!("p{}", fresh)
                }])
                .unwrap()
            } else {
                PatternAgent::new(&table, k_sym, vec![], vec![]).unwrap()
            };
            nap = nap.extend(&table, &at, agent, Condition::True).unwrap();
            added += 1;
        }
        let subs = nap.all_sub();
        assert_eq!(subs.len(), added + 1);
        assert_eq!(subs.last().unwrap(), &nap);
        for (i, sub) in subs.iter().enumerate() {
            assert_eq!(sub.connections.len(), i);
        }
    }
}
