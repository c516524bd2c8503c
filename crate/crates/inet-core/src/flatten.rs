//! Flattening: translates rules on conditional NAPs into non-nested
//! conditional rules.
//!
//! Each connection of a pattern becomes one extra rule. The base pair is
//! rewritten into a fresh intermediate agent that captures the attribute
//! variables seen so far and carries the remaining pattern ports; the
//! connection's guard moves onto the new rule for the intermediate agent
//! against the connected symbol. Fresh symbols depend only on the pair and
//! the guard consumed, so rules sharing a pattern prefix share intermediate
//! agents across the whole rule set.

use std::collections::{BTreeMap, HashMap};

use crate::cnap::{rule_canon_eq, ConditionalNap, PatternAgent, Rule, RuleSet};
use crate::expr::{AttrExpr, Condition};
use crate::net::{Net, PortRef};
use crate::symbol::{SymbolId, SymbolTable, TermKind};

/// Identity of one flattening step: the base pair plus the canonical
/// serialization of the guard it consumes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreshSymbolKey {
    pub left: SymbolId,
    pub right: SymbolId,
    pub cond_fingerprint: String,
}

/// Short, stable digest used inside generated names (FNV-1a, 6 hex digits).
fn short_hash(s: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{:06x}", h & 0xff_ffff)
}

/// Canonical serialization of a condition relative to the base pair's
/// attribute variables (renamed to their introduction order, so spelling of
/// variables does not matter).
fn fingerprint(cond: &Condition, attr_map: &BTreeMap<String, String>) -> String {
    match cond {
        Condition::True => "tt".to_string(),
        Condition::Otherwise { negates } => {
            let parts: Vec<String> = negates
                .iter()
                .map(|e| format!("{:?}", e.rename(attr_map)))
                .collect();
            format!("ot[{}]", parts.join(","))
        }
        Condition::Expr(e) => format!("{:?}", e.rename(attr_map)),
    }
}

/// The short tag appearing in generated symbol names.
fn name_tag(cond: &Condition, print: &str) -> String {
    match cond {
        Condition::True => "tt".to_string(),
        Condition::Otherwise { .. } => "ot".to_string(),
        Condition::Expr(_) => short_hash(print),
    }
}

/// Shared fresh-symbol state for translating a whole rule set.
pub struct Translator {
    table: SymbolTable,
    fresh: HashMap<FreshSymbolKey, SymbolId>,
    introduced: Vec<SymbolId>,
}

impl Translator {
    pub fn new(table: SymbolTable) -> Translator {
        Translator {
            table,
            fresh: HashMap::new(),
            introduced: Vec::new(),
        }
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn into_parts(self) -> (SymbolTable, Vec<SymbolId>) {
        (self.table, self.introduced)
    }

    /// The intermediate symbol for rewriting `left >< right if cond`,
    /// carrying `attr_arity` captured attributes and `arity` pattern ports.
    /// Deterministic per key; suffixes avoid collisions with symbols that are
    /// already taken. Names record the consumed chain: the first step yields
    /// `left_right_tag`; later steps, whose left symbol is itself generated,
    /// append only the new guard's tag (`gcd_Pair_tt` then `gcd_Pair_tt_ot`).
    pub fn fresh_symbol(
        &mut self,
        key: FreshSymbolKey,
        cond: &Condition,
        arity: usize,
        attr_arity: usize,
    ) -> SymbolId {
        if let Some(&id) = self.fresh.get(&key) {
            return id;
        }
        let tag = name_tag(cond, &key.cond_fingerprint);
        let base = if self.introduced.contains(&key.left) {
            format!("{}_{}", self.table.name(key.left), tag)
        } else {
            format!(
                "{}_{}_{}",
                self.table.name(key.left),
                self.table.name(key.right),
                tag
            )
        };
        let mut candidate = base.clone();
        let mut n = 1;
        let id = loop {
            if !self.table.contains(&candidate) {
                break self
                    .table
                    .declare(&candidate, arity, attr_arity, TermKind::Data)
                    .expect("fresh name");
            }
            n += 1;
            candidate = format!("{}_{}", base, n);
        };
        self.fresh.insert(key, id);
        self.introduced.push(id);
        id
    }

    /// Structural recursion on the pattern: a rule with `k` connections
    /// yields `k + 1` non-nested conditional rules.
    pub fn translate_rule(&mut self, rule: &Rule) -> Vec<Rule> {
        let mut out = Vec::new();
        let mut current = rule.clone();
        loop {
            if current.lhs.connections.is_empty() {
                out.push(current);
                return out;
            }
            let (step, rest) = self.step(&current);
            out.push(step);
            current = rest;
        }
    }

    /// Emits the rule that rewrites the bare base pair into the intermediate
    /// agent, and returns the remainder rule rooted at that agent.
    fn step(&mut self, rule: &Rule) -> (Rule, Rule) {
        let lhs = &rule.lhs;
        let conn = &lhs.connections[0];

        // Attribute variables captured so far: left's, then right's.
        let captured: Vec<String> = lhs
            .left
            .attr_vars
            .iter()
            .chain(lhs.right.attr_vars.iter())
            .cloned()
            .collect();
        // Ports the intermediate agent keeps: the base's free ports except
        // the one the connection consumes.
        let carried: Vec<String> = lhs
            .left
            .port_vars
            .iter()
            .chain(lhs.right.port_vars.iter())
            .filter(|p| **p != conn.at_port)
            .cloned()
            .collect();

        let attr_map: BTreeMap<String, String> = captured
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), format!("v{}", i)))
            .collect();
        let key = FreshSymbolKey {
            left: lhs.left.symbol,
            right: lhs.right.symbol,
            cond_fingerprint: fingerprint(&lhs.cond, &attr_map),
        };
        let kappa = self.fresh_symbol(key, &lhs.cond, carried.len(), captured.len());

        // Step rule: (left >< right if cond) -> kappa plugged onto the
        // connection's port, carrying every base port and attribute.
        let base_lhs = ConditionalNap::pair(
            &self.table,
            lhs.left.clone(),
            lhs.right.clone(),
            lhs.cond.clone(),
        )
        .expect("base of a valid pattern");
        let mut m: Net<AttrExpr> = Net::new();
        let attrs = captured.iter().map(|v| AttrExpr::var(v)).collect();
        let k = m.add_agent(&self.table, kappa, attrs).expect("arities match");
        let mut iface: BTreeMap<String, PortRef> = BTreeMap::new();
        for name in base_lhs.free_ports() {
            iface.insert(name.clone(), m.add_interface(&name).expect("distinct"));
        }
        m.connect(PortRef::principal(k), iface[&conn.at_port])
            .expect("fresh ports");
        for (i, name) in carried.iter().enumerate() {
            m.connect(PortRef::aux(k, i + 1), iface[name]).expect("fresh ports");
        }
        let step_rule = Rule::new(
            format!("{}_step", rule.name),
            base_lhs,
            m,
        )
        .expect("step rule is well-formed");

        // Remainder: the pattern rooted at kappa >< connected agent, with the
        // connection's guard as its base condition and the original
        // right-hand side unchanged.
        let kappa_pattern = PatternAgent::new(&self.table, kappa, captured, carried)
            .expect("arities match");
        let mut rest_lhs = ConditionalNap::pair(
            &self.table,
            kappa_pattern,
            conn.agent.clone(),
            conn.cond.clone(),
        )
        .expect("names stay distinct");
        for c in &lhs.connections[1..] {
            rest_lhs = rest_lhs
                .extend(&self.table, &c.at_port, c.agent.clone(), c.cond.clone())
                .expect("ports stay free");
        }
        let rest_rule = Rule {
            name: rule.name.clone(),
            lhs: rest_lhs,
            rhs: rule.rhs.clone(),
        };
        (step_rule, rest_rule)
    }
}

/// Translates every rule, sharing intermediate symbols across the set and
/// merging the duplicate step rules that shared prefixes produce. Returns
/// the flat rule set (over the extended symbol table) and the introduced
/// symbols.
pub fn translate_ruleset(rs: &RuleSet) -> (RuleSet, Vec<SymbolId>) {
    let mut tr = Translator::new(rs.symbols().clone());
    let mut flat: Vec<Rule> = Vec::new();
    for rule in rs.rules() {
        for candidate in tr.translate_rule(rule) {
            let dup = flat.iter().any(|kept| rule_canon_eq(kept, &candidate, tr.table()));
            if !dup {
                flat.push(candidate);
            }
        }
    }
    // Name flat rules by their pair, in emission order.
    let mut ordinals: HashMap<(SymbolId, SymbolId), usize> = HashMap::new();
    for r in flat.iter_mut() {
        let pair = (r.lhs.left.symbol, r.lhs.right.symbol);
        let n = ordinals.entry(pair).or_insert(0);
        *n += 1;
        r.name = format!(
            "{}_{}_{}",
            tr.table().name(pair.0),
            tr.table().name(pair.1),
            n
        );
    }
    let (table, introduced) = tr.into_parts();
    (RuleSet::new(table, flat), introduced)
}
