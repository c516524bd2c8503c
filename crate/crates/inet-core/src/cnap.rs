//! Conditional nested active pairs (NAPs) and rules over them.
//!
//! A conditional NAP is built inductively: the base is an active pair with a
//! guard, and each step attaches one agent by its principal port to a port
//! that is still free in the pattern so far, again under a guard. The
//! connection order is significant: it is the sequential order in which the
//! matcher probes the net, and the order the static checks reason about.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::expr::{AttrExpr, Condition, Env, EvalError};
use crate::net::{Net, PortRef};
use crate::symbol::{SymbolId, SymbolTable};

/// One agent occurrence in a pattern: a symbol with variables for its
/// attribute slots and names for its auxiliary ports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternAgent {
    pub symbol: SymbolId,
    pub attr_vars: Vec<String>,
    pub port_vars: Vec<String>,
}

impl PatternAgent {
    pub fn new(
        table: &SymbolTable,
        symbol: SymbolId,
        attr_vars: Vec<String>,
        port_vars: Vec<String>,
    ) -> Result<PatternAgent, NapError> {
        let sym = table.get(symbol);
        if attr_vars.len() != sym.attr_arity {
            return Err(NapError::AttrVarCount {
                symbol: sym.name.clone(),
                expected: sym.attr_arity,
                got: attr_vars.len(),
            });
        }
        if port_vars.len() != sym.arity {
            return Err(NapError::PortVarCount {
                symbol: sym.name.clone(),
                expected: sym.arity,
                got: port_vars.len(),
            });
        }
        Ok(PatternAgent {
            symbol,
            attr_vars,
            port_vars,
        })
    }
}

/// `z - γ(w...) if c`: an agent attached by its principal port to the free
/// pattern port `z`, guarded by `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub at_port: String,
    pub agent: PatternAgent,
    pub cond: Condition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalNap {
    pub left: PatternAgent,
    pub right: PatternAgent,
    pub cond: Condition,
    pub connections: Vec<Connection>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NapError {
    #[error("symbol `{symbol}` has {expected} attribute slot(s), pattern binds {got}")]
    AttrVarCount {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("symbol `{symbol}` has {expected} auxiliary port(s), pattern names {got}")]
    PortVarCount {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("attribute variable `{0}` is bound more than once in the pattern")]
    DuplicateAttrVar(String),
    #[error("port name `{0}` is used more than once in the pattern")]
    DuplicatePortVar(String),
    #[error("`{0}` is used both as a port name and an attribute variable")]
    NameClash(String),
    #[error("port `{0}` is not a free port of the pattern")]
    PortNotFree(String),
    #[error("condition uses `{0}`, which is not an attribute variable of the pattern")]
    UnboundCondVar(String),
}

impl ConditionalNap {
    /// The base case: a conditional active pair.
    pub fn pair(
        table: &SymbolTable,
        left: PatternAgent,
        right: PatternAgent,
        cond: Condition,
    ) -> Result<ConditionalNap, NapError> {
        let nap = ConditionalNap {
            left,
            right,
            cond,
            connections: Vec::new(),
        };
        nap.validate_names(table)?;
        Ok(nap)
    }

    /// The step case: attach `agent` at the free port `at_port` under `cond`.
    pub fn extend(
        mut self,
        table: &SymbolTable,
        at_port: &str,
        agent: PatternAgent,
        cond: Condition,
    ) -> Result<ConditionalNap, NapError> {
        if !self.free_ports().iter().any(|p| p == at_port) {
            return Err(NapError::PortNotFree(at_port.to_string()));
        }
        self.connections.push(Connection {
            at_port: at_port.to_string(),
            agent,
            cond,
        });
        self.validate_names(table)?;
        Ok(self)
    }

    fn validate_names(&self, _table: &SymbolTable) -> Result<(), NapError> {
        let mut ports = BTreeSet::new();
        let mut attrs = BTreeSet::new();
        let check =
            |agent: &PatternAgent, ports: &mut BTreeSet<String>, attrs: &mut BTreeSet<String>| {
                for v in &agent.attr_vars {
                    if !attrs.insert(v.clone()) {
                        return Err(NapError::DuplicateAttrVar(v.clone()));
                    }
                }
                for p in &agent.port_vars {
                    if !ports.insert(p.clone()) {
                        return Err(NapError::DuplicatePortVar(p.clone()));
                    }
                }
                Ok(())
            };
        check(&self.left, &mut ports, &mut attrs)?;
        check(&self.right, &mut ports, &mut attrs)?;
        for c in &self.connections {
            check(&c.agent, &mut ports, &mut attrs)?;
        }
        if let Some(clash) = ports.intersection(&attrs).next() {
            return Err(NapError::NameClash(clash.clone()));
        }
        // Conditions may only mention attribute variables introduced by the
        // prefix up to and including their own connection.
        let mut scope: BTreeSet<String> = self
            .left
            .attr_vars
            .iter()
            .chain(self.right.attr_vars.iter())
            .cloned()
            .collect();
        for v in self.cond.free_vars() {
            if !scope.contains(&v) {
                return Err(NapError::UnboundCondVar(v));
            }
        }
        for c in &self.connections {
            scope.extend(c.agent.attr_vars.iter().cloned());
            for v in c.cond.free_vars() {
                if !scope.contains(&v) {
                    return Err(NapError::UnboundCondVar(v));
                }
            }
        }
        Ok(())
    }

    /// Port names in introduction order paired with whether a connection has
    /// consumed them.
    fn port_intro(&self) -> Vec<(String, bool)> {
        let consumed: BTreeSet<&String> = self.connections.iter().map(|c| &c.at_port).collect();
        let mut out = Vec::new();
        let push = |names: &[String], out: &mut Vec<(String, bool)>| {
            for n in names {
                out.push((n.clone(), consumed.contains(n)));
            }
        };
        push(&self.left.port_vars, &mut out);
        push(&self.right.port_vars, &mut out);
        for c in &self.connections {
            push(&c.agent.port_vars, &mut out);
        }
        out
    }

    /// The free port names of the pattern, in introduction order. These are
    /// the names a rule right-hand side must expose as its interface.
    pub fn free_ports(&self) -> Vec<String> {
        self.port_intro()
            .into_iter()
            .filter(|(_, consumed)| !consumed)
            .map(|(n, _)| n)
            .collect()
    }

    /// Attribute variables in introduction order.
    pub fn attr_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        out.extend(self.left.attr_vars.iter().cloned());
        out.extend(self.right.attr_vars.iter().cloned());
        for c in &self.connections {
            out.extend(c.agent.attr_vars.iter().cloned());
        }
        out
    }

    /// The same pattern with every guard replaced by `true`.
    pub fn drop_conditions(&self) -> ConditionalNap {
        ConditionalNap {
            left: self.left.clone(),
            right: self.right.clone(),
            cond: Condition::True,
            connections: self
                .connections
                .iter()
                .map(|c| Connection {
                    at_port: c.at_port.clone(),
                    agent: c.agent.clone(),
                    cond: Condition::True,
                })
                .collect(),
        }
    }

    /// All prefixes of the pattern under the sub-NAP relation: the base pair
    /// plus each extension by the next connection. Always `1 + k` patterns
    /// for `k` connections, ending with the pattern itself.
    pub fn all_sub(&self) -> Vec<ConditionalNap> {
        let mut out = Vec::with_capacity(self.connections.len() + 1);
        for k in 0..=self.connections.len() {
            out.push(ConditionalNap {
                left: self.left.clone(),
                right: self.right.clone(),
                cond: self.cond.clone(),
                connections: self.connections[..k].to_vec(),
            });
        }
        out
    }

    /// Whether every guard evaluates to true under `env`.
    pub fn available(&self, env: &Env) -> Result<bool, EvalError> {
        if !self.cond.holds(env)? {
            return Ok(false);
        }
        for c in &self.connections {
            if !c.cond.holds(env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Builds the condition-dropped pattern as a ground net, reading attribute
    /// values from `env`. Free pattern ports become interface ports of the
    /// same name, in introduction order.
    pub fn instantiate(&self, table: &SymbolTable, env: &Env) -> Result<Net<i64>, EvalError> {
        let mut net = Net::new();
        let mut port_of: HashMap<String, PortRef> = HashMap::new();
        let add = |net: &mut Net<i64>,
                       agent: &PatternAgent,
                       port_of: &mut HashMap<String, PortRef>|
         -> Result<crate::net::AgentId, EvalError> {
            let attrs = agent
                .attr_vars
                .iter()
                .map(|v| env.get(v).copied().ok_or_else(|| EvalError::Unbound(v.clone())))
                .collect::<Result<Vec<i64>, EvalError>>()?;
            let id = net
                .add_agent(table, agent.symbol, attrs)
                .expect("pattern agents respect arities");
            for (k, name) in agent.port_vars.iter().enumerate() {
                port_of.insert(name.clone(), PortRef::aux(id, k + 1));
            }
            Ok(id)
        };
        let l = add(&mut net, &self.left, &mut port_of)?;
        let r = add(&mut net, &self.right, &mut port_of)?;
        net.connect(PortRef::principal(l), PortRef::principal(r))
            .expect("fresh principals");
        for c in &self.connections {
            let id = add(&mut net, &c.agent, &mut port_of)?;
            let at = port_of[&c.at_port];
            net.connect(PortRef::principal(id), at).expect("free pattern port");
        }
        for name in self.free_ports() {
            let iface = net.add_interface(&name).expect("distinct port names");
            net.connect(iface, port_of[&name]).expect("free pattern port");
        }
        Ok(net)
    }

    /// Oriented canonical views of the pattern: base symbols ordered by name,
    /// both orders when the base pair is symmetric. Connection data is
    /// rewritten to positional form so that views compare independently of
    /// the notation's variable names.
    pub fn canon_views(&self, table: &SymbolTable) -> Vec<CanonNap> {
        let lname = table.name(self.left.symbol);
        let rname = table.name(self.right.symbol);
        if lname == rname && self.left.symbol == self.right.symbol {
            vec![self.canon_with(false), self.canon_with(true)]
        } else if lname <= rname {
            vec![self.canon_with(false)]
        } else {
            vec![self.canon_with(true)]
        }
    }

    fn canon_with(&self, flip: bool) -> CanonNap {
        self.canon_with_maps(flip).0
    }

    /// The canonical view together with the variable maps it used:
    /// attribute names to `v0, v1, ...` and port names to their introduction
    /// index.
    pub fn canon_with_maps(
        &self,
        flip: bool,
    ) -> (CanonNap, BTreeMap<String, String>, BTreeMap<String, usize>) {
        let (first, second) = if flip {
            (&self.right, &self.left)
        } else {
            (&self.left, &self.right)
        };
        let mut port_index: BTreeMap<String, usize> = BTreeMap::new();
        let mut attr_map: BTreeMap<String, String> = BTreeMap::new();
        let intro = |agent: &PatternAgent,
                         port_index: &mut BTreeMap<String, usize>,
                         attr_map: &mut BTreeMap<String, String>| {
            for v in &agent.attr_vars {
                let n = attr_map.len();
                attr_map.entry(v.clone()).or_insert_with(|| format!("v{}", n));
            }
            for p in &agent.port_vars {
                let n = port_index.len();
                port_index.entry(p.clone()).or_insert(n);
            }
        };
        intro(first, &mut port_index, &mut attr_map);
        intro(second, &mut port_index, &mut attr_map);
        let mut connections = Vec::new();
        for c in &self.connections {
            let at = port_index[&c.at_port];
            intro(&c.agent, &mut port_index, &mut attr_map);
            connections.push(CanonConnection {
                at_port: at,
                symbol: c.agent.symbol,
                cond: c.cond.rename(&attr_map),
            });
        }
        let canon = CanonNap {
            base: (first.symbol, second.symbol),
            flipped: flip,
            cond: self.cond.rename(&attr_map),
            connections,
        };
        (canon, attr_map, port_index)
    }

    /// A canonical key: equal exactly for patterns that are the same up to
    /// variable renaming and base orientation.
    pub fn canon_key(&self, table: &SymbolTable) -> String {
        self.canon_views(table)
            .into_iter()
            .map(|v| v.render())
            .min()
            .expect("at least one view")
    }

    /// Textual form for diagnostics, e.g.
    /// `<gcd(r) >< Pair(p1, p2), p2 - Int(b) if b == 0>`.
    pub fn render(&self, table: &SymbolTable) -> String {
        let agent = |a: &PatternAgent| {
            let mut s = table.name(a.symbol).to_string();
            if !a.attr_vars.is_empty() {
                s.push_str(&format!("({})", a.attr_vars.join(", ")));
            }
            if !a.port_vars.is_empty() {
                s.push_str(&format!("({})", a.port_vars.join(", ")));
            }
            s
        };
        let guard = |c: &Condition| match c {
            Condition::True => String::new(),
            other => format!(" if {}", other),
        };
        let mut s = format!(
            "<{} >< {}{}",
            agent(&self.left),
            agent(&self.right),
            guard(&self.cond)
        );
        for c in &self.connections {
            s.push_str(&format!(
                ", {} - {}{}",
                c.at_port,
                agent(&c.agent),
                guard(&c.cond)
            ));
        }
        s.push('>');
        s
    }
}

/// A positional rendering of a NAP under one base orientation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonNap {
    pub base: (SymbolId, SymbolId),
    pub flipped: bool,
    pub cond: Condition,
    pub connections: Vec<CanonConnection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonConnection {
    /// Index of the probed port in the pattern's port introduction order.
    pub at_port: usize,
    pub symbol: SymbolId,
    pub cond: Condition,
}

impl CanonNap {
    pub fn render(&self) -> String {
        let mut s = format!(
            "{}|{}|{:?}",
            (self.base.0).0,
            (self.base.1).0,
            self.cond
        );
        for c in &self.connections {
            s.push_str(&format!(";{}@{}:{:?}", (c.symbol).0, c.at_port, c.cond));
        }
        s
    }
}

/// Availability-preserving structural subnet check.
///
/// `a` is a subnet of `b` when the condition-dropped pattern of `a` is a
/// prefix of `b`'s (same base pair up to orientation, connections identical
/// along the same ports), and every guard of `a` either is `true` or appears
/// verbatim (up to variable renaming) at the matching position of `b`, so
/// that `b` being available forces `a` to be available. Implication beyond
/// this syntactic criterion is not decided; such pairs simply report `false`.
pub fn subnet(a: &ConditionalNap, b: &ConditionalNap, table: &SymbolTable) -> bool {
    for va in a.canon_views(table) {
        for vb in b.canon_views(table) {
            if va.base != vb.base || va.connections.len() > vb.connections.len() {
                continue;
            }
            let drop_ok = va
                .connections
                .iter()
                .zip(vb.connections.iter())
                .all(|(x, y)| x.at_port == y.at_port && x.symbol == y.symbol);
            if !drop_ok {
                continue;
            }
            let cond_ok = |ca: &Condition, cb: &Condition| ca == &Condition::True || ca == cb;
            if !cond_ok(&va.cond, &vb.cond) {
                continue;
            }
            if va
                .connections
                .iter()
                .zip(vb.connections.iter())
                .all(|(x, y)| cond_ok(&x.cond, &y.cond))
            {
                return true;
            }
        }
    }
    false
}

/// Evaluates a rule right-hand-side template to a ground net under `env`.
/// Interface names carry over unchanged.
pub fn instantiate_template(
    net: &Net<AttrExpr>,
    table: &SymbolTable,
    env: &Env,
) -> Result<Net<i64>, EvalError> {
    let mut out: Net<i64> = Net::new();
    let mut agent_map: BTreeMap<crate::net::AgentId, crate::net::AgentId> = BTreeMap::new();
    for (id, agent) in net.agents() {
        let attrs = agent
            .attrs
            .iter()
            .map(|e| crate::expr::eval(e, env))
            .collect::<Result<Vec<i64>, EvalError>>()?;
        agent_map.insert(id, out.add_agent(table, agent.symbol, attrs).expect("same symbols"));
    }
    for name in net.interface() {
        out.add_interface(name).expect("distinct names");
    }
    for (a, b) in net.wire_pairs() {
        let remap = |p: PortRef| match p {
            PortRef::Agent { id, slot } => PortRef::Agent {
                id: agent_map[&id],
                slot,
            },
            PortRef::Iface(i) => PortRef::Iface(i),
        };
        out.connect(remap(a), remap(b)).expect("wires stay valid");
    }
    Ok(out)
}

/// Rebuilds a rule template with attribute variables and interface names
/// renamed; agents keep their relative order.
fn rename_template(
    net: &Net<AttrExpr>,
    table: &SymbolTable,
    attr_map: &BTreeMap<String, String>,
    port_map: &BTreeMap<String, usize>,
) -> Net<AttrExpr> {
    let mut out: Net<AttrExpr> = Net::new();
    let mut agent_map: BTreeMap<crate::net::AgentId, crate::net::AgentId> = BTreeMap::new();
    for (id, agent) in net.agents() {
        let attrs = agent.attrs.iter().map(|e| e.rename(attr_map)).collect();
        let new = out.add_agent(table, agent.symbol, attrs).expect("same symbols");
        agent_map.insert(id, new);
    }
    for name in net.interface() {
        let canon = match port_map.get(name) {
            Some(ix) => format!("p{}", ix),
            None => name.clone(),
        };
        out.add_interface(&canon).expect("distinct names stay distinct");
    }
    for (a, b) in net.wire_pairs() {
        let remap = |p: PortRef| match p {
            PortRef::Agent { id, slot } => PortRef::Agent {
                id: agent_map[&id],
                slot,
            },
            PortRef::Iface(i) => PortRef::Iface(i),
        };
        out.connect(remap(a), remap(b)).expect("wires stay valid");
    }
    out
}

/// Structural equality of rules modulo variable renaming and base
/// orientation: the patterns must have equal canonical views and the
/// right-hand sides must be isomorphic after canonical renaming.
pub fn rule_canon_eq(a: &Rule, b: &Rule, table: &SymbolTable) -> bool {
    // Canonically oriented views, exactly as `canon_views` picks them.
    let triples = |r: &Rule| {
        let lname = table.name(r.lhs.left.symbol);
        let rname = table.name(r.lhs.right.symbol);
        if r.lhs.left.symbol == r.lhs.right.symbol {
            vec![r.lhs.canon_with_maps(false), r.lhs.canon_with_maps(true)]
        } else if lname <= rname {
            vec![r.lhs.canon_with_maps(false)]
        } else {
            vec![r.lhs.canon_with_maps(true)]
        }
    };
    for (va, ama, pma) in triples(a) {
        for (vb, amb, pmb) in triples(b) {
            if va.base != vb.base || va.cond != vb.cond || va.connections != vb.connections {
                continue;
            }
            let ra = rename_template(&a.rhs, table, &ama, &pma);
            let rb = rename_template(&b.rhs, table, &amb, &pmb);
            if crate::iso::iso(&ra, &rb) {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error(transparent)]
    Nap(#[from] NapError),
    #[error("rule `{rule}`: right-hand side interface {rhs:?} must equal the free ports {lhs:?}")]
    InterfaceMismatch {
        rule: String,
        lhs: Vec<String>,
        rhs: Vec<String>,
    },
    #[error("rule `{rule}`: right-hand side leaves free port `{port}` unwired")]
    UnwiredInterface { rule: String, port: String },
    #[error("rule `{rule}`: right-hand side uses unbound attribute variable `{var}`")]
    UnboundRhsVar { rule: String, var: String },
}

/// A rewrite rule: a conditional NAP pattern and a net template. Template
/// agents carry attribute expressions over the pattern's attribute variables,
/// and the template's interface names are exactly the pattern's free ports.
#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub lhs: ConditionalNap,
    pub rhs: Net<AttrExpr>,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        lhs: ConditionalNap,
        rhs: Net<AttrExpr>,
    ) -> Result<Rule, RuleError> {
        let name = name.into();
        let mut lhs_ports = lhs.free_ports();
        let mut rhs_ports: Vec<String> = rhs.interface().to_vec();
        lhs_ports.sort();
        rhs_ports.sort();
        if lhs_ports != rhs_ports {
            return Err(RuleError::InterfaceMismatch {
                rule: name,
                lhs: lhs.free_ports(),
                rhs: rhs.interface().to_vec(),
            });
        }
        for (i, port) in rhs.interface().iter().enumerate() {
            if rhs.partner(PortRef::Iface(i)).is_none() {
                return Err(RuleError::UnwiredInterface {
                    rule: name,
                    port: port.clone(),
                });
            }
        }
        let bound: BTreeSet<String> = lhs.attr_vars().into_iter().collect();
        for (_, agent) in rhs.agents() {
            for e in &agent.attrs {
                for v in e.free_vars() {
                    if !bound.contains(&v) {
                        return Err(RuleError::UnboundRhsVar { rule: name, var: v });
                    }
                }
            }
        }
        Ok(Rule { name, lhs, rhs })
    }
}

/// A rule collection over one symbol table, indexed by base pair.
#[derive(Debug, Clone)]
pub struct RuleSet {
    symbols: SymbolTable,
    rules: Vec<Rule>,
    by_pair: HashMap<(SymbolId, SymbolId), Vec<usize>>,
}

impl RuleSet {
    pub fn new(symbols: SymbolTable, rules: Vec<Rule>) -> RuleSet {
        let mut by_pair: HashMap<(SymbolId, SymbolId), Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_pair
                .entry((r.lhs.left.symbol, r.lhs.right.symbol))
                .or_default()
                .push(i);
        }
        RuleSet {
            symbols,
            rules,
            by_pair,
        }
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rule {
        &self.rules[i]
    }

    /// Rules whose base pair matches `(a, b)` in either orientation, in
    /// declaration order. The flag says whether the rule must be applied with
    /// its sides swapped relative to `(a, b)`.
    pub fn candidates(&self, a: SymbolId, b: SymbolId) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        if let Some(v) = self.by_pair.get(&(a, b)) {
            out.extend(v.iter().map(|&i| (i, false)));
        }
        if a == b {
            if let Some(v) = self.by_pair.get(&(a, b)) {
                out.extend(v.iter().map(|&i| (i, true)));
            }
        } else if let Some(v) = self.by_pair.get(&(b, a)) {
            out.extend(v.iter().map(|&i| (i, true)));
        }
        out.sort();
        out
    }

    /// Replaces the symbol table, keeping the rules. Used by the flattening
    /// translation, which extends the table with fresh symbols.
    pub fn with_symbols(self, symbols: SymbolTable) -> RuleSet {
        RuleSet::new(symbols, self.rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinOp;
    use crate::testutil;

    #[test]
    fn drop_conditions_examples() {
        let fx = testutil::gcd_fixture();
        let r1 = &fx.rules.rules()[0];
        let dropped = r1.lhs.drop_conditions();
        assert_eq!(dropped.cond, Condition::True);
        assert!(dropped.connections.iter().all(|c| c.cond == Condition::True));
        assert_eq!(dropped.connections.len(), r1.lhs.connections.len());
        // Idempotent.
        assert_eq!(dropped.drop_conditions(), dropped);
    }

    #[test]
    fn all_sub_counts() {
        let fx = testutil::gcd_fixture();
        let r2 = &fx.rules.rules()[1];
        let subs = r2.lhs.all_sub();
        assert_eq!(subs.len(), 3);
        assert_eq!(subs[0].connections.len(), 0);
        assert_eq!(subs[2], r2.lhs);
        let r1 = &fx.rules.rules()[0];
        assert_eq!(r1.lhs.all_sub().len(), 2);
        let base = &r1.lhs.all_sub()[0];
        assert_eq!(base.all_sub().len(), 1);
    }

    #[test]
    fn subnet_examples() {
        let fx = testutil::gcd_fixture();
        let r1 = &fx.rules.rules()[0].lhs;
        let r2 = &fx.rules.rules()[1].lhs;
        // Conditions b==0 vs not(b==0) break availability implication.
        assert!(!subnet(r1, r2, fx.rules.symbols()));
        assert!(subnet(r1, r1, fx.rules.symbols()));
        assert!(subnet(r2, r2, fx.rules.symbols()));
        // With all-true conditions a structural prefix is a subnet.
        let dropped1 = r2.all_sub()[1].drop_conditions();
        let dropped2 = r2.drop_conditions();
        assert!(subnet(&dropped1, &dropped2, fx.rules.symbols()));
        assert!(!subnet(&dropped2, &dropped1, fx.rules.symbols()));
        let base = r2.all_sub()[0].drop_conditions();
        assert!(subnet(&base, &dropped2, fx.rules.symbols()));
    }

    #[test]
    fn canon_key_ignores_renaming_and_orientation() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let r2 = &fx.rules.rules()[1].lhs;
        // Same pattern with primed names and the base pair flipped.
        let gcd = table.lookup("gcd").unwrap();
        let pair = table.lookup("Pair").unwrap();
        let int = table.lookup("Int").unwrap();
        let flipped = ConditionalNap::pair(
            table,
            PatternAgent::new(table, pair, vec![], vec!["q1".into(), "q2".into()]).unwrap(),
            PatternAgent::new(table, gcd, vec![], vec!["t".into()]).unwrap(),
            Condition::True,
        )
        .unwrap()
        .extend(
            table,
            "q2",
            PatternAgent::new(table, int, vec!["m".into()], vec![]).unwrap(),
            Condition::Otherwise {
                negates: vec![AttrExpr::bin(
                    BinOp::Eq,
                    AttrExpr::var("m"),
                    AttrExpr::lit(0),
                )],
            },
        )
        .unwrap()
        .extend(
            table,
            "q1",
            PatternAgent::new(table, int, vec!["n".into()], vec![]).unwrap(),
            Condition::True,
        )
        .unwrap();
        assert_eq!(r2.canon_key(table), flipped.canon_key(table));
        let r1 = &fx.rules.rules()[0].lhs;
        assert_ne!(r1.canon_key(table), r2.canon_key(table));
    }

    #[test]
    fn extend_requires_free_port() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let int = table.lookup("Int").unwrap();
        let r2 = fx.rules.rules()[1].lhs.clone();
        // p2 was consumed by the first connection.
        let err = r2
            .extend(
                table,
                "p2",
                PatternAgent::new(table, int, vec!["c".into()], vec![]).unwrap(),
                Condition::True,
            )
            .unwrap_err();
        assert_eq!(err, NapError::PortNotFree("p2".into()));
    }

    #[test]
    fn condition_scope_is_checked() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let gcd = table.lookup("gcd").unwrap();
        let pair = table.lookup("Pair").unwrap();
        let bad = ConditionalNap::pair(
            table,
            PatternAgent::new(table, gcd, vec![], vec!["r".into()]).unwrap(),
            PatternAgent::new(table, pair, vec![], vec!["p1".into(), "p2".into()]).unwrap(),
            Condition::Expr(AttrExpr::bin(BinOp::Eq, AttrExpr::var("b"), AttrExpr::lit(0))),
        );
        assert_eq!(bad.unwrap_err(), NapError::UnboundCondVar("b".into()));
    }

    #[test]
    fn instantiate_reads_env() {
        let fx = testutil::gcd_fixture();
        let table = fx.rules.symbols();
        let r2 = &fx.rules.rules()[1].lhs;
        let env: Env = [("a".to_string(), 21), ("b".to_string(), 14)]
            .into_iter()
            .collect();
        let net = r2.instantiate(table, &env).unwrap();
        assert_eq!(net.agent_count(), 4);
        assert_eq!(net.interface(), &["r".to_string()]);
        assert_eq!(net.find_active_pairs().len(), 1);
    }
}
