//! Nets: agents, ports, wiring and active pairs.
//!
//! A net is an undirected graph whose vertices are agents and whose edges
//! connect ports, with at most one edge at every port. Each agent of a symbol
//! with arity `n` has `n` auxiliary ports (slots `1..=n`) and one principal
//! port (slot `0`). Free ports of the whole net are named interface entries.
//!
//! The net is generic over the attribute payload: `Net<i64>` is an ordinary
//! ground net, `Net<AttrExpr>` is a rule right-hand-side template whose
//! attribute slots hold expressions over the rule's attribute variables.
//!
//! Wires are kept as an explicit set of port pairs (indexed both ways for
//! lookup), so applying a rule is a pure edit of the wire set.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::symbol::{SymbolId, SymbolTable};

/// Identifier of an agent within one net. Never reused after removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A port: slot 0 is the principal port, slots `1..=arity` are auxiliary.
/// Interface ports are named free ports of the whole net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortRef {
    Agent { id: AgentId, slot: usize },
    Iface(usize),
}

impl PortRef {
    pub fn principal(id: AgentId) -> PortRef {
        PortRef::Agent { id, slot: 0 }
    }

    pub fn aux(id: AgentId, k: usize) -> PortRef {
        debug_assert!(k >= 1);
        PortRef::Agent { id, slot: k }
    }

    pub fn agent(&self) -> Option<AgentId> {
        match self {
            PortRef::Agent { id, .. } => Some(*id),
            PortRef::Iface(_) => None,
        }
    }

    pub fn is_principal(&self) -> bool {
        matches!(self, PortRef::Agent { slot: 0, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent<T> {
    pub symbol: SymbolId,
    /// Cached from the symbol table so wiring checks need no table access.
    pub arity: usize,
    pub attrs: Vec<T>,
}

/// Two agents wired principal-to-principal; `left < right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActivePair {
    pub left: AgentId,
    pub right: AgentId,
}

impl ActivePair {
    pub fn new(a: AgentId, b: AgentId) -> ActivePair {
        if a <= b {
            ActivePair { left: a, right: b }
        } else {
            ActivePair { left: b, right: a }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("symbol `{symbol}` takes {expected} attribute(s), got {got}")]
    AttrArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("port slot {slot} out of range for agent {id} (arity {arity})")]
    PortOutOfRange { id: AgentId, slot: usize, arity: usize },
    #[error("port {0:?} is already wired")]
    AlreadyWired(PortRef),
    #[error("cannot wire a port to itself")]
    SelfWire,
    #[error("no such agent: {0}")]
    UnknownAgent(AgentId),
    #[error("no such interface index: {0}")]
    UnknownIface(usize),
    #[error("interface name `{0}` is already taken")]
    DuplicateInterface(String),
}

#[derive(Debug, Clone, Default)]
pub struct Net<T> {
    agents: BTreeMap<AgentId, Agent<T>>,
    wires: HashMap<PortRef, PortRef>,
    interface: Vec<String>,
    next_id: u32,
}

impl<T> Net<T> {
    pub fn new() -> Net<T> {
        Net {
            agents: BTreeMap::new(),
            wires: HashMap::new(),
            interface: Vec::new(),
            next_id: 0,
        }
    }

    /// Adds an agent with all ports unwired.
    pub fn add_agent(
        &mut self,
        table: &SymbolTable,
        symbol: SymbolId,
        attrs: Vec<T>,
    ) -> Result<AgentId, NetError> {
        let sym = table.get(symbol);
        if attrs.len() != sym.attr_arity {
            return Err(NetError::AttrArityMismatch {
                symbol: sym.name.clone(),
                expected: sym.attr_arity,
                got: attrs.len(),
            });
        }
        let id = AgentId(self.next_id);
        self.next_id += 1;
        self.agents.insert(
            id,
            Agent {
                symbol,
                arity: sym.arity,
                attrs,
            },
        );
        Ok(id)
    }

    /// Declares a named free port; its wire end is `PortRef::Iface(index)`.
    pub fn add_interface(&mut self, name: &str) -> Result<PortRef, NetError> {
        if self.interface.iter().any(|n| n == name) {
            return Err(NetError::DuplicateInterface(name.to_string()));
        }
        self.interface.push(name.to_string());
        Ok(PortRef::Iface(self.interface.len() - 1))
    }

    pub fn interface(&self) -> &[String] {
        &self.interface
    }

    pub fn iface_port(&self, name: &str) -> Option<PortRef> {
        self.interface
            .iter()
            .position(|n| n == name)
            .map(PortRef::Iface)
    }

    pub fn agent(&self, id: AgentId) -> Option<&Agent<T>> {
        self.agents.get(&id)
    }

    pub fn agents(&self) -> impl Iterator<Item = (AgentId, &Agent<T>)> {
        self.agents.iter().map(|(id, a)| (*id, a))
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    fn check_port(&self, p: PortRef) -> Result<(), NetError> {
        match p {
            PortRef::Agent { id, slot } => {
                let a = self.agents.get(&id).ok_or(NetError::UnknownAgent(id))?;
                if slot > a.arity {
                    return Err(NetError::PortOutOfRange {
                        id,
                        slot,
                        arity: a.arity,
                    });
                }
                Ok(())
            }
            PortRef::Iface(i) => {
                if i >= self.interface.len() {
                    return Err(NetError::UnknownIface(i));
                }
                Ok(())
            }
        }
    }

    /// Wires two currently free ports together.
    pub fn connect(&mut self, a: PortRef, b: PortRef) -> Result<(), NetError> {
        if a == b {
            return Err(NetError::SelfWire);
        }
        self.check_port(a)?;
        self.check_port(b)?;
        if self.wires.contains_key(&a) {
            return Err(NetError::AlreadyWired(a));
        }
        if self.wires.contains_key(&b) {
            return Err(NetError::AlreadyWired(b));
        }
        self.wires.insert(a, b);
        self.wires.insert(b, a);
        Ok(())
    }

    /// Removes the wire at `p`, returning the far end.
    pub fn disconnect(&mut self, p: PortRef) -> Option<PortRef> {
        let q = self.wires.remove(&p)?;
        self.wires.remove(&q);
        Some(q)
    }

    /// The port wired to `p`, if any.
    pub fn partner(&self, p: PortRef) -> Option<PortRef> {
        self.wires.get(&p).copied()
    }

    /// Removes an agent and every wire touching it.
    pub fn remove_agent(&mut self, id: AgentId) -> Option<Agent<T>> {
        let agent = self.agents.remove(&id)?;
        for slot in 0..=agent.arity {
            self.disconnect(PortRef::Agent { id, slot });
        }
        Some(agent)
    }

    /// All active pairs, ascending by the smaller agent id.
    pub fn find_active_pairs(&self) -> Vec<ActivePair> {
        let mut out = Vec::new();
        for (&id, _) in self.agents.iter() {
            if let Some(PortRef::Agent { id: other, slot: 0 }) =
                self.partner(PortRef::principal(id))
            {
                if other > id {
                    out.push(ActivePair::new(id, other));
                }
            }
        }
        out
    }

    /// Wire set as sorted pairs, for deterministic inspection.
    pub fn wire_pairs(&self) -> Vec<(PortRef, PortRef)> {
        let mut out: Vec<(PortRef, PortRef)> = self
            .wires
            .iter()
            .filter(|(a, b)| a < b)
            .map(|(a, b)| (*a, *b))
            .collect();
        out.sort();
        out
    }

    pub fn wire_count(&self) -> usize {
        self.wires.len() / 2
    }
}
