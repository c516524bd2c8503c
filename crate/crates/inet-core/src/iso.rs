//! Net isomorphism.
//!
//! Two nets are isomorphic when a bijection of agents preserves symbols,
//! attribute values and wiring, and interface names map to themselves. The
//! search backtracks over candidate pairings, seeded by a partition on
//! (symbol, attributes, local wiring shape) and by the anchors that the named
//! interface gives for free. Fine for the test-scale nets this crate handles.

use std::collections::HashMap;
use std::hash::Hash;

use crate::net::{AgentId, Net, PortRef};
use crate::symbol::SymbolId;

/// Local shape of one port: what kind of far end it has.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PortSig {
    Unwired,
    Iface(String),
    ToAgent { symbol: SymbolId, slot: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct AgentSig<T> {
    symbol: SymbolId,
    attrs: Vec<T>,
    ports: Vec<PortSig>,
}

fn signature<T: Clone>(net: &Net<T>, id: AgentId) -> AgentSig<T> {
    let agent = net.agent(id).expect("live agent");
    let ports = (0..=agent.arity)
        .map(|slot| match net.partner(PortRef::Agent { id, slot }) {
            None => PortSig::Unwired,
            Some(PortRef::Iface(i)) => PortSig::Iface(net.interface()[i].clone()),
            Some(PortRef::Agent { id: other, slot: s }) => PortSig::ToAgent {
                symbol: net.agent(other).expect("live agent").symbol,
                slot: s,
            },
        })
        .collect();
    AgentSig {
        symbol: agent.symbol,
        attrs: agent.attrs.clone(),
        ports,
    }
}

/// True iff `a` and `b` are isomorphic. Both nets must be built over the same
/// symbol table, since symbols are compared by id.
pub fn iso<T: Clone + Eq + Hash>(a: &Net<T>, b: &Net<T>) -> bool {
    if a.agent_count() != b.agent_count() || a.wire_count() != b.wire_count() {
        return false;
    }
    // Interface names must coincide as sets.
    let mut names_a: Vec<&String> = a.interface().iter().collect();
    let mut names_b: Vec<&String> = b.interface().iter().collect();
    names_a.sort();
    names_b.sort();
    if names_a != names_b {
        return false;
    }

    let ids_a: Vec<AgentId> = a.agents().map(|(id, _)| id).collect();
    let sig_a: HashMap<AgentId, AgentSig<T>> =
        ids_a.iter().map(|&id| (id, signature(a, id))).collect();
    let mut groups_b: HashMap<AgentSig<T>, Vec<AgentId>> = HashMap::new();
    for (id, _) in b.agents() {
        groups_b.entry(signature(b, id)).or_default().push(id);
    }
    for sig in sig_a.values() {
        let Some(g) = groups_b.get(sig) else {
            return false;
        };
        // A necessary size check per signature class.
        let count_a = sig_a.values().filter(|s| *s == sig).count();
        if g.len() != count_a {
            return false;
        }
    }

    let mut mapping: HashMap<AgentId, AgentId> = HashMap::new();
    let mut used: HashMap<AgentId, AgentId> = HashMap::new();

    // Interface anchors force their neighbour pairings outright.
    for (i, name) in a.interface().iter().enumerate() {
        let pa = a.partner(PortRef::Iface(i));
        let pb = b.iface_port(name).and_then(|p| b.partner(p));
        match (pa, pb) {
            (None, None) => {}
            (Some(PortRef::Iface(ia)), Some(PortRef::Iface(ib))) => {
                if a.interface()[ia] != b.interface()[ib] {
                    return false;
                }
            }
            (
                Some(PortRef::Agent { id: na, slot: sa }),
                Some(PortRef::Agent { id: nb, slot: sb }),
            ) => {
                if sa != sb {
                    return false;
                }
                if let Some(&prev) = mapping.get(&na) {
                    if prev != nb {
                        return false;
                    }
                } else {
                    if used.contains_key(&nb) {
                        return false;
                    }
                    mapping.insert(na, nb);
                    used.insert(nb, na);
                }
            }
            _ => return false,
        }
    }

    // Anchored pairings must be signature-compatible.
    for (&na, &nb) in mapping.iter() {
        if sig_a[&na] != signature(b, nb) {
            return false;
        }
    }

    let unassigned: Vec<AgentId> = ids_a
        .iter()
        .copied()
        .filter(|id| !mapping.contains_key(id))
        .collect();

    fn consistent<T: Clone + Eq + Hash>(
        a: &Net<T>,
        b: &Net<T>,
        mapping: &HashMap<AgentId, AgentId>,
        na: AgentId,
        nb: AgentId,
    ) -> bool {
        let arity = a.agent(na).expect("live agent").arity;
        for slot in 0..=arity {
            let pa = a.partner(PortRef::Agent { id: na, slot });
            let pb = b.partner(PortRef::Agent { id: nb, slot });
            match (pa, pb) {
                (None, None) => {}
                (Some(PortRef::Iface(ia)), Some(PortRef::Iface(ib))) => {
                    if a.interface()[ia] != b.interface()[ib] {
                        return false;
                    }
                }
                (
                    Some(PortRef::Agent { id: qa, slot: sa }),
                    Some(PortRef::Agent { id: qb, slot: sb }),
                ) => {
                    if sa != sb {
                        return false;
                    }
                    if let Some(&mapped) = mapping.get(&qa) {
                        if mapped != qb {
                            return false;
                        }
                    }
                }
                _ => return false,
            }
        }
        true
    }

    fn search<T: Clone + Eq + Hash>(
        a: &Net<T>,
        b: &Net<T>,
        sig_a: &HashMap<AgentId, AgentSig<T>>,
        groups_b: &HashMap<AgentSig<T>, Vec<AgentId>>,
        unassigned: &[AgentId],
        mapping: &mut HashMap<AgentId, AgentId>,
        used: &mut HashMap<AgentId, AgentId>,
    ) -> bool {
        let Some((&na, rest)) = unassigned.split_first() else {
            return true;
        };
        let candidates = &groups_b[&sig_a[&na]];
        for &nb in candidates {
            if used.contains_key(&nb) {
                continue;
            }
            if !consistent(a, b, mapping, na, nb) {
                continue;
            }
            mapping.insert(na, nb);
            used.insert(nb, na);
            if search(a, b, sig_a, groups_b, rest, mapping, used) {
                return true;
            }
            mapping.remove(&na);
            used.remove(&nb);
        }
        false
    }

    // Validate anchors against each other before searching.
    let anchored: Vec<(AgentId, AgentId)> = mapping.iter().map(|(&x, &y)| (x, y)).collect();
    for (na, nb) in anchored {
        if !consistent(a, b, &mapping, na, nb) {
            return false;
        }
    }

    search(a, b, &sig_a, &groups_b, &unassigned, &mut mapping, &mut used)
}
