//! Printing nets, rules and programs back to `.inet` syntax.
//!
//! Net printing walks each interface port and inlines agents whose root port
//! (principal for `data` symbols, last auxiliary for `fn` symbols) faces the
//! position being rendered; every other wire gets a shared name. Output
//! re-parses to an isomorphic net.

use std::collections::{BTreeMap, BTreeSet};

use crate::expr::AttrExpr;
use crate::net::{AgentId, Net, PortRef};
use crate::notation::{Guard, RuleNotation, Spray};
use crate::symbol::{SymbolTable, TermKind};

/// Attribute payloads that can sit in an agent's attribute list.
pub trait AttrPrint {
    fn print(&self) -> String;
}

impl AttrPrint for i64 {
    fn print(&self) -> String {
        self.to_string()
    }
}

impl AttrPrint for AttrExpr {
    fn print(&self) -> String {
        self.to_string()
    }
}

struct NetPrinter<'a, T> {
    net: &'a Net<T>,
    table: &'a SymbolTable,
    rendered: BTreeSet<AgentId>,
    wire_names: BTreeMap<PortRef, String>,
    consumed_iface: BTreeSet<usize>,
    fresh: usize,
}

impl<'a, T: AttrPrint> NetPrinter<'a, T> {
    fn new(net: &'a Net<T>, table: &'a SymbolTable) -> Self {
        NetPrinter {
            net,
            table,
            rendered: BTreeSet::new(),
            wire_names: BTreeMap::new(),
            consumed_iface: BTreeSet::new(),
            fresh: 0,
        }
    }

    fn root_port(&self, id: AgentId) -> PortRef {
        let agent = self.net.agent(id).expect("live agent");
        match self.table.get(agent.symbol).kind {
            TermKind::Data => PortRef::principal(id),
            TermKind::Fn => PortRef::aux(id, agent.arity),
        }
    }

    fn fresh_wire_name(&mut self) -> String {
        loop {
            let name = format!("w{}", self.fresh);
            self.fresh += 1;
            let taken = self.table.contains(&name)
                || self.net.interface().iter().any(|n| *n == name)
                || self.wire_names.values().any(|n| *n == name);
            if !taken {
                return name;
            }
        }
    }

    /// Names the wire at `p` (shared with its partner).
    fn wire_name(&mut self, p: PortRef) -> String {
        if let Some(n) = self.wire_names.get(&p) {
            return n.clone();
        }
        let name = self.fresh_wire_name();
        self.wire_names.insert(p, name.clone());
        if let Some(q) = self.net.partner(p) {
            self.wire_names.insert(q, name.clone());
        }
        name
    }

    /// Renders whatever the context's wire leads to at `p`.
    fn render_from(&mut self, p: PortRef) -> String {
        match p {
            PortRef::Iface(i) => {
                self.consumed_iface.insert(i);
                self.net.interface()[i].clone()
            }
            PortRef::Agent { id, .. } => {
                if p == self.root_port(id) && !self.rendered.contains(&id) {
                    self.inline(id)
                } else {
                    self.wire_name(p)
                }
            }
        }
    }

    fn render_opt(&mut self, p: Option<PortRef>) -> String {
        match p {
            Some(p) => self.render_from(p),
            // A dangling port: print a fresh once-used name.
            None => self.fresh_wire_name(),
        }
    }

    fn inline(&mut self, id: AgentId) -> String {
        self.rendered.insert(id);
        let agent = self.net.agent(id).expect("live agent");
        let sym = self.table.get(agent.symbol);
        let mut s = sym.name.clone();
        if !agent.attrs.is_empty() {
            let attrs: Vec<String> = agent.attrs.iter().map(|a| a.print()).collect();
            s.push_str(&format!("({})", attrs.join(", ")));
        }
        if agent.arity > 0 {
            let arg_ports: Vec<PortRef> = match sym.kind {
                TermKind::Data => (1..=agent.arity).map(|k| PortRef::aux(id, k)).collect(),
                TermKind::Fn => std::iter::once(PortRef::principal(id))
                    .chain((1..agent.arity).map(|k| PortRef::aux(id, k)))
                    .collect(),
            };
            let args: Vec<String> = arg_ports
                .into_iter()
                .map(|q| {
                    let far = self.net.partner(q);
                    self.render_opt(far)
                })
                .collect();
            s.push_str(&format!("({})", args.join(", ")));
        }
        s
    }

    fn print(mut self) -> String {
        let mut stmts: Vec<String> = Vec::new();
        for i in 0..self.net.interface().len() {
            if self.consumed_iface.contains(&i) {
                continue;
            }
            let here = PortRef::Iface(i);
            match self.net.partner(here) {
                None => continue,
                Some(PortRef::Iface(j)) => {
                    self.consumed_iface.insert(i);
                    self.consumed_iface.insert(j);
                    let (a, b) = (
                        self.net.interface()[i].clone(),
                        self.net.interface()[j].clone(),
                    );
                    stmts.push(format!("{} ~ {}", a, b));
                }
                Some(p @ PortRef::Agent { id, .. }) => {
                    if p == self.root_port(id) && !self.rendered.contains(&id) {
                        self.consumed_iface.insert(i);
                        let name = self.net.interface()[i].clone();
                        let term = self.inline(id);
                        stmts.push(format!("{} ~ {}", name, term));
                    }
                    // Otherwise the interface name will appear inside some
                    // later term as the wire's name.
                }
            }
        }
        // Now the iface wires that defer to term positions.
        for i in 0..self.net.interface().len() {
            if self.consumed_iface.contains(&i) {
                continue;
            }
            if let Some(p) = self.net.partner(PortRef::Iface(i)) {
                let name = self.net.interface()[i].clone();
                self.wire_names.entry(p).or_insert_with(|| name.clone());
                self.wire_names
                    .entry(PortRef::Iface(i))
                    .or_insert_with(|| name.clone());
            }
        }
        // Components not reachable from the interface.
        let ids: Vec<AgentId> = self.net.agents().map(|(id, _)| id).collect();
        for id in ids {
            if self.rendered.contains(&id) {
                continue;
            }
            let root = self.root_port(id);
            let far = self.net.partner(root);
            let lhs = self.inline(id);
            let rhs = self.render_opt(far);
            stmts.push(format!("{} ~ {}", lhs, rhs));
        }
        stmts.join(", ")
    }
}

/// Prints a net as comma-separated wire statements; `()` for the empty net.
pub fn print_net<T: AttrPrint>(net: &Net<T>, table: &SymbolTable) -> String {
    let s = NetPrinter::new(net, table).print();
    if s.is_empty() {
        "()".to_string()
    } else {
        s
    }
}

fn print_pattern(agent: &crate::cnap::PatternAgent, table: &SymbolTable) -> String {
    let mut s = table.name(agent.symbol).to_string();
    if !agent.attr_vars.is_empty() {
        s.push_str(&format!("({})", agent.attr_vars.join(", ")));
    }
    if !agent.port_vars.is_empty() {
        s.push_str(&format!("({})", agent.port_vars.join(", ")));
    }
    s
}

fn print_guard(g: &Guard) -> String {
    match g {
        Guard::True => "true".to_string(),
        Guard::Expr(e) => e.to_string(),
        Guard::Otherwise => "otherwise".to_string(),
    }
}

fn print_spray(spray: &Spray, table: &SymbolTable, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match spray {
        Spray::Arrow(net) => format!("-> {}", print_net(net, table)),
        Spray::Case { port, branches } => {
            let mut s = format!("-> case {} of {{\n", port);
            for b in branches {
                s.push_str(&format!(
                    "{}  {}{}\n",
                    pad,
                    print_pattern(&b.agent, table),
                    print_groups(&b.groups, table, indent + 2)
                ));
            }
            s.push_str(&format!("{}}}", pad));
            s
        }
    }
}

fn print_groups(groups: &[(Guard, Spray)], table: &SymbolTable, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    if groups.len() == 1 && groups[0].0 == Guard::True {
        return format!(" {}", print_spray(&groups[0].1, table, indent));
    }
    let mut s = String::new();
    for (g, spray) in groups {
        s.push_str(&format!(
            "\n{}| {} {}",
            pad,
            print_guard(g),
            print_spray(spray, table, indent)
        ));
    }
    s
}

pub fn print_notation(rn: &RuleNotation, table: &SymbolTable) -> String {
    format!(
        "{} >< {}{};",
        print_pattern(&rn.left, table),
        print_pattern(&rn.right, table),
        print_groups(&rn.groups, table, 1)
    )
}

/// Prints the symbol declarations that are not built in.
pub fn print_symbols(table: &SymbolTable) -> String {
    let mut out = String::new();
    for id in table.ids() {
        let sym = table.get(id);
        if matches!(sym.name.as_str(), "Int" | "Cons" | "Nil") {
            continue;
        }
        let kind = match sym.kind {
            TermKind::Fn => "fn",
            TermKind::Data => "data",
        };
        if sym.attr_arity > 0 {
            out.push_str(&format!(
                "  {} {}/{}/{};\n",
                kind, sym.name, sym.arity, sym.attr_arity
            ));
        } else {
            out.push_str(&format!("  {} {}/{};\n", kind, sym.name, sym.arity));
        }
    }
    out
}

/// Prints a whole program: symbol declarations, rule sentences, net
/// definitions.
pub fn print_program_parts(
    table: &SymbolTable,
    notations: &[RuleNotation],
    nets: &[(String, Net<i64>)],
) -> String {
    let mut out = String::new();
    let decls = print_symbols(table);
    if !decls.is_empty() {
        out.push_str("symbols:\n");
        out.push_str(&decls);
        out.push('\n');
    }
    if !notations.is_empty() {
        out.push_str("rules:\n");
        for rn in notations {
            out.push_str("  ");
            out.push_str(&print_notation(rn, table));
            out.push('\n');
        }
        out.push('\n');
    }
    if !nets.is_empty() {
        out.push_str("nets:\n");
        for (name, net) in nets {
            out.push_str(&format!("  {}: {};\n", name, print_net(net, table)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parser::parse_program;

    #[test]
    fn net_round_trips_through_the_printer() {
        let src = "
symbols:
  fn gcd/1;
  data Pair/2;
nets:
  main: r ~ gcd(Pair(Int(21), Int(14)));
";
        let p1 = parse_program(src).unwrap();
        let printed = print_program_parts(&p1.symbols, &[], &p1.nets);
        let p2 = parse_program(&printed).unwrap();
        assert_eq!(p2.nets.len(), 1);
        assert!(crate::iso::iso(&p1.nets[0].1, &p2.nets[0].1));
        // The functional form is preserved.
        assert!(printed.contains("main: r ~ gcd(Pair(Int(21), Int(14)));"));
    }

    #[test]
    fn shared_wires_get_names() {
        let src = "
symbols:
  fn Mult/2, Add/2;
  data S/1, Z/0, dup/2;
nets:
  main: y ~ dup(y1, y2), r ~ Add(y1, Mult(x, y2));
";
        let p1 = parse_program(src).unwrap();
        let printed = print_program_parts(&p1.symbols, &[], &p1.nets);
        let p2 = parse_program(&printed).unwrap();
        assert!(crate::iso::iso(&p1.nets[0].1, &p2.nets[0].1));
    }

    #[test]
    fn empty_net_prints_as_unit() {
        let src = "
symbols:
  data del/0;
nets:
  main: ();
";
        let p = parse_program(src).unwrap();
        assert_eq!(print_net(&p.nets[0].1, &p.symbols), "()");
    }
}
