//! Recursive-descent parser for `.inet` program files.
//!
//! A program has three kinds of sections, each introduced by a keyword and a
//! colon and repeatable in any order:
//!
//! ```text
//! symbols:
//!   fn gcd/1;            # name/arity, principal port takes the first
//!   data Pair/2;         # argument; data roots the term at its principal
//!   fn Add1/1/1;         # a second /n declares attribute slots
//! rules:
//!   gcd(r) >< Pair(p1, p2) -> case p2 of {
//!     Int(b) | b == 0    -> r ~ p1
//!            | otherwise -> case p1 of {
//!                Int(a) -> r ~ gcd(Pair(Int(b), Int(a mod b)));
//!              };
//!   };
//! nets:
//!   main: r ~ gcd(Pair(Int(21), Int(14)));
//! ```
//!
//! In a net literal, a wire name used once becomes a named free port of the
//! net (in first-use order); used twice it is an internal wire. An integer in
//! argument position abbreviates `Int(i)`, and `[a, b, c]` abbreviates the
//! `Cons`/`Nil` spine holding those attribute values.

use std::collections::BTreeMap;

use crate::cnap::PatternAgent;
use crate::expr::{AttrExpr, BinOp, Env};
use crate::net::{Net, PortRef};
use crate::notation::{Branch, Guard, RuleNotation, Spray};
use crate::symbol::{SymbolId, SymbolTable, TermKind};

use super::lexer::{lex, ParseError, Tok, Token};

#[derive(Debug)]
pub struct ParsedProgram {
    pub symbols: SymbolTable,
    pub notations: Vec<RuleNotation>,
    pub nets: Vec<(String, Net<i64>)>,
}

pub fn parse_program(text: &str) -> Result<ParsedProgram, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        symbols: SymbolTable::with_builtins(),
    };
    p.program()
}

/// Parses a single expression, mainly for tests and tools.
pub fn parse_expr_str(text: &str) -> Result<AttrExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        symbols: SymbolTable::with_builtins(),
    };
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    symbols: SymbolTable,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            message: message.into(),
            line,
            col,
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", tok, self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected an identifier, found {}", other)),
        }
    }

    fn program(&mut self) -> Result<ParsedProgram, ParseError> {
        let mut notations = Vec::new();
        let mut nets: Vec<(String, Net<i64>)> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::KwSymbols => {
                    self.bump();
                    self.expect(Tok::Colon)?;
                    while matches!(self.peek(), Tok::KwFn | Tok::KwData) {
                        self.symbol_decl()?;
                    }
                }
                Tok::KwRules => {
                    self.bump();
                    self.expect(Tok::Colon)?;
                    while matches!(self.peek(), Tok::Ident(_)) {
                        notations.push(self.rule()?);
                    }
                }
                Tok::KwNets => {
                    self.bump();
                    self.expect(Tok::Colon)?;
                    while matches!(self.peek(), Tok::Ident(_)) {
                        let name = self.ident()?;
                        if nets.iter().any(|(n, _)| *n == name) {
                            return self.err(format!("net `{}` is defined twice", name));
                        }
                        self.expect(Tok::Colon)?;
                        let template = self.net_body()?;
                        self.expect(Tok::Semi)?;
                        nets.push((name, self.ground(template)?));
                    }
                }
                other => {
                    return self.err(format!(
                        "expected a `symbols:`, `rules:` or `nets:` section, found {}",
                        other
                    ));
                }
            }
        }
        Ok(ParsedProgram {
            symbols: std::mem::take(&mut self.symbols),
            notations,
            nets,
        })
    }

    /// `fn name/arity[/attrs] (, name/arity[/attrs])* ;`
    fn symbol_decl(&mut self) -> Result<(), ParseError> {
        let kind = match self.bump() {
            Tok::KwFn => TermKind::Fn,
            Tok::KwData => TermKind::Data,
            _ => unreachable!("caller checked"),
        };
        loop {
            let name = self.ident()?;
            self.expect(Tok::Slash)?;
            let arity = self.small_uint("arity")?;
            let attr_arity = if self.eat(&Tok::Slash) {
                self.small_uint("attribute arity")?
            } else {
                0
            };
            if let Err(e) = self.symbols.declare(&name, arity, attr_arity, kind) {
                return self.err(e.to_string());
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn small_uint(&mut self, what: &str) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) if (0..=255).contains(&i) => {
                self.bump();
                Ok(i as usize)
            }
            other => self.err(format!("expected a small {} count, found {}", what, other)),
        }
    }

    fn rule(&mut self) -> Result<RuleNotation, ParseError> {
        let left = self.pattern_agent()?;
        self.expect(Tok::Interact)?;
        let right = self.pattern_agent()?;
        let groups = self.guard_groups()?;
        self.expect(Tok::Semi)?;
        Ok(RuleNotation {
            left,
            right,
            groups,
        })
    }

    /// Either a bare `-> ...` (one group guarded by true) or `| c -> ...`
    /// groups.
    fn guard_groups(&mut self) -> Result<Vec<(Guard, Spray)>, ParseError> {
        let mut groups = Vec::new();
        if self.peek() == &Tok::Arrow {
            groups.push((Guard::True, self.spray()?));
            return Ok(groups);
        }
        if self.peek() != &Tok::Pipe {
            return self.err(format!("expected `->` or `|`, found {}", self.peek()));
        }
        while self.eat(&Tok::Pipe) {
            let guard = self.guard()?;
            let spray = self.spray()?;
            groups.push((guard, spray));
        }
        Ok(groups)
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        match self.peek() {
            Tok::KwOtherwise => {
                self.bump();
                Ok(Guard::Otherwise)
            }
            // A bare `true` guard; `true` inside a larger expression is
            // handled by the expression parser.
            Tok::KwTrue if self.peek2() == &Tok::Arrow => {
                self.bump();
                Ok(Guard::True)
            }
            _ => Ok(Guard::Expr(self.expr()?)),
        }
    }

    fn spray(&mut self) -> Result<Spray, ParseError> {
        self.expect(Tok::Arrow)?;
        if self.peek() == &Tok::KwCase {
            self.bump();
            // Both `case z of` and `case of z` are accepted.
            let port = if self.eat(&Tok::KwOf) {
                self.ident()?
            } else {
                let port = self.ident()?;
                self.expect(Tok::KwOf)?;
                port
            };
            self.expect(Tok::LBrace)?;
            let mut branches = Vec::new();
            while matches!(self.peek(), Tok::Ident(_)) {
                let agent = self.pattern_agent()?;
                let groups = self.guard_groups()?;
                branches.push(Branch { agent, groups });
                // Branches may be separated by a semicolon.
                self.eat(&Tok::Semi);
            }
            if branches.is_empty() {
                return self.err("a case needs at least one branch");
            }
            self.expect(Tok::RBrace)?;
            Ok(Spray::Case { port, branches })
        } else {
            Ok(Spray::Arrow(self.net_body()?))
        }
    }

    /// A symbol with variable lists for its attribute slots and ports:
    /// `Int(b)`, `gcd(r)`, `Cons(k)(ys)`, `Nil`.
    fn pattern_agent(&mut self) -> Result<PatternAgent, ParseError> {
        let name = self.ident()?;
        let Some(symbol) = self.symbols.lookup(&name) else {
            return self.err(format!("undeclared symbol `{}`", name));
        };
        let sym = self.symbols.get(symbol).clone();
        let mut groups: Vec<Vec<String>> = Vec::new();
        while self.peek() == &Tok::LParen && groups.len() < 2 {
            self.bump();
            let mut names = Vec::new();
            if self.peek() != &Tok::RParen {
                loop {
                    names.push(self.ident()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            groups.push(names);
        }
        let expected = usize::from(sym.attr_arity > 0) + usize::from(sym.arity > 0);
        if groups.len() != expected {
            return self.err(format!(
                "`{}` takes {} variable group(s): {}{}",
                name,
                expected,
                if sym.attr_arity > 0 { "(attributes)" } else { "" },
                if sym.arity > 0 { "(ports)" } else { "" },
            ));
        }
        let (attr_vars, port_vars) = match (sym.attr_arity > 0, sym.arity > 0) {
            (true, true) => (groups[0].clone(), groups[1].clone()),
            (true, false) => (groups[0].clone(), Vec::new()),
            (false, true) => (Vec::new(), groups[0].clone()),
            (false, false) => (Vec::new(), Vec::new()),
        };
        match PatternAgent::new(&self.symbols, symbol, attr_vars, port_vars) {
            Ok(a) => Ok(a),
            Err(e) => self.err(e.to_string()),
        }
    }

    /// `()` for the empty net, else comma-separated `term ~ term` statements.
    fn net_body(&mut self) -> Result<Net<AttrExpr>, ParseError> {
        let mut b = NetBuilder::new();
        if self.peek() == &Tok::LParen && self.peek2() == &Tok::RParen {
            self.bump();
            self.bump();
            return b.finish(self);
        }
        loop {
            let lhs = self.term(&mut b)?;
            self.expect(Tok::Tilde)?;
            let rhs = self.term(&mut b)?;
            b.link(self, lhs, rhs)?;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        b.finish(self)
    }

    /// One term; returns the plug that connects it to its context.
    fn term(&mut self, b: &mut NetBuilder) -> Result<Plug, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                self.int_agent(b, AttrExpr::Lit(i))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        self.int_agent(b, AttrExpr::Lit(i.wrapping_neg()))
                    }
                    other => self.err(format!("expected an integer after `-`, found {}", other)),
                }
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if self.peek() != &Tok::RBracket {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                self.list_agent(b, items)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(symbol) = self.symbols.lookup(&name) {
                    self.agent_term(b, symbol)
                } else {
                    if self.peek() == &Tok::LParen {
                        return self.err(format!("undeclared symbol `{}`", name));
                    }
                    Ok(Plug::Name(name))
                }
            }
            other => self.err(format!("expected a term, found {}", other)),
        }
    }

    fn int_agent(&mut self, b: &mut NetBuilder, value: AttrExpr) -> Result<Plug, ParseError> {
        let int = self.symbols.lookup("Int").expect("built-in");
        let id = b
            .net
            .add_agent(&self.symbols, int, vec![value])
            .expect("Int takes one attribute");
        Ok(Plug::Port(PortRef::principal(id)))
    }

    fn list_agent(
        &mut self,
        b: &mut NetBuilder,
        items: Vec<AttrExpr>,
    ) -> Result<Plug, ParseError> {
        let cons = self.symbols.lookup("Cons").expect("built-in");
        let nil = self.symbols.lookup("Nil").expect("built-in");
        let mut tail = Plug::Port(PortRef::principal(
            b.net.add_agent(&self.symbols, nil, vec![]).expect("Nil"),
        ));
        for item in items.into_iter().rev() {
            let id = b
                .net
                .add_agent(&self.symbols, cons, vec![item])
                .expect("Cons takes one attribute");
            let Plug::Port(p) = tail else { unreachable!() };
            b.net.connect(PortRef::aux(id, 1), p).expect("fresh ports");
            tail = Plug::Port(PortRef::principal(id));
        }
        Ok(tail)
    }

    /// `sym(attr exprs)(port terms)` with placement given by the symbol's
    /// term kind.
    fn agent_term(&mut self, b: &mut NetBuilder, symbol: SymbolId) -> Result<Plug, ParseError> {
        let sym = self.symbols.get(symbol).clone();
        let attrs = if sym.attr_arity > 0 {
            self.expect(Tok::LParen)?;
            let mut attrs = Vec::new();
            loop {
                attrs.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
            if attrs.len() != sym.attr_arity {
                return self.err(format!(
                    "`{}` takes {} attribute(s), got {}",
                    sym.name,
                    sym.attr_arity,
                    attrs.len()
                ));
            }
            attrs
        } else {
            Vec::new()
        };
        let mut args: Vec<Plug> = Vec::new();
        if sym.arity > 0 {
            self.expect(Tok::LParen)?;
            loop {
                let arg = self.term(b)?;
                args.push(arg);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
            if args.len() != sym.arity {
                return self.err(format!(
                    "`{}` takes {} argument(s), got {}",
                    sym.name,
                    sym.arity,
                    args.len()
                ));
            }
        }
        let id = b
            .net
            .add_agent(&self.symbols, symbol, attrs)
            .expect("attribute count checked");
        match sym.kind {
            TermKind::Data => {
                for (k, arg) in args.into_iter().enumerate() {
                    b.attach(self, PortRef::aux(id, k + 1), arg)?;
                }
                Ok(Plug::Port(PortRef::principal(id)))
            }
            TermKind::Fn => {
                let mut it = args.into_iter();
                let first = it.next().expect("fn arity is at least one");
                b.attach(self, PortRef::principal(id), first)?;
                for (k, arg) in it.enumerate() {
                    b.attach(self, PortRef::aux(id, k + 1), arg)?;
                }
                Ok(Plug::Port(PortRef::aux(id, sym.arity)))
            }
        }
    }

    fn ground(&mut self, template: Net<AttrExpr>) -> Result<Net<i64>, ParseError> {
        let empty = Env::new();
        let mut net: Net<i64> = Net::new();
        let mut map = BTreeMap::new();
        for (id, agent) in template.agents() {
            let mut attrs = Vec::new();
            for e in &agent.attrs {
                match crate::expr::eval(e, &empty) {
                    Ok(v) => attrs.push(v),
                    Err(e) => {
                        return self.err(format!(
                            "net definitions need constant attributes: {}",
                            e
                        ))
                    }
                }
            }
            map.insert(id, net.add_agent(&self.symbols, agent.symbol, attrs).unwrap());
        }
        for name in template.interface() {
            net.add_interface(name).unwrap();
        }
        for (a, bp) in template.wire_pairs() {
            let remap = |p: PortRef| match p {
                PortRef::Agent { id, slot } => PortRef::Agent { id: map[&id], slot },
                PortRef::Iface(i) => PortRef::Iface(i),
            };
            net.connect(remap(a), remap(bp)).unwrap();
        }
        Ok(net)
    }

    // Expression parsing, loosest to tightest: or, and, comparisons,
    // additive, multiplicative, unary.
    fn expr(&mut self) -> Result<AttrExpr, ParseError> {
        let mut e = self.and_expr()?;
        while self.eat(&Tok::KwOr) {
            e = AttrExpr::bin(BinOp::Or, e, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<AttrExpr, ParseError> {
        let mut e = self.cmp_expr()?;
        while self.eat(&Tok::KwAnd) {
            e = AttrExpr::bin(BinOp::And, e, self.cmp_expr()?);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> Result<AttrExpr, ParseError> {
        let mut e = self.add_expr()?;
        loop {
            let op = match self.peek() {
                Tok::EqEq => BinOp::Eq,
                Tok::Ne => BinOp::Ne,
                Tok::Lt => BinOp::Lt,
                Tok::Le => BinOp::Le,
                Tok::Gt => BinOp::Gt,
                Tok::Ge => BinOp::Ge,
                _ => break,
            };
            self.bump();
            e = AttrExpr::bin(op, e, self.add_expr()?);
        }
        Ok(e)
    }

    fn add_expr(&mut self) -> Result<AttrExpr, ParseError> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            e = AttrExpr::bin(op, e, self.mul_expr()?);
        }
        Ok(e)
    }

    fn mul_expr(&mut self) -> Result<AttrExpr, ParseError> {
        let mut e = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::KwMod => BinOp::Mod,
                _ => break,
            };
            self.bump();
            e = AttrExpr::bin(op, e, self.unary_expr()?);
        }
        Ok(e)
    }

    fn unary_expr(&mut self) -> Result<AttrExpr, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                // A directly adjacent literal folds, so `-5` is one literal.
                if let Tok::Int(i) = self.peek().clone() {
                    self.bump();
                    return Ok(AttrExpr::Lit(i.wrapping_neg()));
                }
                Ok(AttrExpr::neg(self.unary_expr()?))
            }
            Tok::KwNot => {
                self.bump();
                Ok(AttrExpr::not(self.unary_expr()?))
            }
            Tok::Int(i) => {
                self.bump();
                Ok(AttrExpr::Lit(i))
            }
            Tok::KwTrue => {
                self.bump();
                Ok(AttrExpr::Lit(1))
            }
            Tok::KwFalse => {
                self.bump();
                Ok(AttrExpr::Lit(0))
            }
            Tok::Ident(v) => {
                self.bump();
                Ok(AttrExpr::Var(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => self.err(format!("expected an expression, found {}", other)),
        }
    }
}

enum Plug {
    Port(PortRef),
    Name(String),
}

/// Builds a net from statements, tracking wire-name occurrences. A name may
/// occur at most twice; once-used names become the net's named free ports in
/// first-use order.
struct NetBuilder {
    net: Net<AttrExpr>,
    ports: BTreeMap<String, Vec<PortRef>>,
    links: Vec<(String, String)>,
    occurrences: BTreeMap<String, usize>,
    order: Vec<String>,
}

impl NetBuilder {
    fn new() -> NetBuilder {
        NetBuilder {
            net: Net::new(),
            ports: BTreeMap::new(),
            links: Vec::new(),
            occurrences: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    fn occur(&mut self, p: &Parser, name: &str) -> Result<(), ParseError> {
        let n = self.occurrences.entry(name.to_string()).or_insert(0);
        *n += 1;
        if *n > 2 {
            return p.err(format!("wire name `{}` is used more than twice", name));
        }
        if *n == 1 {
            self.order.push(name.to_string());
        }
        Ok(())
    }

    fn attach(&mut self, p: &Parser, port: PortRef, plug: Plug) -> Result<(), ParseError> {
        match plug {
            Plug::Port(q) => self.net.connect(port, q).map_err(|e| {
                let (line, col) = p.here();
                ParseError {
                    message: e.to_string(),
                    line,
                    col,
                }
            }),
            Plug::Name(name) => {
                self.occur(p, &name)?;
                self.ports.entry(name).or_default().push(port);
                Ok(())
            }
        }
    }

    fn link(&mut self, p: &Parser, a: Plug, b: Plug) -> Result<(), ParseError> {
        match (a, b) {
            (Plug::Port(x), Plug::Port(y)) => self.net.connect(x, y).map_err(|e| {
                let (line, col) = p.here();
                ParseError {
                    message: e.to_string(),
                    line,
                    col,
                }
            }),
            (Plug::Port(x), Plug::Name(n)) | (Plug::Name(n), Plug::Port(x)) => {
                self.occur(p, &n)?;
                self.ports.entry(n).or_default().push(x);
                Ok(())
            }
            (Plug::Name(n), Plug::Name(m)) => {
                self.occur(p, &n)?;
                self.occur(p, &m)?;
                self.links.push((n, m));
                Ok(())
            }
        }
    }

    /// Resolves wire names: each name component must end in exactly two
    /// ports, counting a once-used name as a named free port.
    fn finish(mut self, p: &Parser) -> Result<Net<AttrExpr>, ParseError> {
        // Interface entries first, in first-use order.
        let mut iface: BTreeMap<String, PortRef> = BTreeMap::new();
        for name in &self.order {
            if self.occurrences[name] == 1 {
                let port = self.net.add_interface(name).expect("names are distinct");
                iface.insert(name.clone(), port);
            }
        }
        // Walk name components.
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, b) in &self.links {
            adjacency.entry(a).or_default().push(b);
            adjacency.entry(b).or_default().push(a);
        }
        let mut seen: BTreeMap<&str, bool> = BTreeMap::new();
        for start in &self.order {
            if seen.get(start.as_str()).copied().unwrap_or(false) {
                continue;
            }
            let mut stack = vec![start.as_str()];
            let mut endpoints: Vec<PortRef> = Vec::new();
            while let Some(n) = stack.pop() {
                if seen.get(n).copied().unwrap_or(false) {
                    continue;
                }
                seen.insert(n, true);
                if let Some(ps) = self.ports.get(n) {
                    endpoints.extend(ps.iter().copied());
                }
                if let Some(pt) = iface.get(n) {
                    endpoints.push(*pt);
                }
                if let Some(nexts) = adjacency.get(n) {
                    stack.extend(nexts.iter().copied());
                }
            }
            match endpoints.len() {
                2 => {
                    self.net.connect(endpoints[0], endpoints[1]).map_err(|e| {
                        let (line, col) = p.here();
                        ParseError {
                            message: e.to_string(),
                            line,
                            col,
                        }
                    })?;
                }
                0 => {
                    return p.err(format!(
                        "wires around `{}` form a closed loop connecting nothing",
                        start
                    ));
                }
                n => unreachable!("wire component with {} endpoints", n),
            }
        }
        Ok(self.net)
    }
}
