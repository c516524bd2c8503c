//! Symbols and the symbol table.
//!
//! A symbol fixes a node name together with its arity (number of auxiliary
//! ports) and attribute arity (number of integer attribute slots). Names are
//! unique within a table and arities never vary per name.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a symbol in its [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

/// How a symbol is placed when written in term syntax.
///
/// This only affects parsing and printing of net literals; matching and
/// reduction never look at it. A `Data` symbol's principal port sits at the
/// term's own position and its arguments fill the auxiliary ports. An `Fn`
/// symbol takes its first argument on the principal port, remaining arguments
/// on the leading auxiliary ports, and exposes its last auxiliary port as the
/// term's position (the "result").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Data,
    Fn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    /// Number of auxiliary ports. Every agent also has one principal port.
    pub arity: usize,
    /// Number of integer attribute slots.
    pub attr_arity: usize,
    pub kind: TermKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("symbol `{0}` is already declared with a different signature")]
    Conflict(String),
    #[error("an `fn` symbol needs at least one auxiliary port for its result, `{0}` has none")]
    FnWithoutResult(String),
}

/// Interning table mapping names to [`SymbolId`]s.
///
/// `Int(i)`, `Cons(j)` and `Nil` are pre-declared in every table.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

impl SymbolTable {
    /// An empty table without even the built-in list/integer symbols.
    pub fn empty() -> Self {
        SymbolTable::default()
    }

    /// A table holding the built-in symbols `Int`, `Cons` and `Nil`.
    pub fn with_builtins() -> Self {
        let mut t = SymbolTable::default();
        t.declare("Int", 0, 1, TermKind::Data).unwrap();
        t.declare("Cons", 1, 1, TermKind::Data).unwrap();
        t.declare("Nil", 0, 0, TermKind::Data).unwrap();
        t
    }

    /// Declares a symbol, or returns the existing id when re-declared with an
    /// identical signature.
    pub fn declare(
        &mut self,
        name: &str,
        arity: usize,
        attr_arity: usize,
        kind: TermKind,
    ) -> Result<SymbolId, SymbolError> {
        if kind == TermKind::Fn && arity == 0 {
            return Err(SymbolError::FnWithoutResult(name.to_string()));
        }
        if let Some(&id) = self.by_name.get(name) {
            let existing = &self.symbols[id.0 as usize];
            if existing.arity == arity && existing.attr_arity == attr_arity && existing.kind == kind
            {
                return Ok(id);
            }
            return Err(SymbolError::Conflict(name.to_string()));
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(Symbol {
            name: name.to_string(),
            arity,
            attr_arity,
            kind,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    pub fn get(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0 as usize]
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.get(id).name
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.get(id).arity
    }

    pub fn attr_arity(&self, id: SymbolId) -> usize {
        self.get(id).attr_arity
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// All ids in declaration order.
    pub fn ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sym#{}", self.0)
    }
}
