//! Interaction nets with integer attributes, conditional rules and
//! conditional nested active pairs.
//!
//! The crate provides:
//!
//! - the net data model: symbols, agents, ports, wiring, active pairs
//!   ([`net`], [`symbol`]), plus net isomorphism for testing ([`iso`]);
//! - the attribute expression language with guards ([`expr`]);
//! - conditional nested active pairs, rules over them, and the static
//!   checks that keep reduction one-step confluent ([`cnap`], [`check`]);
//! - the flattening translation from nested rules to plain conditional
//!   rules over fresh intermediate symbols ([`flatten`]);
//! - the guard/case rule notation and its expansion into rules ([`notation`]);
//! - a reduction engine with pluggable strategies ([`engine`]);
//! - the `.inet` program file syntax: parser and printer ([`text`],
//!   [`program`]).

pub mod check;
pub mod cnap;
pub mod engine;
pub mod expr;
pub mod flatten;
pub mod iso;
pub mod net;
pub mod notation;
pub mod program;
pub mod symbol;
pub mod text;

#[cfg(test)]
pub(crate) mod testutil;

/// Attribute values are 64-bit signed integers; arithmetic wraps on overflow.
pub type Attr = i64;

pub use check::{check_local_sequentiality, check_pairwise_distinct, disjoint, Diagnostic};
pub use cnap::{ConditionalNap, Connection, PatternAgent, Rule, RuleSet};
pub use engine::{reduce, reduce_all_orders, Reducer, Strategy, Trace};
pub use expr::{eval, is_true, AttrExpr, BinOp, Condition, Env, EvalError};
pub use iso::iso;
pub use net::{ActivePair, Agent, AgentId, Net, NetError, PortRef};
pub use notation::{t_r, RuleNotation, Spray};
pub use program::Program;
pub use symbol::{Symbol, SymbolId, SymbolTable, TermKind};
