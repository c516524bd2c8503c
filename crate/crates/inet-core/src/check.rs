//! Static checks on rule sets: guard disjointness, local sequentiality and
//! pairwise distinctness.
//!
//! Disjointness of guards is undecidable in general, so the verdict is
//! three-valued. Guard chains produced by the notation are recognised
//! syntactically (the complete path in practice); for hand-written rules a
//! boundary-value and randomized sampler hunts for an environment satisfying
//! both guards. What remains is `Unknown`, reported as a warning and treated
//! as a failure only in strict mode.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnap::{CanonNap, ConditionalNap, Rule};
use crate::expr::{AttrExpr, Condition, Env};
use crate::symbol::SymbolTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disjointness {
    ProvenDisjoint,
    ProvenOverlapping(Env),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Treat `Unknown` disjointness verdicts as violations.
    pub strict: bool,
    /// Seed for the overlap sampler.
    pub seed: u64,
    /// Random samples per condition pair, on top of the boundary sweep.
    pub samples: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strict: false,
            seed: 0xC0FFEE,
            samples: 200,
        }
    }
}

/// Which requirement a diagnostic reports against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// (1a) base conditions for the same active pair overlap.
    BaseOverlap,
    /// (2a) sibling connection conditions at the same extension overlap.
    SiblingOverlap,
    /// (2b) a pattern's prefix is missing from the set.
    MissingPrefix,
    /// (2c) extensions of one prefix probe different ports.
    DivergentPorts,
    /// One rule's pattern is a subnet of another's.
    Subnet,
    /// Two rules have the same pattern.
    Duplicate,
    /// Disjointness could not be decided either way.
    UnknownDisjoint,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::BaseOverlap => "1a",
            Clause::SiblingOverlap => "2a",
            Clause::MissingPrefix => "2b",
            Clause::DivergentPorts => "2c",
            Clause::Subnet => "subnet",
            Clause::Duplicate => "duplicate",
            Clause::UnknownDisjoint => "unknown-disjoint",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub clause: Clause,
    pub message: String,
    /// Rendered patterns involved.
    pub naps: Vec<String>,
    /// Environment satisfying both guards, when an overlap was proven.
    pub witness: Option<Env>,
    /// Warnings block only in strict mode.
    pub warning: bool,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.warning { "warning" } else { "violation" };
        write!(f, "{} [{}]: {}", kind, self.clause, self.message)?;
        for n in &self.naps {
            write!(f, "\n    {}", n)?;
        }
        if let Some(w) = &self.witness {
            let vars: Vec<String> = w.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
            write!(f, "\n    witness: {{{}}}", vars.join(", "))?;
        }
        Ok(())
    }
}

impl Diagnostic {
    pub fn blocks(&self, strict: bool) -> bool {
        !self.warning || strict
    }
}

/// Flattens nested `and` into a conjunct list.
fn conjuncts(e: &AttrExpr) -> Vec<&AttrExpr> {
    match e {
        AttrExpr::Bin(crate::expr::BinOp::And, a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        other => vec![other],
    }
}

fn negation_of(e: &AttrExpr, other: &AttrExpr) -> bool {
    match e {
        AttrExpr::Not(inner) => inner.as_ref() == other,
        _ => false,
    }
}

/// Three-valued disjointness of two guards over the shared variables `vars`.
///
/// Proven-disjoint comes from syntactic guard-chain shape: one condition is
/// `otherwise` relative to the other, or one carries the other's negation as
/// a conjunct. Proven-overlapping comes with a witness environment found by
/// sampling; anything else is `Unknown`.
pub fn disjoint(
    c1: &Condition,
    c2: &Condition,
    vars: &BTreeSet<String>,
    opts: &CheckOptions,
) -> Disjointness {
    // `otherwise` versus one of the conditions it negates.
    if let Condition::Otherwise { negates } = c1 {
        if negates.contains(&c2.semantics()) {
            return Disjointness::ProvenDisjoint;
        }
    }
    if let Condition::Otherwise { negates } = c2 {
        if negates.contains(&c1.semantics()) {
            return Disjointness::ProvenDisjoint;
        }
    }
    let s1 = c1.semantics();
    let s2 = c2.semantics();
    let c1s = conjuncts(&s1);
    let c2s = conjuncts(&s2);
    // A guard chain `c` vs `not(c) and d` (or any conjunct-level negation).
    for a in &c1s {
        for b in &c2s {
            if negation_of(a, b) || negation_of(b, a) {
                return Disjointness::ProvenDisjoint;
            }
        }
    }
    if negation_of(&s1, &s2) || negation_of(&s2, &s1) {
        return Disjointness::ProvenDisjoint;
    }

    // Hunt for an environment where both hold.
    let both_hold = |env: &Env| -> bool {
        matches!(c1.holds(env), Ok(true)) && matches!(c2.holds(env), Ok(true))
    };
    let mut candidates: BTreeSet<i64> = [-2, -1, 0, 1, 2, 3].into_iter().collect();
    for lit in s1.literals().into_iter().chain(s2.literals()) {
        for v in [lit.wrapping_sub(1), lit, lit.wrapping_add(1)] {
            candidates.insert(v);
        }
    }
    let candidates: Vec<i64> = candidates.into_iter().collect();
    let vars: Vec<&String> = vars.iter().collect();
    if vars.is_empty() {
        let env = Env::new();
        if both_hold(&env) {
            return Disjointness::ProvenOverlapping(env);
        }
        return Disjointness::Unknown;
    }
    // Exhaustive over candidate values when the grid is small.
    let grid = candidates.len().checked_pow(vars.len() as u32);
    if let Some(total) = grid.filter(|&t| t <= 20_000) {
        for mut ix in 0..total {
            let mut env = Env::new();
            for v in &vars {
                env.insert((*v).clone(), candidates[ix % candidates.len()]);
                ix /= candidates.len();
            }
            if both_hold(&env) {
                return Disjointness::ProvenOverlapping(env);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let mut env = Env::new();
        for v in &vars {
            let x: i64 = if rng.gen_bool(0.5) {
                rng.gen_range(-40..=40)
            } else {
                candidates[rng.gen_range(0..candidates.len())]
            };
            env.insert((*v).clone(), x);
        }
        if both_hold(&env) {
            return Disjointness::ProvenOverlapping(env);
        }
    }
    Disjointness::Unknown
}

/// One element of the set under check: a pattern with its canonical views.
struct Element {
    key: String,
    nap: ConditionalNap,
    views: Vec<CanonNap>,
}

fn view_prefix_render(v: &CanonNap) -> String {
    let mut shorter = v.clone();
    shorter.connections.pop();
    shorter.render()
}

fn cond_vars(a: &Condition, b: &Condition) -> BTreeSet<String> {
    let mut vars = a.free_vars();
    vars.extend(b.free_vars());
    vars
}

/// Checks Definition 3.4 over a set of conditional NAPs, returning every
/// violation found (empty means the set is local sequential).
pub fn check_local_sequentiality(
    naps: &[ConditionalNap],
    table: &SymbolTable,
    opts: &CheckOptions,
) -> Vec<Diagnostic> {
    let mut elements: Vec<Element> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for nap in naps {
        let key = nap.canon_key(table);
        if seen.insert(key.clone()) {
            elements.push(Element {
                key,
                nap: nap.clone(),
                views: nap.canon_views(table),
            });
        }
    }

    let mut out = Vec::new();
    let report_overlap =
        |clause: Clause, a: &Element, b: &Element, ca: &Condition, cb: &Condition, out: &mut Vec<Diagnostic>| {
            match disjoint(ca, cb, &cond_vars(ca, cb), opts) {
                Disjointness::ProvenDisjoint => {}
                Disjointness::ProvenOverlapping(witness) => out.push(Diagnostic {
                    clause,
                    message: format!("conditions `{}` and `{}` can hold together", ca, cb),
                    naps: vec![a.nap.render(table), b.nap.render(table)],
                    witness: Some(witness),
                    warning: false,
                }),
                Disjointness::Unknown => out.push(Diagnostic {
                    clause: Clause::UnknownDisjoint,
                    message: format!(
                        "could not decide whether `{}` and `{}` are disjoint",
                        ca, cb
                    ),
                    naps: vec![a.nap.render(table), b.nap.render(table)],
                    witness: None,
                    warning: true,
                }),
            }
        };

    for (i, a) in elements.iter().enumerate() {
        for b in elements.iter().skip(i + 1) {
            for va in &a.views {
                for vb in &b.views {
                    if va.base != vb.base {
                        continue;
                    }
                    // (1a): two bare conditional pairs over one active pair.
                    if va.connections.is_empty() && vb.connections.is_empty() {
                        report_overlap(Clause::BaseOverlap, a, b, &va.cond, &vb.cond, &mut out);
                        continue;
                    }
                    if va.connections.len() != vb.connections.len() || va.connections.is_empty() {
                        continue;
                    }
                    // Same pattern prefix (structure and conditions)?
                    let k = va.connections.len() - 1;
                    let same_prefix = va.cond == vb.cond
                        && va.connections[..k]
                            .iter()
                            .zip(&vb.connections[..k])
                            .all(|(x, y)| x == y);
                    if !same_prefix {
                        continue;
                    }
                    let la = &va.connections[k];
                    let lb = &vb.connections[k];
                    if la.at_port == lb.at_port && la.symbol == lb.symbol {
                        // (2a): sibling guards on the same extension.
                        report_overlap(Clause::SiblingOverlap, a, b, &la.cond, &lb.cond, &mut out);
                    }
                }
            }
        }
    }

    // (2b): every extension's prefix must be in the set.
    let keys: BTreeSet<&String> = elements.iter().map(|e| &e.key).collect();
    for e in &elements {
        if e.nap.connections.is_empty() {
            continue;
        }
        let mut prefix = e.nap.clone();
        prefix.connections.pop();
        let pkey = prefix.canon_key(table);
        if !keys.contains(&pkey) {
            out.push(Diagnostic {
                clause: Clause::MissingPrefix,
                message: "pattern extends a prefix that is not itself in the set".into(),
                naps: vec![e.nap.render(table), prefix.render(table)],
                witness: None,
                warning: false,
            });
        }
    }

    // (2c): all extensions of one prefix must probe the same port.
    let mut by_prefix: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        for v in &e.views {
            if v.connections.is_empty() {
                continue;
            }
            let port = v.connections.last().unwrap().at_port;
            by_prefix
                .entry(view_prefix_render(v))
                .or_default()
                .push((i, port));
        }
    }
    let mut flagged: BTreeSet<(usize, usize)> = BTreeSet::new();
    for entries in by_prefix.values() {
        for (ea, pa) in entries {
            for (eb, pb) in entries {
                // Two views of one symmetric pattern are not a divergence.
                if ea >= eb || pa == pb {
                    continue;
                }
                if flagged.insert((*ea, *eb)) {
                    out.push(Diagnostic {
                        clause: Clause::DivergentPorts,
                        message: "extensions of the same prefix probe different ports".into(),
                        naps: vec![
                            elements[*ea].nap.render(table),
                            elements[*eb].nap.render(table),
                        ],
                        witness: None,
                        warning: false,
                    });
                }
            }
        }
    }

    out
}

/// Checks Definition 3.6 on a rule list: the union of all pattern prefixes
/// must be local sequential, no pattern may duplicate another, and no pattern
/// may be an (availability-preserving) subnet of another.
pub fn check_pairwise_distinct(
    rules: &[Rule],
    table: &SymbolTable,
    opts: &CheckOptions,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let keys: Vec<String> = rules.iter().map(|r| r.lhs.canon_key(table)).collect();
    let mut dup_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            if keys[i] == keys[j] {
                dup_pairs.insert((i, j));
                out.push(Diagnostic {
                    clause: Clause::Duplicate,
                    message: format!(
                        "rules `{}` and `{}` have the same pattern",
                        rules[i].name, rules[j].name
                    ),
                    naps: vec![rules[i].lhs.render(table)],
                    witness: None,
                    warning: false,
                });
            }
        }
    }

    let mut union: Vec<ConditionalNap> = Vec::new();
    for r in rules {
        union.extend(r.lhs.all_sub());
    }
    out.extend(check_local_sequentiality(&union, table, opts));

    for i in 0..rules.len() {
        for j in 0..rules.len() {
            if i == j || dup_pairs.contains(&(i.min(j), i.max(j))) {
                continue;
            }
            if crate::cnap::subnet(&rules[i].lhs, &rules[j].lhs, table) {
                out.push(Diagnostic {
                    clause: Clause::Subnet,
                    message: format!(
                        "pattern of rule `{}` is a subnet of rule `{}`",
                        rules[i].name, rules[j].name
                    ),
                    naps: vec![rules[i].lhs.render(table), rules[j].lhs.render(table)],
                    witness: None,
                    warning: false,
                });
            }
        }
    }

    out
}

/// Convenience wrapper mapping diagnostics to the set-level verdict.
pub fn blocking<'d>(diags: &'d [Diagnostic], strict: bool) -> Vec<&'d Diagnostic> {
    diags.iter().filter(|d| d.blocks(strict)).collect()
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn ok(&self, strict: bool) -> bool {
        blocking(&self.diagnostics, strict).is_empty()
    }
}
