//! The reduction engine: matching conditional-NAP rules against nets,
//! applying rewrites, and driving nets to normal form.
//!
//! Matching walks a rule's connections in their sequential order. A pair
//! whose structure matches a proper prefix of some rule, with the next
//! probed port not yet holding a principal, is *blocked*: the missing agent
//! may still arrive, so the pair parks and is retried after later rewrites.
//! A pair no rule can ever match is dropped. Attribute values never change
//! once an agent exists, so a guard that evaluates to false rules its rule
//! out for good.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnap::RuleSet;
use crate::expr::{eval, Env, EvalError};
use crate::iso::iso;
use crate::net::{ActivePair, AgentId, Net, PortRef};

/// Order in which pending active pairs are picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Fifo,
    Lifo,
    Random(u64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Fifo => write!(f, "fifo"),
            Strategy::Lifo => write!(f, "lifo"),
            Strategy::Random(seed) => write!(f, "random({})", seed),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("step limit of {max} reached")]
    StepLimit { max: u64 },
    #[error("rule `{rule}`: {source}")]
    Fault { rule: String, source: EvalError },
}

/// A successful match of one rule against one active pair.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub rule_index: usize,
    /// The rule's left side matched the pair's right agent.
    pub flipped: bool,
    pub env: Env,
    /// LHS free-port name to the pattern port realizing it (on a consumed
    /// agent).
    pub boundary: Vec<(String, PortRef)>,
    pub consumed: Vec<AgentId>,
}

#[derive(Debug, Clone)]
pub enum MatchOutcome {
    Match(MatchResult),
    /// Some rule matches a proper structural prefix and may complete later.
    Blocked,
    /// No rule can ever match this pair.
    NoMatch,
}

enum TryOutcome {
    Full(MatchResult),
    /// Structure matched so far; the next probed port has no principal yet.
    Prefix,
    /// Structure or guard rules this rule out permanently.
    Never,
}

fn try_rule(
    net: &Net<i64>,
    rules: &RuleSet,
    pair: ActivePair,
    rule_index: usize,
    flipped: bool,
) -> Result<TryOutcome, EngineError> {
    let rule = rules.get(rule_index);
    let (l_id, r_id) = if flipped {
        (pair.right, pair.left)
    } else {
        (pair.left, pair.right)
    };
    let mut env: Env = Env::new();
    let mut ports: BTreeMap<String, PortRef> = BTreeMap::new();
    let mut consumed = vec![l_id, r_id];

    let bind = |pat: &crate::cnap::PatternAgent,
                    id: AgentId,
                    env: &mut Env,
                    ports: &mut BTreeMap<String, PortRef>| {
        let agent = net.agent(id).expect("live agent");
        debug_assert_eq!(agent.symbol, pat.symbol);
        for (v, &x) in pat.attr_vars.iter().zip(agent.attrs.iter()) {
            env.insert(v.clone(), x);
        }
        for (k, p) in pat.port_vars.iter().enumerate() {
            ports.insert(p.clone(), PortRef::aux(id, k + 1));
        }
    };
    bind(&rule.lhs.left, l_id, &mut env, &mut ports);
    bind(&rule.lhs.right, r_id, &mut env, &mut ports);

    let fault = |source: EvalError| EngineError::Fault {
        rule: rule.name.clone(),
        source,
    };
    if !rule.lhs.cond.holds(&env).map_err(fault)? {
        return Ok(TryOutcome::Never);
    }
    for conn in &rule.lhs.connections {
        let at = ports[&conn.at_port];
        match net.partner(at) {
            // The nested agent has not arrived (or never will, for a free
            // port of the whole net); both park the pair.
            None | Some(PortRef::Iface(_)) => return Ok(TryOutcome::Prefix),
            Some(PortRef::Agent { id, slot: 0 }) => {
                let agent = net.agent(id).expect("live agent");
                if agent.symbol != conn.agent.symbol {
                    return Ok(TryOutcome::Never);
                }
                bind(&conn.agent, id, &mut env, &mut ports);
                consumed.push(id);
                let fault = |source: EvalError| EngineError::Fault {
                    rule: rule.name.clone(),
                    source,
                };
                if !conn.cond.holds(&env).map_err(fault)? {
                    return Ok(TryOutcome::Never);
                }
            }
            // Wired to an auxiliary port: the value is still being computed.
            Some(PortRef::Agent { .. }) => return Ok(TryOutcome::Prefix),
        }
    }
    let boundary = rule
        .lhs
        .free_ports()
        .into_iter()
        .map(|name| {
            let p = ports[&name];
            (name, p)
        })
        .collect();
    Ok(TryOutcome::Full(MatchResult {
        rule_index,
        flipped,
        env,
        boundary,
        consumed,
    }))
}

/// Matches `pair` against the rule set, trying rules in declaration order
/// and both orientations.
pub fn match_pair(
    net: &Net<i64>,
    rules: &RuleSet,
    pair: ActivePair,
) -> Result<MatchOutcome, EngineError> {
    let ls = net.agent(pair.left).expect("live agent").symbol;
    let rs = net.agent(pair.right).expect("live agent").symbol;
    let mut any_blocked = false;
    for (idx, flipped) in rules.candidates(ls, rs) {
        match try_rule(net, rules, pair, idx, flipped)? {
            TryOutcome::Full(m) => return Ok(MatchOutcome::Match(m)),
            TryOutcome::Prefix => any_blocked = true,
            TryOutcome::Never => {}
        }
    }
    Ok(if any_blocked {
        MatchOutcome::Blocked
    } else {
        MatchOutcome::NoMatch
    })
}

/// Applies a matched rule: removes the consumed agents, instantiates the
/// right-hand-side template under the match environment, and splices the
/// template's interface onto the boundary. Returns the wires created, for
/// redex discovery.
pub fn apply(
    net: &mut Net<i64>,
    rules: &RuleSet,
    m: &MatchResult,
) -> Result<Vec<(PortRef, PortRef)>, EngineError> {
    let rule = rules.get(m.rule_index);
    let fault = |source: EvalError| EngineError::Fault {
        rule: rule.name.clone(),
        source,
    };

    // Where each free-port name leads outside the pattern, recorded before
    // the pattern is torn down. A partner that is itself a pattern port
    // becomes a name-to-name link.
    let pattern_port_names: BTreeMap<PortRef, String> = m
        .boundary
        .iter()
        .map(|(n, p)| (*p, n.clone()))
        .collect();
    let mut outside: BTreeMap<String, PortRef> = BTreeMap::new();
    let mut links: Vec<(String, String)> = Vec::new();
    for (name, pat_port) in &m.boundary {
        match net.partner(*pat_port) {
            None => {}
            Some(q) => {
                if let Some(other) = pattern_port_names.get(&q) {
                    if other > name {
                        links.push((name.clone(), other.clone()));
                    }
                } else {
                    outside.insert(name.clone(), q);
                }
            }
        }
    }

    for &id in &m.consumed {
        net.remove_agent(id);
    }

    // Instantiate the template.
    let mut agent_map: BTreeMap<AgentId, AgentId> = BTreeMap::new();
    for (tid, tagent) in rule.rhs.agents() {
        let attrs = tagent
            .attrs
            .iter()
            .map(|e| eval(e, &m.env))
            .collect::<Result<Vec<i64>, EvalError>>()
            .map_err(fault)?;
        let id = net
            .add_agent(rules.symbols(), tagent.symbol, attrs)
            .expect("template agents are well-formed");
        agent_map.insert(tid, id);
    }

    let mut created = Vec::new();
    let mut rhs_end: BTreeMap<String, PortRef> = BTreeMap::new();
    for (a, b) in rule.rhs.wire_pairs() {
        let resolve = |p: PortRef| -> Result<PortRef, String> {
            match p {
                PortRef::Agent { id, slot } => Ok(PortRef::Agent {
                    id: agent_map[&id],
                    slot,
                }),
                PortRef::Iface(i) => Err(rule.rhs.interface()[i].clone()),
            }
        };
        match (resolve(a), resolve(b)) {
            (Ok(x), Ok(y)) => {
                net.connect(x, y).expect("template wires are fresh");
                created.push((x, y));
            }
            (Ok(x), Err(n)) | (Err(n), Ok(x)) => {
                rhs_end.insert(n, x);
            }
            (Err(n1), Err(n2)) => {
                links.push((n1, n2));
            }
        }
    }

    // Fuse the boundary: walk name components, collecting their concrete
    // endpoints. Two endpoints make a wire; one is left dangling (a port the
    // surrounding net never wired); none is a closed loop that disappears.
    let mut adjacency: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (a, b) in &links {
        adjacency.entry(a.clone()).or_default().push(b.clone());
        adjacency.entry(b.clone()).or_default().push(a.clone());
    }
    let mut visited: BTreeMap<String, bool> = BTreeMap::new();
    let names: Vec<String> = m.boundary.iter().map(|(n, _)| n.clone()).collect();
    for start in names {
        if visited.get(&start).copied().unwrap_or(false) {
            continue;
        }
        let mut stack = vec![start.clone()];
        let mut component = Vec::new();
        while let Some(n) = stack.pop() {
            if visited.get(&n).copied().unwrap_or(false) {
                continue;
            }
            visited.insert(n.clone(), true);
            component.push(n.clone());
            if let Some(nexts) = adjacency.get(&n) {
                stack.extend(nexts.iter().cloned());
            }
        }
        let mut endpoints = Vec::new();
        for n in &component {
            if let Some(&p) = outside.get(n) {
                endpoints.push(p);
            }
            if let Some(&p) = rhs_end.get(n) {
                endpoints.push(p);
            }
        }
        match endpoints.len() {
            0 | 1 => {}
            2 => {
                net.connect(endpoints[0], endpoints[1])
                    .expect("fused ports were free");
                created.push((endpoints[0], endpoints[1]));
            }
            n => unreachable!("boundary component with {} endpoints", n),
        }
    }

    Ok(created)
}

/// One entry per reduction step.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub index: u64,
    pub rule: String,
    pub left_symbol: String,
    pub right_symbol: String,
    pub env: Env,
}

impl TraceStep {
    /// `#<n> <ruleName> <leftSym>><<rightSym> {var=val,...}`
    pub fn render(&self) -> String {
        let env: Vec<String> = self.env.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        format!(
            "#{} {} {}><{} {{{}}}",
            self.index,
            self.rule,
            self.left_symbol,
            self.right_symbol,
            env.join(",")
        )
    }
}

pub type Trace = Vec<TraceStep>;

#[derive(Debug, Clone)]
pub enum StepOutcome {
    Applied { rule: String },
    Blocked,
    NoMatch,
    Stale,
}

/// Stepwise reduction state. The built-in strategies drive it through
/// [`reduce`]; tests and tools may pick pending pairs themselves.
pub struct Reducer<'r> {
    net: Net<i64>,
    rules: &'r RuleSet,
    pending: Vec<ActivePair>,
    parked: Vec<ActivePair>,
    steps: u64,
    trace: Trace,
}

impl<'r> Reducer<'r> {
    pub fn new(net: Net<i64>, rules: &'r RuleSet) -> Reducer<'r> {
        let pending = net.find_active_pairs();
        Reducer {
            net,
            rules,
            pending,
            parked: Vec::new(),
            steps: 0,
            trace: Vec::new(),
        }
    }

    pub fn net(&self) -> &Net<i64> {
        &self.net
    }

    pub fn pending(&self) -> &[ActivePair] {
        &self.pending
    }

    /// Pairs whose match is waiting on agents that have not arrived.
    pub fn parked(&self) -> &[ActivePair] {
        &self.parked
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_parts(self) -> (Net<i64>, Trace) {
        (self.net, self.trace)
    }

    pub fn done(&self) -> bool {
        self.pending.is_empty()
    }

    /// True when reduction stopped with parked pairs left over: the net is a
    /// normal form only relative to its unfilled inputs.
    pub fn blocked_remain(&self) -> bool {
        !self.parked.is_empty()
    }

    /// Processes the pending pair at `index`.
    pub fn step_at(&mut self, index: usize) -> Result<StepOutcome, EngineError> {
        let pair = self.pending.remove(index);
        if self.net.agent(pair.left).is_none() || self.net.agent(pair.right).is_none() {
            return Ok(StepOutcome::Stale);
        }
        match match_pair(&self.net, self.rules, pair)? {
            MatchOutcome::Blocked => {
                self.parked.push(pair);
                Ok(StepOutcome::Blocked)
            }
            MatchOutcome::NoMatch => Ok(StepOutcome::NoMatch),
            MatchOutcome::Match(m) => {
                let rule = self.rules.get(m.rule_index);
                let (lsym, rsym) = (
                    self.rules.symbols().name(rule.lhs.left.symbol).to_string(),
                    self.rules.symbols().name(rule.lhs.right.symbol).to_string(),
                );
                let name = rule.name.clone();
                let env = m.env.clone();
                let created = apply(&mut self.net, self.rules, &m)?;
                self.steps += 1;
                self.trace.push(TraceStep {
                    index: self.steps,
                    rule: name.clone(),
                    left_symbol: lsym,
                    right_symbol: rsym,
                    env,
                });
                for (a, b) in created {
                    if let (
                        PortRef::Agent { id: x, slot: 0 },
                        PortRef::Agent { id: y, slot: 0 },
                    ) = (a, b)
                    {
                        self.pending.push(ActivePair::new(x, y));
                    }
                }
                // A rewrite may have supplied what a parked pair waits for.
                self.pending.append(&mut self.parked);
                Ok(StepOutcome::Applied { rule: name })
            }
        }
    }
}

/// Result of a completed reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub net: Net<i64>,
    pub trace: Trace,
    pub steps: u64,
    /// Pairs remained that wait on free inputs of the net.
    pub blocked_remain: bool,
}

/// Reduces to normal form under the given strategy.
pub fn reduce(
    net: Net<i64>,
    rules: &RuleSet,
    strategy: Strategy,
    max_steps: u64,
) -> Result<Reduction, EngineError> {
    let mut reducer = Reducer::new(net, rules);
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    while !reducer.done() {
        if reducer.steps() >= max_steps {
            return Err(EngineError::StepLimit { max: max_steps });
        }
        let index = match (&strategy, &mut rng) {
            (Strategy::Fifo, _) => 0,
            (Strategy::Lifo, _) => reducer.pending().len() - 1,
            (Strategy::Random(_), Some(rng)) => rng.gen_range(0..reducer.pending().len()),
            _ => unreachable!(),
        };
        reducer.step_at(index)?;
    }
    let blocked_remain = reducer.blocked_remain();
    let steps = reducer.steps();
    let (net, trace) = reducer.into_parts();
    Ok(Reduction {
        net,
        trace,
        steps,
        blocked_remain,
    })
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub label: String,
    pub steps: u64,
    pub blocked_remain: bool,
}

/// Report of reducing one net under many orders.
#[derive(Debug, Clone)]
pub struct OrderReport {
    pub runs: Vec<RunSummary>,
    pub all_iso: bool,
    pub equal_steps: bool,
    /// Normal form of the first run.
    pub reference: Net<i64>,
    /// The first normal form that differs from the reference, with the label
    /// of the run that produced it.
    pub divergent: Option<(String, Net<i64>)>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.all_iso && self.equal_steps
    }
}

/// Runs `reduce` under Fifo, Lifo and `trials` seeded random orders and
/// compares outcomes. Random trials also shuffle the rule precedence: for a
/// pairwise-distinct rule set at most one rule is ever available per pair, so
/// precedence is immaterial; a rule set that relies on it is exposed here.
pub fn reduce_all_orders(
    net: &Net<i64>,
    rules: &RuleSet,
    trials: u64,
    seed: u64,
    max_steps: u64,
) -> Result<OrderReport, EngineError> {
    let mut runs = Vec::new();
    let mut forms: Vec<Net<i64>> = Vec::new();
    let mut steps_seen: Vec<u64> = Vec::new();

    for (label, strategy) in [
        ("fifo".to_string(), Strategy::Fifo),
        ("lifo".to_string(), Strategy::Lifo),
    ] {
        let red = reduce(net.clone(), rules, strategy, max_steps)?;
        runs.push(RunSummary {
            label,
            steps: red.steps,
            blocked_remain: red.blocked_remain,
        });
        steps_seen.push(red.steps);
        forms.push(red.net);
    }
    for t in 0..trials {
        let run_seed = seed.wrapping_add(t);
        let mut order: Vec<usize> = (0..rules.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed ^ 0x5eed0f_a11e5_u64);
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let shuffled = RuleSet::new(
            rules.symbols().clone(),
            order.iter().map(|&i| rules.get(i).clone()).collect(),
        );
        let red = reduce(net.clone(), &shuffled, Strategy::Random(run_seed), max_steps)?;
        runs.push(RunSummary {
            label: format!("random({})", run_seed),
            steps: red.steps,
            blocked_remain: red.blocked_remain,
        });
        steps_seen.push(red.steps);
        forms.push(red.net);
    }

    let divergent = forms
        .iter()
        .position(|f| !iso(f, &forms[0]))
        .map(|i| (runs[i].label.clone(), forms[i].clone()));
    let all_iso = divergent.is_none();
    let equal_steps = steps_seen.iter().all(|&s| s == steps_seen[0]);
    Ok(OrderReport {
        runs,
        all_iso,
        equal_steps,
        reference: forms.swap_remove(0),
        divergent,
    })
}
