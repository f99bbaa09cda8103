//! Ground truth for the encoders: model decoding, graph property checks,
//! and exhaustive soundness/completeness validation.
//!
//! An encoding is *sound* when every model of base ∧ added decodes to a
//! graph satisfying the constraint, and *complete* when every base model
//! whose decoded graph satisfies the constraint extends to a model of
//! base ∧ added agreeing on the base variables. [`brute_force_check`]
//! decides both by sweeping all base assignments and searching for
//! auxiliary extensions.

use crate::formula::{GraphConstraint, GraphInstance, Lit};
use crate::graph::{DirectedGraph, Node};
use std::collections::VecDeque;
use thiserror::Error;

/// Enumeration sweeps all assignments of the base variables; beyond this
/// many the sweep is infeasible.
pub const BRUTE_FORCE_BASE_LIMIT: u32 = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("model covers {got} variables, instance references variable {want}")]
    VariableOutOfRange { want: u32, got: u32 },
    #[error("brute force limited to {limit} base variables, instance has {got}")]
    TooLargeForEnumeration { limit: u32, got: u32 },
}

/// A total assignment to variables `1..=var_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>, // index 0 unused
}

impl Model {
    pub fn all_false(var_count: u32) -> Self {
        Self {
            values: vec![false; var_count as usize + 1],
        }
    }

    /// Builds a model from per-variable values for variables `1..`.
    pub fn from_values(values: Vec<bool>) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(false);
        v.extend(values);
        Self { values: v }
    }

    pub fn var_count(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn is_true(&self, var: u32) -> bool {
        self.values[var as usize]
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize] = value;
    }

    pub fn satisfies_clause(&self, clause: &[Lit]) -> bool {
        clause
            .iter()
            .any(|&l| self.is_true(l.unsigned_abs()) == (l > 0))
    }

    pub fn satisfies(&self, clauses: &[Vec<Lit>]) -> bool {
        clauses.iter().all(|c| self.satisfies_clause(c))
    }
}

/// Graph decoded from a model: arc `(u, v)` is present iff its variable is
/// true.
pub fn decode_model(inst: &GraphInstance, m: &Model) -> Result<DirectedGraph, OracleError> {
    let mut arcs = Vec::new();
    for (&(u, v), &var) in &inst.arc_var {
        if var > m.var_count() {
            return Err(OracleError::VariableOutOfRange {
                want: var,
                got: m.var_count(),
            });
        }
        if m.is_true(var) {
            arcs.push((u, v));
        }
    }
    Ok(DirectedGraph::new(inst.graph.node_count(), arcs).expect("decoded arcs are graph arcs"))
}

/// Cycle detection by topological sorting (Kahn peeling).
pub fn check_acyclic(g: &DirectedGraph) -> bool {
    kahn_residual(g).is_empty()
}

/// Nodes left after repeatedly removing in-degree-zero nodes. Nonempty iff
/// the graph has a cycle; every residual node has an in-neighbor in the
/// residual.
fn kahn_residual(g: &DirectedGraph) -> Vec<Node> {
    let n = g.node_count() as usize;
    let adj = g.out_adjacency();
    let mut indeg = vec![0usize; n + 1];
    for (_, v) in g.arcs() {
        indeg[v as usize] += 1;
    }
    let mut queue: VecDeque<Node> = g.nodes().filter(|&v| indeg[v as usize] == 0).collect();
    let mut removed = vec![false; n + 1];
    while let Some(u) = queue.pop_front() {
        removed[u as usize] = true;
        for &v in &adj[u as usize] {
            indeg[v as usize] -= 1;
            if indeg[v as usize] == 0 {
                queue.push_back(v);
            }
        }
    }
    g.nodes().filter(|&v| !removed[v as usize]).collect()
}

/// Some cycle's vertex sequence, if the graph has one. First found, not
/// shortest.
pub fn find_cycle(g: &DirectedGraph) -> Option<Vec<Node>> {
    let residual = kahn_residual(g);
    let start = *residual.first()?;
    let n = g.node_count() as usize;
    let mut in_residual = vec![false; n + 1];
    for &v in &residual {
        in_residual[v as usize] = true;
    }
    let inn = g.in_adjacency();
    // Walk backwards; every residual node keeps an in-neighbor in the
    // residual, so the walk must revisit a node.
    let mut path = vec![start];
    let mut seen_at = vec![usize::MAX; n + 1];
    seen_at[start as usize] = 0;
    let mut cur = start;
    loop {
        let prev = *inn[cur as usize]
            .iter()
            .find(|&&p| in_residual[p as usize])
            .expect("residual node has a residual in-neighbor");
        if seen_at[prev as usize] != usize::MAX {
            let mut cycle: Vec<Node> = path[seen_at[prev as usize]..].to_vec();
            cycle.reverse(); // walk was backwards
            return Some(cycle);
        }
        seen_at[prev as usize] = path.len();
        path.push(prev);
        cur = prev;
    }
}

fn reach_set(adj: &[Vec<Node>], from: Node, n: usize) -> Vec<bool> {
    let mut seen = vec![false; n + 1];
    seen[from as usize] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &v in &adj[u as usize] {
            if !std::mem::replace(&mut seen[v as usize], true) {
                stack.push(v);
            }
        }
    }
    seen
}

/// True iff `t` is reachable from `s`; every node reaches itself by the
/// empty path.
pub fn check_reach(g: &DirectedGraph, s: Node, t: Node) -> bool {
    reach_set(&g.out_adjacency(), s, g.node_count() as usize)[t as usize]
}

/// True iff every node reachable from `s` (including `s`) reaches `t`.
pub fn check_ereach(g: &DirectedGraph, s: Node, t: Node) -> bool {
    ereach_offender(g, s, t).is_none()
}

/// First node reachable from `s` that cannot reach `t`, if any.
fn ereach_offender(g: &DirectedGraph, s: Node, t: Node) -> Option<Node> {
    let n = g.node_count() as usize;
    let forward = reach_set(&g.out_adjacency(), s, n);
    let backward = reach_set(&g.in_adjacency(), t, n);
    g.nodes()
        .find(|&v| forward[v as usize] && !backward[v as usize])
}

/// Diagnostic attached to a failed constraint verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Vertex sequence of an offending cycle.
    Cycle(Vec<Node>),
    /// Unreachable or offending node.
    Node(Node),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintVerdict {
    pub constraint: GraphConstraint,
    pub pass: bool,
    pub witness: Option<Witness>,
}

/// Outcome of checking a model against an instance's base clauses and every
/// declared graph constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub base_ok: bool,
    pub decoded_arcs: Vec<(Node, Node)>,
    pub verdicts: Vec<ConstraintVerdict>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.base_ok && self.verdicts.iter().all(|v| v.pass)
    }
}

/// Checks `m` against the base clauses and every constraint of `inst`.
pub fn verify(inst: &GraphInstance, m: &Model) -> Result<VerificationReport, OracleError> {
    let decoded = decode_model(inst, m)?;
    let base_ok = m.satisfies(&inst.base.clauses);
    let verdicts = inst
        .constraints
        .iter()
        .map(|&constraint| {
            let (pass, witness) = match constraint {
                GraphConstraint::Acyclic => match find_cycle(&decoded) {
                    None => (true, None),
                    Some(cycle) => (false, Some(Witness::Cycle(cycle))),
                },
                GraphConstraint::Reach(s, t) => {
                    if check_reach(&decoded, s, t) {
                        (true, None)
                    } else {
                        (false, Some(Witness::Node(t)))
                    }
                }
                GraphConstraint::NoReach(s, t) => {
                    if check_reach(&decoded, s, t) {
                        (false, Some(Witness::Node(t)))
                    } else {
                        (true, None)
                    }
                }
                GraphConstraint::EReach(s, t) => match ereach_offender(&decoded, s, t) {
                    None => (true, None),
                    Some(v) => (false, Some(Witness::Node(v))),
                },
            };
            ConstraintVerdict {
                constraint,
                pass,
                witness,
            }
        })
        .collect();
    Ok(VerificationReport {
        base_ok,
        decoded_arcs: decoded.arcs().collect(),
        verdicts,
    })
}

fn constraint_holds(g: &DirectedGraph, c: GraphConstraint) -> bool {
    match c {
        GraphConstraint::Acyclic => check_acyclic(g),
        GraphConstraint::Reach(s, t) => check_reach(g, s, t),
        GraphConstraint::NoReach(s, t) => !check_reach(g, s, t),
        GraphConstraint::EReach(s, t) => check_ereach(g, s, t),
    }
}

/// Verdict of the exhaustive sweep, with counterexample base assignments
/// (bit `var - 1` = value of `var`) when a direction fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceReport {
    pub sound: bool,
    pub complete: bool,
    pub unsound_base: Option<u32>,
    pub incomplete_base: Option<u32>,
}

/// Sweeps every assignment of the instance's base variables and checks both
/// encoding directions against the graph oracles. Auxiliary extensions are
/// decided by an exhaustive backtracking search with unit propagation.
pub fn brute_force_check(
    inst: &GraphInstance,
    encoded: &crate::formula::EncodedFormula,
) -> Result<BruteForceReport, OracleError> {
    let base_n = inst.base.var_count;
    if base_n > BRUTE_FORCE_BASE_LIMIT {
        return Err(OracleError::TooLargeForEnumeration {
            limit: BRUTE_FORCE_BASE_LIMIT,
            got: base_n,
        });
    }

    // Base clause masks for O(1) evaluation per assignment.
    let base_masks: Vec<(u32, u32)> = inst
        .base
        .clauses
        .iter()
        .map(|cl| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for &l in cl {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect();

    let arc_bits: Vec<((Node, Node), u32)> = inst
        .arc_var
        .iter()
        .map(|(&arc, &var)| (arc, 1u32 << (var - 1)))
        .collect();

    let mut all_clauses: Vec<Vec<Lit>> = inst.base.clauses.clone();
    all_clauses.extend(encoded.added_clauses.iter().cloned());
    let mut search = ExtendSearch::new(all_clauses, encoded.new_var_count);

    let mut report = BruteForceReport {
        sound: true,
        complete: true,
        unsound_base: None,
        incomplete_base: None,
    };

    for mask in 0u64..(1u64 << base_n) {
        let mask = mask as u32;
        let base_ok = base_masks
            .iter()
            .all(|&(pos, neg)| pos & mask != 0 || neg & !mask != 0);
        let constraint_ok = {
            let arcs = arc_bits
                .iter()
                .filter(|&&(_, bit)| mask & bit != 0)
                .map(|&(arc, _)| arc);
            let g = DirectedGraph::new(inst.graph.node_count(), arcs)
                .expect("decoded arcs are graph arcs");
            inst.constraints.iter().all(|&c| constraint_holds(&g, c))
        };
        if !base_ok && !constraint_ok {
            continue;
        }
        let extendable = search.extendable(base_n, mask);
        debug_assert!(!extendable || base_ok);
        if extendable && !constraint_ok && report.sound {
            report.sound = false;
            report.unsound_base = Some(mask);
        }
        if base_ok && constraint_ok && !extendable && report.complete {
            report.complete = false;
            report.incomplete_base = Some(mask);
        }
        if !report.sound && !report.complete {
            break;
        }
    }
    Ok(report)
}

/// Exhaustive satisfiability search over the non-fixed variables: DFS with
/// unit propagation, trail-based undo. Kept separate from the CDCL solver so
/// the two answer routes stay independent.
struct ExtendSearch {
    nvars: usize,
    clauses: Vec<Vec<Lit>>,
    /// Clause indices containing each literal; code = (var-1)*2 + sign bit.
    occ: Vec<Vec<u32>>,
    assign: Vec<i8>, // by var: 0 unassigned, 1 true, -1 false
    trail: Vec<u32>,
    has_empty: bool,
}

fn lit_code(l: Lit) -> usize {
    ((l.unsigned_abs() - 1) * 2) as usize + (l < 0) as usize
}

impl ExtendSearch {
    fn new(clauses: Vec<Vec<Lit>>, nvars: u32) -> Self {
        let nvars = nvars as usize;
        let mut occ = vec![Vec::new(); nvars * 2];
        let mut has_empty = false;
        for (i, cl) in clauses.iter().enumerate() {
            if cl.is_empty() {
                has_empty = true;
            }
            for &l in cl {
                occ[lit_code(l)].push(i as u32);
            }
        }
        Self {
            nvars,
            clauses,
            occ,
            assign: vec![0; nvars + 1],
            trail: Vec::with_capacity(nvars),
            has_empty,
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.assign[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    /// True iff the clauses are satisfiable with variables `1..=fixed_n`
    /// pinned to the bits of `fixed_mask`.
    fn extendable(&mut self, fixed_n: u32, fixed_mask: u32) -> bool {
        if self.has_empty {
            return false;
        }
        for &v in &self.trail {
            self.assign[v as usize] = 0;
        }
        self.trail.clear();
        for v in 1..=fixed_n {
            self.assign[v as usize] = if fixed_mask & (1 << (v - 1)) != 0 { 1 } else { -1 };
            self.trail.push(v);
        }
        self.propagate(0) && self.dfs(1)
    }

    /// Unit propagation from trail position `qhead`; false on conflict.
    fn propagate(&mut self, mut qhead: usize) -> bool {
        while qhead < self.trail.len() {
            let v = self.trail[qhead];
            qhead += 1;
            let falsified = if self.assign[v as usize] == 1 {
                -(v as Lit)
            } else {
                v as Lit
            };
            let code = lit_code(falsified);
            for k in 0..self.occ[code].len() {
                let ci = self.occ[code][k] as usize;
                let mut unit: Lit = 0;
                let mut open = 0u32;
                let mut satisfied = false;
                for &l in &self.clauses[ci] {
                    match self.lit_value(l) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        0 => {
                            open += 1;
                            unit = l;
                            if open > 1 {
                                break;
                            }
                        }
                        _ => {}
                    }
                }
                if satisfied || open > 1 {
                    continue;
                }
                if open == 0 {
                    return false;
                }
                self.assign[unit.unsigned_abs() as usize] = if unit > 0 { 1 } else { -1 };
                self.trail.push(unit.unsigned_abs());
            }
        }
        true
    }

    fn dfs(&mut self, from: usize) -> bool {
        let mut v = from;
        while v <= self.nvars && self.assign[v] != 0 {
            v += 1;
        }
        if v > self.nvars {
            return true;
        }
        for val in [-1i8, 1] {
            let mark = self.trail.len();
            self.assign[v] = val;
            self.trail.push(v as u32);
            if self.propagate(mark) && self.dfs(v + 1) {
                return true;
            }
            for i in mark..self.trail.len() {
                let u = self.trail[i];
                self.assign[u as usize] = 0;
            }
            self.trail.truncate(mark);
        }
        false
    }
}
