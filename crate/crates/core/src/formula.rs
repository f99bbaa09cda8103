//! CNF formulas, graph-annotated instances, and file I/O.
//!
//! The GCNF format extends DIMACS CNF with a directed graph whose arcs are
//! labelled by formula variables, plus the graph constraints to compile:
//!
//! ```text
//! p gcnf <var_count> <clause_count> <node_count>
//! g a <u> <v> <var>          one line per arc
//! g c acyclic                constraints: acyclic | reach s t |
//! g c reach <s> <t>                       noreach s t | ereach s t
//! <lit> ... 0                clause lines, DIMACS style
//! ```
//!
//! `c` lines are comments and may appear anywhere.

use crate::graph::{DirectedGraph, Node};
use crate::oracle::Model;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A literal: positive for the variable, negative for its negation. Never 0.
pub type Lit = i32;

/// A CNF formula. Clauses hold nonzero literals with `|lit| <= var_count`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub var_count: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(var_count: u32) -> Self {
        Self {
            var_count,
            clauses: Vec::new(),
        }
    }

    pub fn push(&mut self, clause: Vec<Lit>) {
        debug_assert!(clause
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() <= self.var_count));
        self.clauses.push(clause);
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }
}

/// The kind of a graph constraint, without endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Acyclic,
    Reach,
    NoReach,
    EReach,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Acyclic => "acyclic",
            ConstraintKind::Reach => "reach",
            ConstraintKind::NoReach => "noreach",
            ConstraintKind::EReach => "ereach",
        })
    }
}

impl std::str::FromStr for ConstraintKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "acyclic" => Ok(ConstraintKind::Acyclic),
            "reach" => Ok(ConstraintKind::Reach),
            "noreach" => Ok(ConstraintKind::NoReach),
            "ereach" => Ok(ConstraintKind::EReach),
            other => Err(format!("unknown constraint kind `{other}`")),
        }
    }
}

/// A constraint on the graph decoded from a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphConstraint {
    Acyclic,
    Reach(Node, Node),
    NoReach(Node, Node),
    EReach(Node, Node),
}

impl GraphConstraint {
    pub fn kind(&self) -> ConstraintKind {
        match self {
            GraphConstraint::Acyclic => ConstraintKind::Acyclic,
            GraphConstraint::Reach(..) => ConstraintKind::Reach,
            GraphConstraint::NoReach(..) => ConstraintKind::NoReach,
            GraphConstraint::EReach(..) => ConstraintKind::EReach,
        }
    }

    pub fn endpoints(&self) -> Option<(Node, Node)> {
        match *self {
            GraphConstraint::Acyclic => None,
            GraphConstraint::Reach(s, t)
            | GraphConstraint::NoReach(s, t)
            | GraphConstraint::EReach(s, t) => Some((s, t)),
        }
    }
}

impl fmt::Display for GraphConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.endpoints() {
            None => write!(f, "{}", self.kind()),
            Some((s, t)) => write!(f, "{} {} {}", self.kind(), s, t),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("arc ({0}, {1}) has no variable mapping")]
    ArcWithoutVariable(Node, Node),
    #[error("arc_var key ({0}, {1}) is not a graph arc")]
    MappingWithoutArc(Node, Node),
    #[error("arc ({0}, {1}) maps to variable {2} above var_count {3}")]
    ArcVarOutOfRange(Node, Node, u32, u32),
    #[error("constraint endpoint {0} is not a graph node")]
    ConstraintEndpointOutOfRange(Node),
}

/// A base CNF together with its underlying directed graph, the arc-to-variable
/// map, and the graph constraints to enforce.
///
/// Distinct arcs may share a variable. Arc variables belong to the base
/// formula's variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    pub base: Cnf,
    pub graph: DirectedGraph,
    pub arc_var: BTreeMap<(Node, Node), u32>,
    pub constraints: Vec<GraphConstraint>,
}

impl GraphInstance {
    pub fn new(
        base: Cnf,
        graph: DirectedGraph,
        arc_var: BTreeMap<(Node, Node), u32>,
        constraints: Vec<GraphConstraint>,
    ) -> Result<Self, InstanceError> {
        for (u, v) in graph.arcs() {
            match arc_var.get(&(u, v)) {
                None => return Err(InstanceError::ArcWithoutVariable(u, v)),
                Some(&var) if var == 0 || var > base.var_count => {
                    return Err(InstanceError::ArcVarOutOfRange(u, v, var, base.var_count))
                }
                Some(_) => {}
            }
        }
        for &(u, v) in arc_var.keys() {
            if !graph.contains_arc(u, v) {
                return Err(InstanceError::MappingWithoutArc(u, v));
            }
        }
        for c in &constraints {
            if let Some((s, t)) = c.endpoints() {
                for e in [s, t] {
                    if e == 0 || e > graph.node_count() {
                        return Err(InstanceError::ConstraintEndpointOutOfRange(e));
                    }
                }
            }
        }
        Ok(Self {
            base,
            graph,
            arc_var,
            constraints,
        })
    }

    /// The variable labelling arc `(u, v)`.
    pub fn arc_lit(&self, u: Node, v: Node) -> Option<Lit> {
        self.arc_var.get(&(u, v)).map(|&x| x as Lit)
    }
}

/// Named families of auxiliary variables, keyed by index tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxMap {
    families: BTreeMap<String, BTreeMap<Vec<u32>, u32>>,
}

impl AuxMap {
    pub fn insert(&mut self, family: &str, key: &[u32], var: u32) {
        let prev = self
            .families
            .entry(family.to_string())
            .or_default()
            .insert(key.to_vec(), var);
        debug_assert!(prev.is_none(), "duplicate aux key {family} {key:?}");
    }

    pub fn get(&self, family: &str, key: &[u32]) -> Option<u32> {
        self.families.get(family)?.get(key).copied()
    }

    pub fn family(&self, family: &str) -> Option<&BTreeMap<Vec<u32>, u32>> {
        self.families.get(family)
    }

    pub fn families(&self) -> impl Iterator<Item = (&str, &BTreeMap<Vec<u32>, u32>)> {
        self.families.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn var_count(&self) -> usize {
        self.families.values().map(|m| m.len()).sum()
    }

    /// Absorbs `other`, prefixing each of its family names.
    pub fn merge_namespaced(&mut self, prefix: &str, other: AuxMap) {
        for (name, map) in other.families {
            let target = self.families.entry(format!("{prefix}{name}")).or_default();
            for (key, var) in map {
                target.insert(key, var);
            }
        }
    }
}

/// Size counters for an encoding run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub aux_vars: u32,
    pub added_clauses: usize,
    /// Elimination width, for vertex elimination methods.
    pub width: Option<u32>,
    /// `|E*|`, for vertex elimination methods.
    pub estar_arcs: Option<usize>,
    /// `|Δ|`, for vertex elimination methods.
    pub triangles: Option<usize>,
    /// Clauses emitted before any acyclicity sub-encoding
    /// (reachability-via-acyclicity methods only).
    pub core_clauses: Option<usize>,
    /// Variables allocated before any acyclicity sub-encoding.
    pub core_aux_vars: Option<u32>,
}

/// Clauses produced by an encoder, the variable count after encoding, and the
/// auxiliary variable families.
///
/// Auxiliary ids are contiguous, all greater than the instance's base
/// variable count, and disjoint across families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedFormula {
    pub added_clauses: Vec<Vec<Lit>>,
    pub new_var_count: u32,
    pub aux: AuxMap,
    pub stats: EncodeStats,
}

impl EncodedFormula {
    /// Base clauses and added clauses as one CNF over the final variable set.
    pub fn combined(&self, inst: &GraphInstance) -> Cnf {
        let mut cnf = Cnf::new(self.new_var_count);
        cnf.clauses.reserve(inst.base.clauses.len() + self.added_clauses.len());
        cnf.clauses.extend(inst.base.clauses.iter().cloned());
        cnf.clauses.extend(self.added_clauses.iter().cloned());
        cnf
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct GcnfError {
    pub line: usize,
    pub kind: GcnfErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GcnfErrorKind {
    #[error("missing `p gcnf` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("content before `p gcnf` header")]
    ContentBeforeHeader,
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("malformed graph line: {0}")]
    BadGraphLine(String),
    #[error("arc endpoint {0} outside 1..={1}")]
    ArcEndpointOutOfRange(u64, Node),
    #[error("arc variable {0} outside 1..={1}")]
    ArcVarOutOfRange(u64, u32),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(Node, Node),
    #[error("unknown constraint keyword `{0}`")]
    UnknownConstraint(String),
    #[error("constraint endpoint {0} outside 1..={1}")]
    ConstraintEndpointOutOfRange(u64, Node),
    #[error("bad integer `{0}`")]
    BadInt(String),
    #[error("literal {0} exceeds variable count {1}")]
    LiteralOutOfRange(i64, u32),
    #[error("more clauses than the header declares ({0})")]
    TooManyClauses(usize),
    #[error("expected {want} clauses, found {got}")]
    ClauseCountMismatch { want: usize, got: usize },
    #[error("unterminated clause at end of input")]
    UnterminatedClause,
}

fn gcnf_err(line: usize, kind: GcnfErrorKind) -> GcnfError {
    GcnfError { line, kind }
}

fn parse_u64(tok: &str, line: usize) -> Result<u64, GcnfError> {
    tok.parse::<u64>()
        .map_err(|_| gcnf_err(line, GcnfErrorKind::BadInt(tok.to_string())))
}

/// Parses a GCNF document.
pub fn parse_gcnf(text: &str) -> Result<GraphInstance, GcnfError> {
    let mut header: Option<(u32, usize, Node)> = None;
    let mut arcs: BTreeMap<(Node, Node), u32> = BTreeMap::new();
    let mut constraints: Vec<GraphConstraint> = Vec::new();
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut clause_open_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(gcnf_err(line, GcnfErrorKind::DuplicateHeader));
            }
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "gcnf" {
                return Err(gcnf_err(line, GcnfErrorKind::BadHeader(trimmed.to_string())));
            }
            let var_count = parse_u64(toks[1], line)?;
            let clause_count = parse_u64(toks[2], line)?;
            let node_count = parse_u64(toks[3], line)?;
            if var_count > i32::MAX as u64 || node_count > u32::MAX as u64 {
                return Err(gcnf_err(line, GcnfErrorKind::BadHeader(trimmed.to_string())));
            }
            header = Some((var_count as u32, clause_count as usize, node_count as Node));
            continue;
        }
        let Some((var_count, clause_count, node_count)) = header else {
            return Err(gcnf_err(line, GcnfErrorKind::ContentBeforeHeader));
        };
        if let Some(rest) = trimmed.strip_prefix('g') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match toks.first().copied() {
                Some("a") => {
                    if toks.len() != 4 {
                        return Err(gcnf_err(line, GcnfErrorKind::BadGraphLine(trimmed.into())));
                    }
                    let u = parse_u64(toks[1], line)?;
                    let v = parse_u64(toks[2], line)?;
                    let var = parse_u64(toks[3], line)?;
                    for e in [u, v] {
                        if e == 0 || e > node_count as u64 {
                            return Err(gcnf_err(
                                line,
                                GcnfErrorKind::ArcEndpointOutOfRange(e, node_count),
                            ));
                        }
                    }
                    if var == 0 || var > var_count as u64 {
                        return Err(gcnf_err(line, GcnfErrorKind::ArcVarOutOfRange(var, var_count)));
                    }
                    let key = (u as Node, v as Node);
                    if arcs.insert(key, var as u32).is_some() {
                        return Err(gcnf_err(line, GcnfErrorKind::DuplicateArc(key.0, key.1)));
                    }
                }
                Some("c") => {
                    let kw = toks.get(1).copied().unwrap_or("");
                    let want_endpoints = match kw {
                        "acyclic" => false,
                        "reach" | "noreach" | "ereach" => true,
                        other => {
                            return Err(gcnf_err(
                                line,
                                GcnfErrorKind::UnknownConstraint(other.to_string()),
                            ))
                        }
                    };
                    let constraint = if want_endpoints {
                        if toks.len() != 4 {
                            return Err(gcnf_err(line, GcnfErrorKind::BadGraphLine(trimmed.into())));
                        }
                        let s = parse_u64(toks[2], line)?;
                        let t = parse_u64(toks[3], line)?;
                        for e in [s, t] {
                            if e == 0 || e > node_count as u64 {
                                return Err(gcnf_err(
                                    line,
                                    GcnfErrorKind::ConstraintEndpointOutOfRange(e, node_count),
                                ));
                            }
                        }
                        let (s, t) = (s as Node, t as Node);
                        match kw {
                            "reach" => GraphConstraint::Reach(s, t),
                            "noreach" => GraphConstraint::NoReach(s, t),
                            _ => GraphConstraint::EReach(s, t),
                        }
                    } else {
                        if toks.len() != 2 {
                            return Err(gcnf_err(line, GcnfErrorKind::BadGraphLine(trimmed.into())));
                        }
                        GraphConstraint::Acyclic
                    };
                    constraints.push(constraint);
                }
                _ => return Err(gcnf_err(line, GcnfErrorKind::BadGraphLine(trimmed.into()))),
            }
            continue;
        }
        // Clause tokens; a clause may span lines and ends at a 0.
        if current.is_empty() {
            clause_open_line = line;
        }
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| gcnf_err(line, GcnfErrorKind::BadInt(tok.to_string())))?;
            if lit == 0 {
                if clauses.len() == clause_count {
                    return Err(gcnf_err(line, GcnfErrorKind::TooManyClauses(clause_count)));
                }
                clauses.push(std::mem::take(&mut current));
                clause_open_line = line;
            } else {
                if lit.unsigned_abs() > var_count as u64 {
                    return Err(gcnf_err(line, GcnfErrorKind::LiteralOutOfRange(lit, var_count)));
                }
                current.push(lit as Lit);
            }
        }
    }

    let Some((var_count, clause_count, node_count)) = header else {
        return Err(gcnf_err(0, GcnfErrorKind::MissingHeader));
    };
    if !current.is_empty() {
        return Err(gcnf_err(clause_open_line, GcnfErrorKind::UnterminatedClause));
    }
    if clauses.len() != clause_count {
        return Err(gcnf_err(
            0,
            GcnfErrorKind::ClauseCountMismatch {
                want: clause_count,
                got: clauses.len(),
            },
        ));
    }

    let graph = DirectedGraph::new(node_count, arcs.keys().copied())
        .expect("arc endpoints validated during parse");
    let mut base = Cnf::new(var_count);
    base.clauses = clauses;
    Ok(GraphInstance::new(base, graph, arcs, constraints)
        .expect("instance fields validated during parse"))
}

/// Serializes an instance as GCNF. `parse_gcnf(write_gcnf(x)) == x`.
pub fn write_gcnf(inst: &GraphInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "p gcnf {} {} {}\n",
        inst.base.var_count,
        inst.base.clause_count(),
        inst.graph.node_count()
    ));
    for (&(u, v), &var) in &inst.arc_var {
        out.push_str(&format!("g a {u} {v} {var}\n"));
    }
    for c in &inst.constraints {
        out.push_str(&format!("g c {c}\n"));
    }
    for clause in &inst.base.clauses {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

/// Serializes a CNF in DIMACS format.
pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    out.push_str(&format!("p cnf {} {}\n", cnf.var_count, cnf.clause_count()));
    for clause in &cnf.clauses {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

/// Parses a DIMACS CNF document. `parse_dimacs(write_dimacs(x)) == x`.
pub fn parse_dimacs(text: &str) -> Result<Cnf, GcnfError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut clause_open_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(gcnf_err(line, GcnfErrorKind::DuplicateHeader));
            }
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "cnf" {
                return Err(gcnf_err(line, GcnfErrorKind::BadHeader(trimmed.to_string())));
            }
            let var_count = parse_u64(toks[1], line)?;
            let clause_count = parse_u64(toks[2], line)?;
            if var_count > i32::MAX as u64 {
                return Err(gcnf_err(line, GcnfErrorKind::BadHeader(trimmed.to_string())));
            }
            header = Some((var_count as u32, clause_count as usize));
            continue;
        }
        let Some((var_count, clause_count)) = header else {
            return Err(gcnf_err(line, GcnfErrorKind::ContentBeforeHeader));
        };
        if current.is_empty() {
            clause_open_line = line;
        }
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| gcnf_err(line, GcnfErrorKind::BadInt(tok.to_string())))?;
            if lit == 0 {
                if clauses.len() == clause_count {
                    return Err(gcnf_err(line, GcnfErrorKind::TooManyClauses(clause_count)));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > var_count as u64 {
                    return Err(gcnf_err(line, GcnfErrorKind::LiteralOutOfRange(lit, var_count)));
                }
                current.push(lit as Lit);
            }
        }
    }
    let Some((var_count, clause_count)) = header else {
        return Err(gcnf_err(0, GcnfErrorKind::MissingHeader));
    };
    if !current.is_empty() {
        return Err(gcnf_err(clause_open_line, GcnfErrorKind::UnterminatedClause));
    }
    if clauses.len() != clause_count {
        return Err(gcnf_err(
            0,
            GcnfErrorKind::ClauseCountMismatch {
                want: clause_count,
                got: clauses.len(),
            },
        ));
    }
    let mut cnf = Cnf::new(var_count);
    cnf.clauses = clauses;
    Ok(cnf)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelParseError {
    #[error("line {0}: bad integer `{1}`")]
    BadInt(usize, String),
    #[error("line {0}: literal {1} exceeds variable count {2}")]
    LiteralOutOfRange(usize, i64, u32),
    #[error("line {0}: literal {1} contradicts an earlier literal")]
    ContradictoryLiteral(usize, i64),
}

/// Parses a model from solver output: `v` lines (with `c`/`s` lines ignored)
/// or a raw whitespace-separated literal list. `0` tokens are terminators.
/// Variables never mentioned default to false.
pub fn parse_model(text: &str, var_count: u32) -> Result<Model, ModelParseError> {
    let mut model = Model::all_false(var_count);
    let mut assigned = vec![false; var_count as usize + 1];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('s') {
            continue;
        }
        let body = trimmed.strip_prefix('v').unwrap_or(trimmed);
        for tok in body.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| ModelParseError::BadInt(line, tok.to_string()))?;
            if lit == 0 {
                continue;
            }
            let var = lit.unsigned_abs();
            if var > var_count as u64 {
                return Err(ModelParseError::LiteralOutOfRange(line, lit, var_count));
            }
            let var = var as u32;
            let value = lit > 0;
            if assigned[var as usize] && model.is_true(var) != value {
                return Err(ModelParseError::ContradictoryLiteral(line, lit));
            }
            assigned[var as usize] = true;
            model.set(var, value);
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The 8-node simple directed cycle with arc i -> i+1 labelled by var i.
    pub fn eight_cycle_instance(constraints: Vec<GraphConstraint>) -> GraphInstance {
        let graph = DirectedGraph::new(8, (1..=8).map(|i| (i, i % 8 + 1))).unwrap();
        let arc_var = (1..=8u32).map(|i| ((i, i % 8 + 1), i)).collect();
        GraphInstance::new(Cnf::new(8), graph, arc_var, constraints).unwrap()
    }

    #[test]
    fn parse_eight_cycle_acyclic() {
        let text = "\
c the 8-cycle
p gcnf 8 0 8
g a 1 2 1
g a 2 3 2
g a 3 4 3
g a 4 5 4
g a 5 6 5
g a 6 7 6
g a 7 8 7
g a 8 1 8
g c acyclic
";
        let inst = parse_gcnf(text).unwrap();
        assert_eq!(inst, eight_cycle_instance(vec![GraphConstraint::Acyclic]));
        assert!(inst.base.clauses.is_empty());
        assert_eq!(inst.graph.arc_count(), 8);
    }

    #[test]
    fn parse_reach_constraint() {
        let mut inst = eight_cycle_instance(vec![GraphConstraint::Reach(3, 7)]);
        let parsed = parse_gcnf(&write_gcnf(&inst)).unwrap();
        assert_eq!(parsed.constraints, vec![GraphConstraint::Reach(3, 7)]);
        inst.constraints.push(GraphConstraint::NoReach(1, 5));
        let parsed = parse_gcnf(&write_gcnf(&inst)).unwrap();
        assert_eq!(parsed.constraints.len(), 2);
    }

    #[test]
    fn duplicate_arc_is_an_error() {
        let text = "p gcnf 3 0 2\ng a 1 2 3\ng a 1 2 3\n";
        let err = parse_gcnf(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.kind, GcnfErrorKind::DuplicateArc(1, 2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_gcnf("p gcnf 2 0 2\ng a 1 3 1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.kind, GcnfErrorKind::ArcEndpointOutOfRange(3, 2));

        let err = parse_gcnf("p gcnf 2 0 2\ng a 1 2 5\n").unwrap_err();
        assert_eq!(err.kind, GcnfErrorKind::ArcVarOutOfRange(5, 2));

        let err = parse_gcnf("p gcnf 2 1 2\n1 -7 0\n").unwrap_err();
        assert_eq!(err.kind, GcnfErrorKind::LiteralOutOfRange(-7, 2));

        let err = parse_gcnf("p gcnf 2 0 2\ng c sometimes-acyclic\n").unwrap_err();
        assert_eq!(
            err.kind,
            GcnfErrorKind::UnknownConstraint("sometimes-acyclic".into())
        );

        let err = parse_gcnf("p gcnf 2 2 2\n1 2 0\n").unwrap_err();
        assert_eq!(err.kind, GcnfErrorKind::ClauseCountMismatch { want: 2, got: 1 });

        let err = parse_gcnf("g a 1 2 1\n").unwrap_err();
        assert_eq!(err.kind, GcnfErrorKind::ContentBeforeHeader);

        let err = parse_gcnf("p gcnf 2 1 2\n1 2\n").unwrap_err();
        assert_eq!(err.kind, GcnfErrorKind::UnterminatedClause);
    }

    #[test]
    fn round_trip_with_clauses() {
        let graph = DirectedGraph::new(3, [(1, 2), (2, 3)]).unwrap();
        let arc_var = [((1, 2), 4u32), ((2, 3), 4)].into_iter().collect();
        let mut base = Cnf::new(5);
        base.push(vec![1, -2, 5]);
        base.push(vec![-4]);
        let inst = GraphInstance::new(
            base,
            graph,
            arc_var,
            vec![GraphConstraint::EReach(1, 3), GraphConstraint::Acyclic],
        )
        .unwrap();
        assert_eq!(parse_gcnf(&write_gcnf(&inst)).unwrap(), inst);
    }

    #[test]
    fn dimacs_output_shape() {
        let mut cnf = Cnf::new(3);
        cnf.push(vec![1, -3]);
        cnf.push(vec![2]);
        assert_eq!(write_dimacs(&cnf), "p cnf 3 2\n1 -3 0\n2 0\n");
        assert_eq!(parse_dimacs(&write_dimacs(&cnf)).unwrap(), cnf);
        assert!(parse_dimacs("p cnf 2 1\n1 5 0\n").is_err());
    }

    #[test]
    fn model_parsing() {
        let m = parse_model("v 1 -2 3 0\n", 3).unwrap();
        assert!(m.is_true(1) && !m.is_true(2) && m.is_true(3));

        let m = parse_model("", 2).unwrap();
        assert!(!m.is_true(1) && !m.is_true(2));

        let m = parse_model("s SATISFIABLE\nv -1 2\nv 0\n", 2).unwrap();
        assert!(!m.is_true(1) && m.is_true(2));

        let m = parse_model("1 -2 0", 2).unwrap();
        assert!(m.is_true(1) && !m.is_true(2));

        assert!(matches!(
            parse_model("v 9 0\n", 3),
            Err(ModelParseError::LiteralOutOfRange(1, 9, 3))
        ));
        assert!(matches!(
            parse_model("v 1 -1 0\n", 3),
            Err(ModelParseError::ContradictoryLiteral(1, -1))
        ));
    }

    #[test]
    fn instance_validation() {
        let graph = DirectedGraph::new(2, [(1, 2)]).unwrap();
        let err = GraphInstance::new(Cnf::new(2), graph.clone(), BTreeMap::new(), vec![]);
        assert_eq!(err.unwrap_err(), InstanceError::ArcWithoutVariable(1, 2));

        let arc_var: BTreeMap<_, _> = [((1, 2), 9u32)].into_iter().collect();
        let err = GraphInstance::new(Cnf::new(2), graph.clone(), arc_var, vec![]);
        assert_eq!(err.unwrap_err(), InstanceError::ArcVarOutOfRange(1, 2, 9, 2));

        let arc_var: BTreeMap<_, _> = [((1, 2), 1u32)].into_iter().collect();
        let err = GraphInstance::new(
            Cnf::new(2),
            graph,
            arc_var,
            vec![GraphConstraint::Reach(1, 7)],
        );
        assert_eq!(
            err.unwrap_err(),
            InstanceError::ConstraintEndpointOutOfRange(7)
        );
    }

    #[test]
    fn aux_map_contains_inserted_keys() {
        let mut aux = AuxMap::default();
        aux.insert("eprime", &[1, 2], 9);
        aux.insert("tri", &[1, 2, 3], 10);
        assert_eq!(aux.get("eprime", &[1, 2]), Some(9));
        assert_eq!(aux.get("eprime", &[2, 1]), None);
        assert_eq!(aux.var_count(), 2);

        let mut merged = AuxMap::default();
        merged.merge_namespaced("c0.", aux);
        assert_eq!(merged.get("c0.tri", &[1, 2, 3]), Some(10));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_instance() -> impl Strategy<Value = GraphInstance> {
            (1..=6u32, 1..=8u32).prop_flat_map(|(n, extra_vars)| {
                let arcs = proptest::collection::btree_set((1..=n, 1..=n), 0..=(n as usize * n as usize));
                (Just(n), Just(extra_vars), arcs).prop_flat_map(|(n, extra, arcs)| {
                    let m = arcs.len();
                    let var_count = m as u32 + extra;
                    let vars = proptest::collection::vec(1..=var_count, m);
                    let clauses = proptest::collection::vec(
                        proptest::collection::vec(
                            (1..=var_count, proptest::bool::ANY)
                                .prop_map(|(v, neg)| if neg { -(v as i32) } else { v as i32 }),
                            0..4,
                        ),
                        0..5,
                    );
                    let constraint = proptest::option::of((1..=n, 1..=n, 0..4u8));
                    (Just(n), Just(var_count), Just(arcs), vars, clauses, constraint).prop_map(
                        |(n, var_count, arcs, vars, clauses, constraint)| {
                            let graph = DirectedGraph::new(n, arcs.iter().copied()).unwrap();
                            let arc_var: BTreeMap<_, _> =
                                arcs.into_iter().zip(vars).collect();
                            let mut base = Cnf::new(var_count);
                            base.clauses = clauses;
                            let constraints = constraint
                                .map(|(s, t, k)| match k {
                                    0 => GraphConstraint::Acyclic,
                                    1 => GraphConstraint::Reach(s, t),
                                    2 => GraphConstraint::NoReach(s, t),
                                    _ => GraphConstraint::EReach(s, t),
                                })
                                .into_iter()
                                .collect();
                            GraphInstance::new(base, graph, arc_var, constraints).unwrap()
                        },
                    )
                })
            })
        }

        proptest! {
            #[test]
            fn gcnf_round_trip(inst in arb_instance()) {
                let parsed = parse_gcnf(&write_gcnf(&inst)).unwrap();
                prop_assert_eq!(parsed, inst);
            }

            #[test]
            fn dimacs_round_trip(inst in arb_instance()) {
                let parsed = parse_dimacs(&write_dimacs(&inst.base)).unwrap();
                prop_assert_eq!(parsed, inst.base);
            }
        }
    }
}
