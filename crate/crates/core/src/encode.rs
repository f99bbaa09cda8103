//! Constraint encoders: each consumes an instance plus one constraint and
//! emits CNF clauses over fresh auxiliary variables.
//!
//! Acyclicity comes in three flavors:
//! - `ve`: vertex elimination. One variable per arc of `E*`; arcs imply
//!   their `E*` images, bidirectional `E*` pairs exclude each other, and
//!   every elimination triangle propagates. Size scales with `|E*| + |Δ|`.
//! - `tc`: transitive closure over reachability variables `t[i,k]`.
//! - `tr`: tree reduction over level variables `d[i,n]` bounding the
//!   longest path to a sink.
//!
//! Reachability comes as an explicit layered encoding, as a reduction to
//! acyclicity over a witness subgraph, and as a vertex elimination encoding
//! whose ordering must eliminate the endpoints last. Unreachability and
//! eventual reachability reuse the same building blocks.

use crate::formula::{
    AuxMap, EncodeStats, EncodedFormula, GraphConstraint, GraphInstance, Lit,
};
use crate::graph::{
    self, eliminate, order_min_degree, order_min_fill, DirectedGraph, EliminationOrdering,
    EliminationResult, Node,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("endpoint {0} is not a node of the graph")]
    EndpointNotInGraph(Node),
    #[error("reachability endpoints must be distinct, got {0} twice")]
    EndpointsEqual(Node),
    #[error("elimination ordering must end with nodes {0:?}")]
    OrderingNotPinned(Vec<Node>),
    #[error("method `{method}` does not apply to constraint `{constraint}`")]
    MethodMismatch { method: String, constraint: String },
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
}

/// Acyclicity encoding selector, also used as the sub-encoder of the
/// reachability-by-acyclicity methods.
#[derive(Debug, Clone, Copy)]
pub enum AcycMethod<'a> {
    Tc,
    Tr,
    Ve(&'a EliminationOrdering),
}

fn pl(v: u32) -> Lit {
    v as Lit
}

#[derive(Debug, Clone, Copy)]
struct VeInfo {
    width: u32,
    estar: usize,
    triangles: usize,
}

impl VeInfo {
    fn of(elim: &EliminationResult) -> Self {
        Self {
            width: elim.width,
            estar: elim.estar.len(),
            triangles: elim.delta.len(),
        }
    }
}

/// Clause sink with a shared fresh-variable allocator and namespaced
/// auxiliary families.
struct Emit {
    base_vars: u32,
    next_var: u32,
    clauses: Vec<Vec<Lit>>,
    aux: AuxMap,
    ns: String,
}

impl Emit {
    fn new(base_vars: u32) -> Self {
        Self {
            base_vars,
            next_var: base_vars,
            clauses: Vec::new(),
            aux: AuxMap::default(),
            ns: String::new(),
        }
    }

    fn fresh(&mut self, family: &str, key: &[u32]) -> u32 {
        self.next_var += 1;
        if self.ns.is_empty() {
            self.aux.insert(family, key, self.next_var);
        } else {
            self.aux.insert(&format!("{}{}", self.ns, family), key, self.next_var);
        }
        self.next_var
    }

    fn clause(&mut self, lits: Vec<Lit>) {
        self.clauses.push(lits);
    }

    fn scoped<R>(&mut self, suffix: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let saved = self.ns.len();
        self.ns.push_str(suffix);
        let out = f(self);
        self.ns.truncate(saved);
        out
    }

    fn finish(self, ve: Option<VeInfo>, core: Option<(usize, u32)>) -> EncodedFormula {
        EncodedFormula {
            new_var_count: self.next_var,
            stats: EncodeStats {
                aux_vars: self.next_var - self.base_vars,
                added_clauses: self.clauses.len(),
                width: ve.map(|v| v.width),
                estar_arcs: ve.map(|v| v.estar),
                triangles: ve.map(|v| v.triangles),
                core_clauses: core.map(|c| c.0),
                core_aux_vars: core.map(|c| c.1),
            },
            added_clauses: self.clauses,
            aux: self.aux,
        }
    }
}

type ArcLits = BTreeMap<(Node, Node), Lit>;

/// Vertex elimination metrics plus pre-acyclicity core sizes, as produced
/// by one constraint's emission.
type PartStats = (Option<VeInfo>, Option<(usize, u32)>);

fn instance_arc_lits(inst: &GraphInstance) -> ArcLits {
    inst.arc_var
        .iter()
        .map(|(&arc, &var)| (arc, var as Lit))
        .collect()
}

fn check_endpoint(g: &DirectedGraph, v: Node) -> Result<(), EncodeError> {
    if v == 0 || v > g.node_count() {
        return Err(EncodeError::EndpointNotInGraph(v));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Acyclicity emitters
// ---------------------------------------------------------------------------

/// Transitive closure: for each arc (i, j) and node k, an enabled arc
/// extends any path j -> k to i -> k; the k = j instance degenerates to the
/// base clause e[i,j] -> t[i,j] since a node reaches itself by the empty
/// path. A no-return clause per arc forbids closing a cycle. Diagonal t
/// variables are allocated but never forced.
fn emit_acyclicity_tc(em: &mut Emit, n: Node, arc_lits: &ArcLits) {
    let mut t = vec![0u32; (n * n) as usize];
    for i in 1..=n {
        for k in 1..=n {
            t[((i - 1) * n + (k - 1)) as usize] = em.fresh("tc", &[i, k]);
        }
    }
    let tv = |i: Node, k: Node| pl(t[((i - 1) * n + (k - 1)) as usize]);
    for (&(i, j), &e) in arc_lits {
        if i == j {
            continue;
        }
        for k in 1..=n {
            if k == j {
                em.clause(vec![-e, tv(i, j)]);
            } else {
                em.clause(vec![-e, -tv(j, k), tv(i, k)]);
            }
        }
    }
    for (&(i, j), &e) in arc_lits {
        if i != j {
            em.clause(vec![-e, -tv(j, i)]);
        }
    }
    for (&(i, j), &e) in arc_lits {
        if i == j {
            em.clause(vec![-e]);
        }
    }
}

/// Tree reduction: d[i,n] says n bounds the longest enabled path from i to
/// a sink. Every node gets some bound, nodes with an enabled out-arc cannot
/// be sinks, bounds are upward closed, and bounds strictly drop along
/// enabled arcs.
fn emit_acyclicity_tr(em: &mut Emit, n: Node, arc_lits: &ArcLits) {
    let levels = n;
    let mut d = vec![0u32; (n * levels) as usize];
    for i in 1..=n {
        for lvl in 0..levels {
            d[((i - 1) * levels + lvl) as usize] = em.fresh("depth", &[i, lvl]);
        }
    }
    let dv = |i: Node, lvl: Node| pl(d[((i - 1) * levels + lvl) as usize]);
    for i in 1..=n {
        em.clause((0..levels).map(|lvl| dv(i, lvl)).collect());
    }
    for (&(i, j), &e) in arc_lits {
        if i != j {
            em.clause(vec![-e, -dv(i, 0)]);
        }
    }
    for i in 1..=n {
        for lvl in 0..levels - 1 {
            em.clause(vec![-dv(i, lvl), dv(i, lvl + 1)]);
        }
    }
    for (&(i, j), &e) in arc_lits {
        if i != j {
            for lvl in 1..levels {
                em.clause(vec![-dv(i, lvl), -e, dv(j, lvl - 1)]);
            }
        }
    }
    for (&(i, j), &e) in arc_lits {
        if i == j {
            em.clause(vec![-e]);
        }
    }
}

/// Vertex elimination: arcs imply their e' images, bidirectional E* pairs
/// exclude each other, and each elimination triangle (a, m, b) propagates
/// e'[a,m] ∧ e'[m,b] -> e'[a,b].
fn emit_acyclicity_ve(em: &mut Emit, arc_lits: &ArcLits, elim: &EliminationResult) {
    let mut ep: BTreeMap<(Node, Node), u32> = BTreeMap::new();
    for &(i, j) in &elim.estar {
        ep.insert((i, j), em.fresh("eprime", &[i, j]));
    }
    for (&(i, j), &e) in arc_lits {
        em.clause(vec![-e, pl(ep[&(i, j)])]);
    }
    for &(i, j) in &elim.estar {
        if i < j && elim.estar.contains(&(j, i)) {
            em.clause(vec![-pl(ep[&(i, j)]), -pl(ep[&(j, i)])]);
        }
    }
    for &(a, m, b) in &elim.delta {
        em.clause(vec![-pl(ep[&(a, m)]), -pl(ep[&(m, b)]), pl(ep[&(a, b)])]);
    }
    for &(i, j) in arc_lits.keys() {
        if i == j {
            em.clause(vec![-pl(ep[&(i, j)])]);
        }
    }
}

fn emit_acyclicity(
    em: &mut Emit,
    g: &DirectedGraph,
    arc_lits: &ArcLits,
    method: AcycMethod<'_>,
) -> Result<Option<VeInfo>, EncodeError> {
    match method {
        AcycMethod::Tc => {
            emit_acyclicity_tc(em, g.node_count(), arc_lits);
            Ok(None)
        }
        AcycMethod::Tr => {
            emit_acyclicity_tr(em, g.node_count(), arc_lits);
            Ok(None)
        }
        AcycMethod::Ve(o) => {
            let elim = eliminate(g, o)?;
            emit_acyclicity_ve(em, arc_lits, &elim);
            Ok(Some(VeInfo::of(&elim)))
        }
    }
}

// ---------------------------------------------------------------------------
// Reachability building blocks
// ---------------------------------------------------------------------------

/// Forward reachability closure from `s`: r[s] holds and enabled arcs
/// propagate it. Variables live in `family`, one per node, returned in node
/// order.
fn emit_forward_reach(
    em: &mut Emit,
    n: Node,
    arc_lits: &ArcLits,
    s: Node,
    family: &str,
) -> Vec<u32> {
    let r: Vec<u32> = (1..=n).map(|i| em.fresh(family, &[i])).collect();
    let rv = |i: Node| pl(r[(i - 1) as usize]);
    em.clause(vec![rv(s)]);
    for (&(i, j), &e) in arc_lits {
        em.clause(vec![-e, -rv(i), rv(j)]);
    }
    r
}

/// Layered backward reachability to `t`: r[i,n] means a path of length at
/// most n from i to t. Level 0 holds exactly at t; at higher levels the
/// level drops either in place or through some enabled out-arc. Nodes with
/// out-degree one inline that choice into two clauses; larger out-degrees
/// get one step variable per out-arc.
fn emit_reach_layers(em: &mut Emit, g: &DirectedGraph, arc_lits: &ArcLits, t: Node) -> Vec<u32> {
    let n = g.node_count();
    let mut r = vec![0u32; (n * n) as usize];
    for i in 1..=n {
        for lvl in 0..n {
            r[((i - 1) * n + lvl) as usize] = em.fresh("reach_n", &[i, lvl]);
        }
    }
    let rv = |i: Node, lvl: Node| pl(r[((i - 1) * n + lvl) as usize]);
    for i in 1..=n {
        em.clause(vec![if i == t { rv(i, 0) } else { -rv(i, 0) }]);
    }
    let adj = g.out_adjacency();
    for lvl in 1..n {
        for i in 1..=n {
            let outs: Vec<(Node, Lit)> = adj[i as usize]
                .iter()
                .map(|&j| (j, arc_lits[&(i, j)]))
                .collect();
            match outs[..] {
                [] => em.clause(vec![-rv(i, lvl), rv(i, lvl - 1)]),
                [(j, e)] => {
                    em.clause(vec![-rv(i, lvl), rv(i, lvl - 1), e]);
                    em.clause(vec![-rv(i, lvl), rv(i, lvl - 1), rv(j, lvl - 1)]);
                }
                _ => {
                    let mut wide = vec![-rv(i, lvl), rv(i, lvl - 1)];
                    for (j, e) in outs {
                        let step = em.fresh("step", &[i, j, lvl]);
                        em.clause(vec![-pl(step), e]);
                        em.clause(vec![-pl(step), rv(j, lvl - 1)]);
                        wide.push(pl(step));
                    }
                    em.clause(wide);
                }
            }
        }
    }
    r
}

/// Witness subgraph for reachability via acyclicity: e' arcs form a
/// subgraph of the enabled arcs whose heads are marked reachable, every
/// marked node other than `t` keeps a marked way out, and `t` marks itself.
/// Acyclicity of the e' graph (emitted separately) rules out circular
/// support.
fn emit_reach_witness(
    em: &mut Emit,
    g: &DirectedGraph,
    arc_lits: &ArcLits,
    t: Node,
    r_family: &str,
) -> (BTreeMap<(Node, Node), u32>, Vec<u32>) {
    let n = g.node_count();
    let mut ep: BTreeMap<(Node, Node), u32> = BTreeMap::new();
    for &(i, j) in arc_lits.keys() {
        ep.insert((i, j), em.fresh("eprime", &[i, j]));
    }
    let r: Vec<u32> = (1..=n).map(|i| em.fresh(r_family, &[i])).collect();
    let rv = |i: Node| pl(r[(i - 1) as usize]);
    for (&(i, j), &e) in arc_lits {
        em.clause(vec![-pl(ep[&(i, j)]), e]);
    }
    for &(i, j) in arc_lits.keys() {
        em.clause(vec![-pl(ep[&(i, j)]), rv(j)]);
    }
    let adj = g.out_adjacency();
    for i in 1..=n {
        if i == t {
            continue;
        }
        let mut wide = vec![-rv(i)];
        wide.extend(adj[i as usize].iter().map(|&j| pl(ep[&(i, j)])));
        em.clause(wide);
    }
    em.clause(vec![rv(t)]);
    (ep, r)
}

/// E* support clauses shared by the vertex elimination reachability
/// encoders: every selected e' arc is justified by the underlying arc or by
/// a selected triangle, and a selected triangle selects both of its sides.
/// Returns the e' variable map.
fn emit_ve_reach_support(
    em: &mut Emit,
    arc_lits: &ArcLits,
    elim: &EliminationResult,
) -> BTreeMap<(Node, Node), u32> {
    let mut ep: BTreeMap<(Node, Node), u32> = BTreeMap::new();
    for &(i, j) in &elim.estar {
        ep.insert((i, j), em.fresh("eprime", &[i, j]));
    }
    let mut tri: Vec<u32> = Vec::with_capacity(elim.delta.len());
    let mut by_outer: BTreeMap<(Node, Node), Vec<u32>> = BTreeMap::new();
    for &(a, m, b) in &elim.delta {
        let v = em.fresh("tri", &[a, m, b]);
        tri.push(v);
        by_outer.entry((a, b)).or_default().push(v);
    }
    for &(i, j) in &elim.estar {
        let mut clause = vec![-pl(ep[&(i, j)])];
        if let Some(&e) = arc_lits.get(&(i, j)) {
            clause.push(e);
        }
        if let Some(ws) = by_outer.get(&(i, j)) {
            clause.extend(ws.iter().map(|&w| pl(w)));
        }
        em.clause(clause);
    }
    for (&(a, m, b), &v) in elim.delta.iter().zip(&tri) {
        em.clause(vec![-pl(v), pl(ep[&(a, m)])]);
        em.clause(vec![-pl(v), pl(ep[&(m, b)])]);
    }
    ep
}

// ---------------------------------------------------------------------------
// Public encoders
// ---------------------------------------------------------------------------

/// Acyclicity by transitive closure.
pub fn encode_acyclicity_tc(inst: &GraphInstance) -> Result<EncodedFormula, EncodeError> {
    let mut em = Emit::new(inst.base.var_count);
    emit_acyclicity_tc(&mut em, inst.graph.node_count(), &instance_arc_lits(inst));
    Ok(em.finish(None, None))
}

/// Acyclicity by tree reduction.
pub fn encode_acyclicity_tr(inst: &GraphInstance) -> Result<EncodedFormula, EncodeError> {
    let mut em = Emit::new(inst.base.var_count);
    emit_acyclicity_tr(&mut em, inst.graph.node_count(), &instance_arc_lits(inst));
    Ok(em.finish(None, None))
}

/// Acyclicity by vertex elimination along `o`.
pub fn encode_acyclicity_ve(
    inst: &GraphInstance,
    o: &EliminationOrdering,
) -> Result<EncodedFormula, EncodeError> {
    let mut em = Emit::new(inst.base.var_count);
    let elim = eliminate(&inst.graph, o)?;
    emit_acyclicity_ve(&mut em, &instance_arc_lits(inst), &elim);
    Ok(em.finish(Some(VeInfo::of(&elim)), None))
}

/// s-t-unreachability: the forward reachability closure of `s` must miss
/// `t`.
pub fn encode_noreach(
    inst: &GraphInstance,
    s: Node,
    t: Node,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    let mut em = Emit::new(inst.base.var_count);
    let r = emit_forward_reach(
        &mut em,
        inst.graph.node_count(),
        &instance_arc_lits(inst),
        s,
        "reach",
    );
    em.clause(vec![-pl(r[(t - 1) as usize])]);
    Ok(em.finish(None, None))
}

/// s-t-reachability with layered distance variables.
pub fn encode_reach_explicit(
    inst: &GraphInstance,
    s: Node,
    t: Node,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    if s == t {
        return Err(EncodeError::EndpointsEqual(s));
    }
    let mut em = Emit::new(inst.base.var_count);
    let n = inst.graph.node_count();
    let r = emit_reach_layers(&mut em, &inst.graph, &instance_arc_lits(inst), t);
    em.clause(vec![pl(r[((s - 1) * n + (n - 1)) as usize])]);
    Ok(em.finish(None, None))
}

/// s-t-reachability reduced to acyclicity of a witness subgraph.
pub fn encode_reach_via_acyclicity(
    inst: &GraphInstance,
    s: Node,
    t: Node,
    method: AcycMethod<'_>,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    if s == t {
        return Err(EncodeError::EndpointsEqual(s));
    }
    let mut em = Emit::new(inst.base.var_count);
    let arc_lits = instance_arc_lits(inst);
    let (ep, r) = emit_reach_witness(&mut em, &inst.graph, &arc_lits, t, "reach");
    em.clause(vec![pl(r[(s - 1) as usize])]);
    let core = (em.clauses.len(), em.next_var - em.base_vars);
    let ep_lits: ArcLits = ep.iter().map(|(&arc, &v)| (arc, pl(v))).collect();
    let ve = em.scoped("acyc.", |em| {
        emit_acyclicity(em, &inst.graph, &ep_lits, method)
    })?;
    Ok(em.finish(ve, Some(core)))
}

fn validate_reach_pins(
    o: &EliminationOrdering,
    s: Node,
    t: Node,
) -> Result<(), EncodeError> {
    let order = o.order();
    let n = order.len();
    let last_two_ok = n >= 2 && {
        let (a, b) = (order[n - 2], order[n - 1]);
        (a, b) == (s, t) || (a, b) == (t, s)
    };
    if !last_two_ok {
        return Err(EncodeError::OrderingNotPinned(vec![s, t]));
    }
    Ok(())
}

/// s-t-reachability by vertex elimination. `o` must eliminate `s` and `t`
/// last, so a path contracts to the single E* arc (s, t).
pub fn encode_reach_ve(
    inst: &GraphInstance,
    s: Node,
    t: Node,
    o: &EliminationOrdering,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    if s == t {
        return Err(EncodeError::EndpointsEqual(s));
    }
    validate_reach_pins(o, s, t)?;
    let mut em = Emit::new(inst.base.var_count);
    let elim = eliminate(&inst.graph, o)?;
    let ep = emit_ve_reach_support(&mut em, &instance_arc_lits(inst), &elim);
    // No (s, t) arc in E* means no subgraph can reach; the empty clause
    // keeps the encoding honest.
    match ep.get(&(s, t)) {
        Some(&v) => em.clause(vec![pl(v)]),
        None => em.clause(vec![]),
    }
    Ok(em.finish(Some(VeInfo::of(&elim)), None))
}

/// Explicit s-t-eventual-reachability: forward closure from `s`, layered
/// backward reachability to `t`, and every forward-reachable node must
/// reach `t` within |V|-1 steps.
pub fn encode_ereach_explicit(
    inst: &GraphInstance,
    s: Node,
    t: Node,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    let mut em = Emit::new(inst.base.var_count);
    let n = inst.graph.node_count();
    let arc_lits = instance_arc_lits(inst);
    let fr = emit_forward_reach(&mut em, n, &arc_lits, s, "reach");
    let r = emit_reach_layers(&mut em, &inst.graph, &arc_lits, t);
    for i in 1..=n {
        em.clause(vec![
            -pl(fr[(i - 1) as usize]),
            pl(r[((i - 1) * n + (n - 1)) as usize]),
        ]);
    }
    Ok(em.finish(None, None))
}

/// s-t-eventual-reachability reduced to acyclicity of a witness subgraph.
pub fn encode_ereach_via_acyclicity(
    inst: &GraphInstance,
    s: Node,
    t: Node,
    method: AcycMethod<'_>,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    let mut em = Emit::new(inst.base.var_count);
    let n = inst.graph.node_count();
    let arc_lits = instance_arc_lits(inst);
    let fr = emit_forward_reach(&mut em, n, &arc_lits, s, "reach");
    let (ep, rt) = emit_reach_witness(&mut em, &inst.graph, &arc_lits, t, "reach_to");
    for i in 1..=n {
        em.clause(vec![-pl(fr[(i - 1) as usize]), pl(rt[(i - 1) as usize])]);
    }
    let core = (em.clauses.len(), em.next_var - em.base_vars);
    let ep_lits: ArcLits = ep.iter().map(|(&arc, &v)| (arc, pl(v))).collect();
    let ve = em.scoped("acyc.", |em| {
        emit_acyclicity(em, &inst.graph, &ep_lits, method)
    })?;
    Ok(em.finish(ve, Some(core)))
}

/// s-t-eventual-reachability by vertex elimination. `o` must eliminate `t`
/// last; every forward-reachable node keeps a selected E* arc towards a
/// later-eliminated node, and selected arcs stand for real paths.
pub fn encode_ereach_ve(
    inst: &GraphInstance,
    s: Node,
    t: Node,
    o: &EliminationOrdering,
) -> Result<EncodedFormula, EncodeError> {
    check_endpoint(&inst.graph, s)?;
    check_endpoint(&inst.graph, t)?;
    if o.order().last() != Some(&t) {
        return Err(EncodeError::OrderingNotPinned(vec![t]));
    }
    let mut em = Emit::new(inst.base.var_count);
    let n = inst.graph.node_count();
    let arc_lits = instance_arc_lits(inst);
    let elim = eliminate(&inst.graph, o)?;
    let fr = emit_forward_reach(&mut em, n, &arc_lits, s, "reach");
    let ep = emit_ve_reach_support(&mut em, &arc_lits, &elim);
    for i in 1..=n {
        if i == t {
            continue;
        }
        let mut clause = vec![-pl(fr[(i - 1) as usize])];
        for (&(a, b), &v) in ep.range((i, 0)..=(i, Node::MAX)) {
            debug_assert_eq!(a, i);
            if o.position(b) > o.position(i) {
                clause.push(pl(v));
            }
        }
        em.clause(clause);
    }
    Ok(em.finish(Some(VeInfo::of(&elim)), None))
}

// ---------------------------------------------------------------------------
// Plan-driven encoding of whole instances
// ---------------------------------------------------------------------------

/// Acyclicity encoder kind inside [`Method::ViaAcyclic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcycKind {
    Ve,
    Tc,
    Tr,
}

/// Encoding method selector. `Ve`, `Tc`, `Tr` apply to acyclicity;
/// `Explicit`, `ViaAcyclic`, `Ve` apply to reachability and eventual
/// reachability; unreachability has a single encoding and accepts any
/// method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ve,
    Tc,
    Tr,
    Explicit,
    ViaAcyclic(AcycKind),
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Ve => f.write_str("ve"),
            Method::Tc => f.write_str("tc"),
            Method::Tr => f.write_str("tr"),
            Method::Explicit => f.write_str("explicit"),
            Method::ViaAcyclic(AcycKind::Ve) => f.write_str("via-acyclic:ve"),
            Method::ViaAcyclic(AcycKind::Tc) => f.write_str("via-acyclic:tc"),
            Method::ViaAcyclic(AcycKind::Tr) => f.write_str("via-acyclic:tr"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ve" => Ok(Method::Ve),
            "tc" => Ok(Method::Tc),
            "tr" => Ok(Method::Tr),
            "explicit" => Ok(Method::Explicit),
            "via-acyclic:ve" => Ok(Method::ViaAcyclic(AcycKind::Ve)),
            "via-acyclic:tc" => Ok(Method::ViaAcyclic(AcycKind::Tc)),
            "via-acyclic:tr" => Ok(Method::ViaAcyclic(AcycKind::Tr)),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// How elimination orderings are obtained.
#[derive(Debug, Clone)]
pub enum OrderChoice {
    MinDegree,
    MinFill,
    /// A caller-supplied ordering; it must already pin whatever tail the
    /// constraint requires.
    Given(EliminationOrdering),
}

impl OrderChoice {
    pub fn name(&self) -> &'static str {
        match self {
            OrderChoice::MinDegree => "mindegree",
            OrderChoice::MinFill => "minfill",
            OrderChoice::Given(_) => "given",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EncodePlan {
    pub method: Method,
    pub order: OrderChoice,
}

fn resolve_ordering(
    g: &DirectedGraph,
    choice: &OrderChoice,
    pinned_tail: &[Node],
) -> Result<EliminationOrdering, EncodeError> {
    match choice {
        OrderChoice::MinDegree => Ok(order_min_degree(g, pinned_tail)?),
        OrderChoice::MinFill => Ok(order_min_fill(g, pinned_tail)?),
        OrderChoice::Given(o) => Ok(o.clone()),
    }
}

fn mismatch(method: Method, constraint: GraphConstraint) -> EncodeError {
    EncodeError::MethodMismatch {
        method: method.to_string(),
        constraint: constraint.to_string(),
    }
}

fn emit_constraint(
    em: &mut Emit,
    inst: &GraphInstance,
    arc_lits: &ArcLits,
    constraint: GraphConstraint,
    plan: &EncodePlan,
) -> Result<PartStats, EncodeError> {
    let g = &inst.graph;
    let n = g.node_count();
    // Entry snapshot: core sizes are measured relative to this constraint's
    // own emission, not the whole instance's.
    let clauses_at_entry = em.clauses.len();
    let vars_at_entry = em.next_var;
    match constraint {
        GraphConstraint::Acyclic => {
            let method = match plan.method {
                Method::Ve => {
                    let o = resolve_ordering(g, &plan.order, &[])?;
                    let elim = eliminate(g, &o)?;
                    emit_acyclicity_ve(em, arc_lits, &elim);
                    return Ok((Some(VeInfo::of(&elim)), None));
                }
                Method::Tc => AcycMethod::Tc,
                Method::Tr => AcycMethod::Tr,
                _ => return Err(mismatch(plan.method, constraint)),
            };
            let ve = emit_acyclicity(em, g, arc_lits, method)?;
            Ok((ve, None))
        }
        GraphConstraint::NoReach(s, t) => {
            check_endpoint(g, s)?;
            check_endpoint(g, t)?;
            let r = emit_forward_reach(em, n, arc_lits, s, "reach");
            em.clause(vec![-pl(r[(t - 1) as usize])]);
            Ok((None, None))
        }
        GraphConstraint::Reach(s, t) => {
            check_endpoint(g, s)?;
            check_endpoint(g, t)?;
            if s == t {
                return Err(EncodeError::EndpointsEqual(s));
            }
            match plan.method {
                Method::Explicit => {
                    let r = emit_reach_layers(em, g, arc_lits, t);
                    em.clause(vec![pl(r[((s - 1) * n + (n - 1)) as usize])]);
                    Ok((None, None))
                }
                Method::ViaAcyclic(kind) => {
                    let (ep, r) = emit_reach_witness(em, g, arc_lits, t, "reach");
                    em.clause(vec![pl(r[(s - 1) as usize])]);
                    let core = (
                        em.clauses.len() - clauses_at_entry,
                        em.next_var - vars_at_entry,
                    );
                    emit_via_sub_acyclicity(em, g, &ep, kind, &plan.order)
                        .map(|ve| (ve, Some(core)))
                }
                Method::Ve => {
                    let o = resolve_ordering(g, &plan.order, &[s, t])?;
                    validate_reach_pins(&o, s, t)?;
                    let elim = eliminate(g, &o)?;
                    let ep = emit_ve_reach_support(em, arc_lits, &elim);
                    match ep.get(&(s, t)) {
                        Some(&v) => em.clause(vec![pl(v)]),
                        None => em.clause(vec![]),
                    }
                    Ok((Some(VeInfo::of(&elim)), None))
                }
                _ => Err(mismatch(plan.method, constraint)),
            }
        }
        GraphConstraint::EReach(s, t) => {
            check_endpoint(g, s)?;
            check_endpoint(g, t)?;
            match plan.method {
                Method::Explicit => {
                    let fr = emit_forward_reach(em, n, arc_lits, s, "reach");
                    let r = emit_reach_layers(em, g, arc_lits, t);
                    for i in 1..=n {
                        em.clause(vec![
                            -pl(fr[(i - 1) as usize]),
                            pl(r[((i - 1) * n + (n - 1)) as usize]),
                        ]);
                    }
                    Ok((None, None))
                }
                Method::ViaAcyclic(kind) => {
                    let fr = emit_forward_reach(em, n, arc_lits, s, "reach");
                    let (ep, rt) = emit_reach_witness(em, g, arc_lits, t, "reach_to");
                    for i in 1..=n {
                        em.clause(vec![-pl(fr[(i - 1) as usize]), pl(rt[(i - 1) as usize])]);
                    }
                    let core = (
                        em.clauses.len() - clauses_at_entry,
                        em.next_var - vars_at_entry,
                    );
                    emit_via_sub_acyclicity(em, g, &ep, kind, &plan.order)
                        .map(|ve| (ve, Some(core)))
                }
                Method::Ve => {
                    let o = resolve_ordering(g, &plan.order, &[t])?;
                    if o.order().last() != Some(&t) {
                        return Err(EncodeError::OrderingNotPinned(vec![t]));
                    }
                    let elim = eliminate(g, &o)?;
                    let fr = emit_forward_reach(em, n, arc_lits, s, "reach");
                    let ep = emit_ve_reach_support(em, arc_lits, &elim);
                    for i in 1..=n {
                        if i == t {
                            continue;
                        }
                        let mut clause = vec![-pl(fr[(i - 1) as usize])];
                        for (&(_, b), &v) in ep.range((i, 0)..=(i, Node::MAX)) {
                            if o.position(b) > o.position(i) {
                                clause.push(pl(v));
                            }
                        }
                        em.clause(clause);
                    }
                    Ok((Some(VeInfo::of(&elim)), None))
                }
                _ => Err(mismatch(plan.method, constraint)),
            }
        }
    }
}

fn emit_via_sub_acyclicity(
    em: &mut Emit,
    g: &DirectedGraph,
    ep: &BTreeMap<(Node, Node), u32>,
    kind: AcycKind,
    order: &OrderChoice,
) -> Result<Option<VeInfo>, EncodeError> {
    let ep_lits: ArcLits = ep.iter().map(|(&arc, &v)| (arc, pl(v))).collect();
    em.scoped("acyc.", |em| match kind {
        AcycKind::Tc => emit_acyclicity(em, g, &ep_lits, AcycMethod::Tc),
        AcycKind::Tr => emit_acyclicity(em, g, &ep_lits, AcycMethod::Tr),
        AcycKind::Ve => {
            let o = resolve_ordering(g, order, &[])?;
            emit_acyclicity(em, g, &ep_lits, AcycMethod::Ve(&o))
        }
    })
}

/// Encodes every constraint of the instance in declaration order against a
/// shared variable allocator. With more than one constraint, auxiliary
/// families are namespaced `c<index>.`. Width aggregates as the maximum
/// over eliminations; `|E*|` and `|Δ|` as sums.
pub fn encode_instance(
    inst: &GraphInstance,
    plan: &EncodePlan,
) -> Result<EncodedFormula, EncodeError> {
    let mut em = Emit::new(inst.base.var_count);
    let arc_lits = instance_arc_lits(inst);
    let namespaced = inst.constraints.len() > 1;
    let mut ve_agg: Option<VeInfo> = None;
    let mut core_agg: Option<(usize, u32)> = None;
    for (idx, &constraint) in inst.constraints.iter().enumerate() {
        let (ve, core) = if namespaced {
            let ns = format!("c{idx}.");
            em.scoped(&ns, |em| emit_constraint(em, inst, &arc_lits, constraint, plan))?
        } else {
            emit_constraint(&mut em, inst, &arc_lits, constraint, plan)?
        };
        if let Some(v) = ve {
            ve_agg = Some(match ve_agg {
                None => v,
                Some(prev) => VeInfo {
                    width: prev.width.max(v.width),
                    estar: prev.estar + v.estar,
                    triangles: prev.triangles + v.triangles,
                },
            });
        }
        if let Some(c) = core {
            let prev = core_agg.unwrap_or((0, 0));
            core_agg = Some((prev.0 + c.0, prev.1 + c.1));
        }
    }
    Ok(em.finish(ve_agg, core_agg))
}
