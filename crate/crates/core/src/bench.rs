//! Benchmark instance generators.
//!
//! [`gen_grid_hc`] builds Hamiltonian-cycle-on-grid instances: a cycle
//! through all cells exists iff the base clauses (degree constraints plus a
//! fixed orientation at the anchor corner) and an acyclicity constraint are
//! satisfiable together. [`gen_random`] produces seeded random graph
//! instances for property testing.

use crate::formula::{Cnf, ConstraintKind, GraphConstraint, GraphInstance, Lit};
use crate::graph::{DirectedGraph, Node};
use crate::oracle::{decode_model, Model, OracleError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("grid dimensions must be at least 2x2, got {0}x{1}")]
    DimensionTooSmall(u32, u32),
    #[error("arc count {m} outside 0..={max}")]
    ArcCountOutOfRange { m: usize, max: usize },
    #[error("endpoint constraints need at least 2 nodes")]
    NotEnoughNodes,
}

/// A rows x cols grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub rows: u32,
    pub cols: u32,
}

impl GridSpec {
    pub fn new(rows: u32, cols: u32) -> Result<Self, BenchError> {
        if rows < 2 || cols < 2 {
            return Err(BenchError::DimensionTooSmall(rows, cols));
        }
        Ok(Self { rows, cols })
    }

    pub fn node_count(&self) -> Node {
        self.rows * self.cols
    }

    fn id(&self, row: u32, col: u32) -> Node {
        (row - 1) * self.cols + col
    }

    /// The anchor corner, its right neighbor, and the cell below it.
    fn anchor(&self) -> (Node, Node, Node) {
        (self.id(1, 1), self.id(1, 2), self.id(2, 1))
    }

    /// The cycle-closing arc from the cell below the anchor back into it.
    pub fn closing_arc(&self) -> (Node, Node) {
        let (anchor, _, below) = self.anchor();
        (below, anchor)
    }
}

fn exactly_one(clauses: &mut Vec<Vec<Lit>>, lits: &[Lit]) {
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            clauses.push(vec![-lits[i], -lits[j]]);
        }
    }
    clauses.push(lits.to_vec());
}

/// Hamiltonian-cycle instance on a grid.
///
/// Arcs are both directions of every grid adjacency except the two reverses
/// at the anchor corner, giving `2 (rows (cols-1) + cols (rows-1)) - 2`
/// arcs. The cycle's direction through the anchor is fixed: it leaves to
/// the right and returns from below. The returning step is carried by a
/// dedicated traversal variable while the corresponding graph arc stays
/// disabled, so a cycle decodes as a spanning path and a plain acyclicity
/// constraint admits exactly the single-cycle models.
pub fn gen_grid_hc(spec: &GridSpec) -> Result<GraphInstance, BenchError> {
    GridSpec::new(spec.rows, spec.cols)?;
    let (anchor, right, below) = spec.anchor();
    let closing = spec.closing_arc();

    let mut arcs: Vec<(Node, Node)> = Vec::new();
    for row in 1..=spec.rows {
        for col in 1..=spec.cols {
            let u = spec.id(row, col);
            if col < spec.cols {
                let v = spec.id(row, col + 1);
                arcs.push((u, v));
                arcs.push((v, u));
            }
            if row < spec.rows {
                let v = spec.id(row + 1, col);
                arcs.push((u, v));
                arcs.push((v, u));
            }
        }
    }
    arcs.retain(|&(u, v)| (u, v) != (anchor, below) && (u, v) != (right, anchor));
    arcs.sort_unstable();

    let arc_var: BTreeMap<(Node, Node), u32> = arcs
        .iter()
        .enumerate()
        .map(|(k, &arc)| (arc, k as u32 + 1))
        .collect();
    let closing_graph_var = arc_var[&closing];
    let closing_step_var = arcs.len() as u32 + 1;
    let var_count = closing_step_var;

    // The variable actually carrying a traversal of (u, v) in the degree
    // constraints; the closing step uses the extra variable.
    let step_var = |u: Node, v: Node| {
        if (u, v) == closing {
            closing_step_var as Lit
        } else {
            arc_var[&(u, v)] as Lit
        }
    };

    let n = spec.node_count();
    let mut out_of: Vec<Vec<Lit>> = vec![Vec::new(); n as usize + 1];
    let mut into: Vec<Vec<Lit>> = vec![Vec::new(); n as usize + 1];
    for &(u, v) in &arcs {
        out_of[u as usize].push(step_var(u, v));
        into[v as usize].push(step_var(u, v));
    }

    let mut clauses = Vec::new();
    for u in 1..=n {
        exactly_one(&mut clauses, &out_of[u as usize]);
    }
    for v in 1..=n {
        exactly_one(&mut clauses, &into[v as usize]);
    }
    // Anchor orientation, pinned explicitly.
    clauses.push(vec![arc_var[&(anchor, right)] as Lit]);
    clauses.push(vec![closing_step_var as Lit]);
    clauses.push(vec![-(closing_graph_var as Lit)]);

    let mut base = Cnf::new(var_count);
    base.clauses = clauses;
    let graph = DirectedGraph::new(n, arcs).expect("grid arcs in range");
    Ok(
        GraphInstance::new(base, graph, arc_var, vec![GraphConstraint::Acyclic])
            .expect("grid instance is well formed"),
    )
}

/// True iff the model traces a single directed cycle through every cell:
/// the decoded spanning path closed by the anchor's returning step.
pub fn model_is_hamiltonian_cycle(
    spec: &GridSpec,
    inst: &GraphInstance,
    m: &Model,
) -> Result<bool, OracleError> {
    let decoded = decode_model(inst, m)?;
    let n = spec.node_count();
    let mut succ = vec![0 as Node; n as usize + 1];
    let mut indeg = vec![0u32; n as usize + 1];
    let mut arcs: Vec<(Node, Node)> = decoded.arcs().collect();
    arcs.push(spec.closing_arc());
    for (u, v) in arcs {
        if succ[u as usize] != 0 {
            return Ok(false); // out-degree above one
        }
        succ[u as usize] = v;
        indeg[v as usize] += 1;
    }
    if (1..=n).any(|v| succ[v as usize] == 0 || indeg[v as usize] != 1) {
        return Ok(false);
    }
    let mut seen = 0u32;
    let mut cur = 1 as Node;
    loop {
        seen += 1;
        cur = succ[cur as usize];
        if cur == 1 {
            break;
        }
        if seen > n {
            return Ok(false);
        }
    }
    Ok(seen == n)
}

/// Random instance: `m` arcs sampled uniformly without replacement from the
/// n(n-1) loop-free ordered pairs, one fresh variable per arc, an empty
/// base clause list, and one constraint of the requested kind with
/// uniformly chosen distinct endpoints. Deterministic per seed.
pub fn gen_random(
    n: Node,
    m: usize,
    kind: ConstraintKind,
    seed: u64,
) -> Result<GraphInstance, BenchError> {
    let max = n as usize * (n as usize).saturating_sub(1);
    if m > max {
        return Err(BenchError::ArcCountOutOfRange { m, max });
    }
    let needs_endpoints = !matches!(kind, ConstraintKind::Acyclic);
    if needs_endpoints && n < 2 {
        return Err(BenchError::NotEnoughNodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Partial Fisher-Yates over pair indices.
    let mut pool: Vec<usize> = (0..max).collect();
    for k in 0..m {
        let pick = rng.gen_range(k..max);
        pool.swap(k, pick);
    }
    let mut arcs: Vec<(Node, Node)> = pool[..m]
        .iter()
        .map(|&idx| {
            let u = (idx / (n as usize - 1)) as Node + 1;
            let v0 = (idx % (n as usize - 1)) as Node + 1;
            let v = if v0 < u { v0 } else { v0 + 1 };
            (u, v)
        })
        .collect();
    arcs.sort_unstable();

    let arc_var: BTreeMap<(Node, Node), u32> = arcs
        .iter()
        .enumerate()
        .map(|(k, &arc)| (arc, k as u32 + 1))
        .collect();

    let constraint = if needs_endpoints {
        let s = rng.gen_range(1..=n);
        let mut t = rng.gen_range(1..n);
        if t >= s {
            t += 1;
        }
        match kind {
            ConstraintKind::Reach => GraphConstraint::Reach(s, t),
            ConstraintKind::NoReach => GraphConstraint::NoReach(s, t),
            ConstraintKind::EReach => GraphConstraint::EReach(s, t),
            ConstraintKind::Acyclic => unreachable!(),
        }
    } else {
        GraphConstraint::Acyclic
    };

    let graph = DirectedGraph::new(n, arcs).expect("sampled arcs in range");
    Ok(
        GraphInstance::new(Cnf::new(m as u32), graph, arc_var, vec![constraint])
            .expect("random instance is well formed"),
    )
}
