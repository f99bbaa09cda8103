//! Directed graphs, vertex elimination, and elimination orderings.
//!
//! Eliminating a vertex removes it and connects each of its in-neighbors to
//! each of its out-neighbors. The union of all intermediate arc sets is the
//! vertex elimination graph `G*`; the per-step in/out neighbor pairs are the
//! triangle set `Δ`; the maximum out-degree at elimination time is the width
//! of the ordering. These three objects drive the vertex elimination
//! encoders.

use std::collections::BTreeSet;
use thiserror::Error;

/// Node identifier. Nodes of an `n`-node graph are `1..=n`.
pub type Node = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc endpoint {0} outside 1..={1}")]
    EndpointOutOfRange(Node, Node),
    #[error("ordering has {got} entries, graph has {want} nodes")]
    OrderingLength { got: usize, want: usize },
    #[error("ordering is not a permutation: node {0} repeated or out of range")]
    NotAPermutation(Node),
    #[error("pinned node {0} not in graph")]
    PinnedNodeMissing(Node),
    #[error("pinned node {0} listed twice")]
    PinnedNodeRepeated(Node),
}

/// A directed graph over nodes `1..=node_count` with no parallel arcs.
/// Self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    node_count: Node,
    arcs: BTreeSet<(Node, Node)>,
}

impl DirectedGraph {
    pub fn new(
        node_count: Node,
        arcs: impl IntoIterator<Item = (Node, Node)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            if u == 0 || u > node_count {
                return Err(GraphError::EndpointOutOfRange(u, node_count));
            }
            if v == 0 || v > node_count {
                return Err(GraphError::EndpointOutOfRange(v, node_count));
            }
            set.insert((u, v));
        }
        Ok(Self {
            node_count,
            arcs: set,
        })
    }

    pub fn node_count(&self) -> Node {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> {
        1..=self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in ascending `(u, v)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn contains_arc(&self, u: Node, v: Node) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn out_neighbors(&self, u: Node) -> impl Iterator<Item = Node> + '_ {
        self.arcs.range((u, 0)..=(u, Node::MAX)).map(|&(_, v)| v)
    }

    /// Out-adjacency lists indexed by node id (index 0 unused).
    pub fn out_adjacency(&self) -> Vec<Vec<Node>> {
        let mut adj = vec![Vec::new(); self.node_count as usize + 1];
        for &(u, v) in &self.arcs {
            adj[u as usize].push(v);
        }
        adj
    }

    /// In-adjacency lists indexed by node id (index 0 unused).
    pub fn in_adjacency(&self) -> Vec<Vec<Node>> {
        let mut adj = vec![Vec::new(); self.node_count as usize + 1];
        for &(u, v) in &self.arcs {
            adj[v as usize].push(u);
        }
        adj
    }
}

/// A permutation of the nodes giving the order in which they are eliminated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrdering {
    order: Vec<Node>,
    pos: Vec<usize>,
}

impl EliminationOrdering {
    pub fn new(order: Vec<Node>, node_count: Node) -> Result<Self, GraphError> {
        if order.len() != node_count as usize {
            return Err(GraphError::OrderingLength {
                got: order.len(),
                want: node_count as usize,
            });
        }
        let mut pos = vec![usize::MAX; node_count as usize + 1];
        for (i, &v) in order.iter().enumerate() {
            if v == 0 || v > node_count || pos[v as usize] != usize::MAX {
                return Err(GraphError::NotAPermutation(v));
            }
            pos[v as usize] = i;
        }
        Ok(Self { order, pos })
    }

    pub fn order(&self) -> &[Node] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Zero-based position of `v` in the ordering.
    pub fn position(&self, v: Node) -> usize {
        self.pos[v as usize]
    }

    /// True when the last entries equal `tail` in the given order.
    pub fn pins_tail(&self, tail: &[Node]) -> bool {
        self.order.len() >= tail.len() && self.order[self.order.len() - tail.len()..] == *tail
    }
}

/// Result of eliminating every vertex of a graph along one ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationResult {
    /// `E*`: union of the arc sets of every intermediate graph.
    pub estar: BTreeSet<(Node, Node)>,
    /// Triangles `(a, m, b)`: eliminating middle vertex `m` connected `a` to
    /// `b`. Recorded for every in/out-neighbor pair, whether or not the arc
    /// `(a, b)` already existed.
    pub delta: Vec<(Node, Node, Node)>,
    /// Maximum out-degree of a vertex at the moment of its elimination.
    pub width: u32,
    /// Number of new arcs added by each elimination step.
    pub fill_per_step: Vec<usize>,
}

/// Working adjacency for elimination. Index 0 unused.
struct ElimState {
    out: Vec<BTreeSet<Node>>,
    inn: Vec<BTreeSet<Node>>,
}

impl ElimState {
    fn from_graph(g: &DirectedGraph) -> Self {
        let n = g.node_count() as usize;
        let mut out = vec![BTreeSet::new(); n + 1];
        let mut inn = vec![BTreeSet::new(); n + 1];
        for (u, v) in g.arcs() {
            out[u as usize].insert(v);
            inn[v as usize].insert(u);
        }
        Self { out, inn }
    }

    fn degree(&self, v: Node) -> usize {
        // A self-loop sits in both sets and counts with weight 2.
        self.out[v as usize].len() + self.inn[v as usize].len()
    }

    /// New arcs that eliminating `v` would add right now.
    fn fill_of(&self, v: Node) -> usize {
        let mut count = 0;
        for &a in self.inn[v as usize].iter().filter(|&&a| a != v) {
            for &b in self.out[v as usize].iter().filter(|&&b| b != v) {
                if a != b && !self.out[a as usize].contains(&b) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Removes `v`, connecting its in-neighbors to its out-neighbors.
    /// Returns `(in_nbrs, out_nbrs, added_arcs)`; self-loops on `v` are
    /// dropped and never produce neighbor pairs.
    fn eliminate_vertex(&mut self, v: Node) -> (Vec<Node>, Vec<Node>, Vec<(Node, Node)>) {
        let vi = v as usize;
        let in_nbrs: Vec<Node> = self.inn[vi].iter().copied().filter(|&a| a != v).collect();
        let out_nbrs: Vec<Node> = self.out[vi].iter().copied().filter(|&b| b != v).collect();
        for &a in &in_nbrs {
            self.out[a as usize].remove(&v);
        }
        for &b in &out_nbrs {
            self.inn[b as usize].remove(&v);
        }
        self.out[vi].clear();
        self.inn[vi].clear();
        let mut added = Vec::new();
        for &a in &in_nbrs {
            for &b in &out_nbrs {
                if a != b && self.out[a as usize].insert(b) {
                    self.inn[b as usize].insert(a);
                    added.push((a, b));
                }
            }
        }
        (in_nbrs, out_nbrs, added)
    }
}

/// Runs vertex elimination along `o` and collects `E*`, `Δ`, the width, and
/// per-step fill counts.
pub fn eliminate(g: &DirectedGraph, o: &EliminationOrdering) -> Result<EliminationResult, GraphError> {
    if o.len() != g.node_count() as usize {
        return Err(GraphError::OrderingLength {
            got: o.len(),
            want: g.node_count() as usize,
        });
    }
    let mut st = ElimState::from_graph(g);
    let mut estar: BTreeSet<(Node, Node)> = g.arcs().collect();
    let mut delta = Vec::new();
    let mut width = 0u32;
    let mut fill_per_step = Vec::with_capacity(o.len());
    for &v in o.order() {
        width = width.max(st.out[v as usize].len() as u32);
        let (in_nbrs, out_nbrs, added) = st.eliminate_vertex(v);
        for &a in &in_nbrs {
            for &b in &out_nbrs {
                if a != b {
                    delta.push((a, v, b));
                }
            }
        }
        fill_per_step.push(added.len());
        estar.extend(added);
    }
    Ok(EliminationResult {
        estar,
        delta,
        width,
        fill_per_step,
    })
}

#[derive(Clone, Copy)]
enum GreedyScore {
    MinDegree,
    MinFill,
}

/// Greedy ordering: repeatedly eliminates a non-pinned vertex with minimal
/// in-degree + out-degree; ties broken by fewest fill arcs, then lowest
/// node id. `pinned_tail` nodes take the final positions, in the given
/// order.
pub fn order_min_degree(
    g: &DirectedGraph,
    pinned_tail: &[Node],
) -> Result<EliminationOrdering, GraphError> {
    order_greedy(g, pinned_tail, GreedyScore::MinDegree)
}

/// Greedy ordering minimizing the number of arcs each elimination step adds;
/// ties broken by lowest node id. `pinned_tail` as in [`order_min_degree`].
pub fn order_min_fill(
    g: &DirectedGraph,
    pinned_tail: &[Node],
) -> Result<EliminationOrdering, GraphError> {
    order_greedy(g, pinned_tail, GreedyScore::MinFill)
}

fn order_greedy(
    g: &DirectedGraph,
    pinned_tail: &[Node],
    score: GreedyScore,
) -> Result<EliminationOrdering, GraphError> {
    let n = g.node_count() as usize;
    let mut pinned = vec![false; n + 1];
    for &p in pinned_tail {
        if p == 0 || p as usize > n {
            return Err(GraphError::PinnedNodeMissing(p));
        }
        if pinned[p as usize] {
            return Err(GraphError::PinnedNodeRepeated(p));
        }
        pinned[p as usize] = true;
    }

    let mut st = ElimState::from_graph(g);
    let mut alive = vec![true; n + 1];
    // Fill scores are cached and recomputed only for vertices whose
    // neighborhood an elimination step touched. Min-degree uses them as a
    // tie-break; min-fill as the primary score.
    let mut fill = vec![0usize; n + 1];
    for (v, slot) in fill.iter_mut().enumerate().skip(1) {
        *slot = st.fill_of(v as Node);
    }

    let mut order = Vec::with_capacity(n);
    for _ in 0..n - pinned_tail.len() {
        let mut best: Option<((usize, usize), Node)> = None;
        for v in 1..=n as Node {
            if !alive[v as usize] || pinned[v as usize] {
                continue;
            }
            let key = match score {
                GreedyScore::MinDegree => (st.degree(v), fill[v as usize]),
                GreedyScore::MinFill => (fill[v as usize], 0),
            };
            if best.is_none_or(|(bk, _)| key < bk) {
                best = Some((key, v));
            }
        }
        let (_, v) = best.expect("non-pinned vertex available");
        order.push(v);
        alive[v as usize] = false;

        let (in_nbrs, out_nbrs, added) = st.eliminate_vertex(v);
        let mut affected: BTreeSet<Node> = in_nbrs.iter().chain(out_nbrs.iter()).copied().collect();
        for &(a, b) in &added {
            // A new arc (a, b) also settles pairs counted at any common
            // vertex w with arcs a->w and w->b.
            for &w in st.out[a as usize].intersection(&st.inn[b as usize]) {
                affected.insert(w);
            }
        }
        for w in affected {
            if alive[w as usize] {
                fill[w as usize] = st.fill_of(w);
            }
        }
    }
    order.extend_from_slice(pinned_tail);
    EliminationOrdering::new(order, g.node_count())
}

/// Transitive closure `G+`: arc `(u, v)` iff a nonempty path `u -> v` exists.
pub fn transitive_closure(g: &DirectedGraph) -> DirectedGraph {
    let adj = g.out_adjacency();
    let n = g.node_count() as usize;
    let mut arcs = Vec::new();
    let mut seen = vec![false; n + 1];
    let mut stack = Vec::new();
    for u in g.nodes() {
        seen.iter_mut().for_each(|s| *s = false);
        stack.extend_from_slice(&adj[u as usize]);
        while let Some(w) = stack.pop() {
            if std::mem::replace(&mut seen[w as usize], true) {
                continue;
            }
            stack.extend_from_slice(&adj[w as usize]);
        }
        for v in g.nodes() {
            if seen[v as usize] {
                arcs.push((u, v));
            }
        }
    }
    DirectedGraph::new(g.node_count(), arcs).expect("closure endpoints in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: Node) -> DirectedGraph {
        DirectedGraph::new(n, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    fn eight_cycle_ordering() -> EliminationOrdering {
        EliminationOrdering::new(vec![2, 4, 6, 8, 1, 5, 3, 7], 8).unwrap()
    }

    #[test]
    fn eliminate_eight_cycle() {
        let g = cycle(8);
        let res = eliminate(&g, &eight_cycle_ordering()).unwrap();
        assert_eq!(res.estar.len(), 14); // six arcs added to the original eight
        assert_eq!(res.width, 1);
        assert_eq!(res.delta.len(), 6);
        assert_eq!(res.fill_per_step.iter().sum::<usize>(), 6);
    }

    #[test]
    fn eliminate_no_arcs() {
        let g = DirectedGraph::new(5, []).unwrap();
        let o = EliminationOrdering::new(vec![3, 1, 5, 2, 4], 5).unwrap();
        let res = eliminate(&g, &o).unwrap();
        assert!(res.estar.is_empty());
        assert!(res.delta.is_empty());
        assert_eq!(res.width, 0);
    }

    #[test]
    fn eliminate_triangle_step_by_step() {
        let g = DirectedGraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        let o = EliminationOrdering::new(vec![1, 2, 3], 3).unwrap();
        let res = eliminate(&g, &o).unwrap();
        let want: BTreeSet<_> = [(1, 2), (2, 3), (3, 1), (3, 2)].into_iter().collect();
        assert_eq!(res.estar, want);
        assert_eq!(res.delta, vec![(3, 1, 2)]);
        assert_eq!(res.width, 1);
    }

    #[test]
    fn eliminate_rejects_wrong_ordering_length() {
        let g = cycle(4);
        let o = EliminationOrdering::new(vec![1, 2, 3], 3).unwrap();
        assert!(matches!(
            eliminate(&g, &o),
            Err(GraphError::OrderingLength { .. })
        ));
    }

    #[test]
    fn ordering_rejects_non_permutation() {
        assert!(EliminationOrdering::new(vec![1, 1, 3], 3).is_err());
        assert!(EliminationOrdering::new(vec![1, 2, 4], 3).is_err());
        assert!(EliminationOrdering::new(vec![1, 2], 3).is_err());
    }

    #[test]
    fn min_degree_eight_cycle_width_one() {
        let g = cycle(8);
        let o = order_min_degree(&g, &[]).unwrap();
        let res = eliminate(&g, &o).unwrap();
        assert_eq!(res.width, 1);
    }

    #[test]
    fn min_degree_complete_digraph_ties_by_id() {
        let mut arcs = Vec::new();
        for u in 1..=3 {
            for v in 1..=3 {
                if u != v {
                    arcs.push((u, v));
                }
            }
        }
        let g = DirectedGraph::new(3, arcs).unwrap();
        let o = order_min_degree(&g, &[]).unwrap();
        assert_eq!(o.order(), &[1, 2, 3]);
    }

    #[test]
    fn min_degree_respects_pinned_tail() {
        let g = cycle(5);
        let o = order_min_degree(&g, &[2, 4]).unwrap();
        assert!(o.pins_tail(&[2, 4]));
        assert!(order_min_degree(&g, &[9]).is_err());
        assert!(order_min_degree(&g, &[2, 2]).is_err());
    }

    #[test]
    fn min_fill_eight_cycle_width_one() {
        let g = cycle(8);
        let o = order_min_fill(&g, &[]).unwrap();
        let res = eliminate(&g, &o).unwrap();
        assert_eq!(res.width, 1);
    }

    #[test]
    fn min_fill_star_zero_fill() {
        let g = DirectedGraph::new(6, (2..=6).map(|k| (1, k))).unwrap();
        let o = order_min_fill(&g, &[]).unwrap();
        let res = eliminate(&g, &o).unwrap();
        assert!(res.fill_per_step.iter().all(|&f| f == 0));
    }

    #[test]
    fn min_fill_triangle_starts_at_lowest_id() {
        // Every candidate's elimination adds exactly one arc.
        let g = DirectedGraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        let st = ElimState::from_graph(&g);
        for v in 1..=3 {
            assert_eq!(st.fill_of(v), 1);
        }
        let o = order_min_fill(&g, &[]).unwrap();
        assert_eq!(o.order()[0], 1);
    }

    #[test]
    fn closure_of_cycle_is_complete_with_self_pairs() {
        let g = cycle(8);
        let tc = transitive_closure(&g);
        assert_eq!(tc.arc_count(), 64);
    }

    #[test]
    fn closure_of_empty_and_chain() {
        let g = DirectedGraph::new(4, []).unwrap();
        assert_eq!(transitive_closure(&g).arc_count(), 0);
        let g = DirectedGraph::new(3, [(1, 2), (2, 3)]).unwrap();
        let tc = transitive_closure(&g);
        let want: BTreeSet<_> = [(1, 2), (2, 3), (1, 3)].into_iter().collect();
        assert_eq!(tc.arcs().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn self_loop_degree_counts_twice_and_makes_no_triangles() {
        let g = DirectedGraph::new(2, [(1, 1), (1, 2)]).unwrap();
        let st = ElimState::from_graph(&g);
        assert_eq!(st.degree(1), 3); // loop twice, out-arc once
        let o = EliminationOrdering::new(vec![1, 2], 2).unwrap();
        let res = eliminate(&g, &o).unwrap();
        assert!(res.delta.is_empty());
        assert_eq!(res.estar, g.arcs().collect());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph(max_n: Node) -> impl Strategy<Value = DirectedGraph> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::btree_set((1..=n, 1..=n), 0..=(n as usize * n as usize))
                    .prop_map(move |arcs| DirectedGraph::new(n, arcs).unwrap())
            })
        }

        fn arb_graph_with_ordering(max_n: Node) -> impl Strategy<Value = (DirectedGraph, Vec<Node>)> {
            arb_graph(max_n).prop_flat_map(|g| {
                let n = g.node_count();
                (Just(g), Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
            })
        }

        proptest! {
            #[test]
            fn estar_between_e_and_closure((g, perm) in arb_graph_with_ordering(8)) {
                let o = EliminationOrdering::new(perm, g.node_count()).unwrap();
                let res = eliminate(&g, &o).unwrap();
                let tc = transitive_closure(&g);
                for arc in g.arcs() {
                    prop_assert!(res.estar.contains(&arc));
                }
                for &(u, v) in &res.estar {
                    prop_assert!(g.contains_arc(u, v) || tc.contains_arc(u, v));
                }
                // No new self-pairs beyond original self-loops.
                for &(u, v) in &res.estar {
                    if u == v {
                        prop_assert!(g.contains_arc(u, v));
                    }
                }
            }

            #[test]
            fn cyclic_graphs_leave_bidirectional_pair((g, perm) in arb_graph_with_ordering(8)) {
                let o = EliminationOrdering::new(perm, g.node_count()).unwrap();
                let res = eliminate(&g, &o).unwrap();
                let tc = transitive_closure(&g);
                let cyclic = g.nodes().any(|v| tc.contains_arc(v, v));
                if cyclic {
                    let found = res
                        .estar
                        .iter()
                        .any(|&(u, v)| res.estar.contains(&(v, u)));
                    prop_assert!(found);
                }
            }

            #[test]
            fn fill_counts_bound_estar((g, perm) in arb_graph_with_ordering(8)) {
                let o = EliminationOrdering::new(perm, g.node_count()).unwrap();
                let res = eliminate(&g, &o).unwrap();
                let fills: usize = res.fill_per_step.iter().sum();
                prop_assert_eq!(res.estar.len(), g.arc_count() + fills);
            }

            #[test]
            fn triangles_sit_inside_estar((g, perm) in arb_graph_with_ordering(8)) {
                let o = EliminationOrdering::new(perm, g.node_count()).unwrap();
                let res = eliminate(&g, &o).unwrap();
                for &(a, m, b) in &res.delta {
                    prop_assert!(a != b);
                    prop_assert!(res.estar.contains(&(a, m)));
                    prop_assert!(res.estar.contains(&(m, b)));
                    prop_assert!(o.position(m) < o.position(a));
                    prop_assert!(o.position(m) < o.position(b));
                }
            }

            #[test]
            fn heuristics_are_deterministic(g in arb_graph(8)) {
                let a = order_min_degree(&g, &[]).unwrap();
                let b = order_min_degree(&g, &[]).unwrap();
                prop_assert_eq!(a.order(), b.order());
                let a = order_min_fill(&g, &[]).unwrap();
                let b = order_min_fill(&g, &[]).unwrap();
                prop_assert_eq!(a.order(), b.order());
            }

            /// The cached-fill greedy must match a full recompute every step.
            #[test]
            fn greedy_matches_naive_recompute(g in arb_graph(8)) {
                let fast = order_min_fill(&g, &[]).unwrap();
                let naive = order_naive(&g, false);
                prop_assert_eq!(fast.order(), &naive[..]);
                let fast = order_min_degree(&g, &[]).unwrap();
                let naive = order_naive(&g, true);
                prop_assert_eq!(fast.order(), &naive[..]);
            }
        }

        fn order_naive(g: &DirectedGraph, by_degree: bool) -> Vec<Node> {
            let n = g.node_count() as usize;
            let mut st = ElimState::from_graph(g);
            let mut alive = vec![true; n + 1];
            let mut order = Vec::new();
            for _ in 0..n {
                let v = (1..=n as Node)
                    .filter(|&v| alive[v as usize])
                    .min_by_key(|&v| {
                        if by_degree {
                            (st.degree(v), st.fill_of(v), v)
                        } else {
                            (st.fill_of(v), 0, v)
                        }
                    })
                    .unwrap();
                alive[v as usize] = false;
                st.eliminate_vertex(v);
                order.push(v);
            }
            order
        }
    }
}
