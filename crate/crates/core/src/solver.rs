//! A small complete CDCL SAT solver.
//!
//! Two-watched-literal propagation, first-UIP conflict analysis,
//! activity-based branching with phase saving, and Luby restarts. No
//! preprocessing and no clause deletion; adequate up to tens of thousands of
//! variables, which covers everything the instance generators produce.
//! External solvers remain the performance path.

use crate::formula::{Cnf, Lit};
use crate::oracle::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    /// Conflict budget exhausted before an answer was reached.
    Aborted,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Present iff `status == Sat`; satisfies every input clause.
    pub model: Option<Model>,
    pub stats: SolverStats,
}

/// Complete decision procedure; deterministic for a fixed seed.
pub fn solve(cnf: &Cnf, seed: u64) -> SolveResult {
    solve_with_budget(cnf, seed, None)
}

/// Like [`solve`], returning [`SolveStatus::Aborted`] once the number of
/// conflicts exceeds `conflict_budget`.
pub fn solve_with_budget(cnf: &Cnf, seed: u64, conflict_budget: Option<u64>) -> SolveResult {
    let mut solver = Solver::new(cnf.var_count as usize, seed);
    for clause in &cnf.clauses {
        solver.add_clause(clause);
    }
    let status = solver.run(conflict_budget);
    let model = match status {
        SolveStatus::Sat => {
            let model = solver.model();
            assert!(
                model.satisfies(&cnf.clauses),
                "internal model failed clause check"
            );
            Some(model)
        }
        _ => None,
    };
    SolveResult {
        status,
        model,
        stats: solver.stats,
    }
}

const TRUE: u8 = 1;
const FALSE: u8 = 0;
const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

/// Internal literal: variable index shifted left, low bit set for negation.
fn ilit(l: Lit) -> u32 {
    ((l.unsigned_abs() - 1) << 1) | (l < 0) as u32
}

/// Literal value under an assignment vector; free function so clause storage
/// and assignments can be borrowed independently.
fn lv(assign: &[u8], p: u32) -> u8 {
    let a = assign[(p >> 1) as usize];
    if a == UNDEF {
        UNDEF
    } else {
        a ^ (p & 1) as u8
    }
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: u32,
}

struct Solver {
    nvars: usize,
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<Watch>>,
    assign: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    stats: SolverStats,
    unsat: bool,
}

impl Solver {
    fn new(nvars: usize, seed: u64) -> Self {
        // Seeded jitter on initial activities varies the branching order
        // across seeds while staying deterministic for each.
        let mut rng = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        let activity: Vec<f64> = (0..nvars)
            .map(|_| (next() >> 11) as f64 / (1u64 << 53) as f64 * 1e-6)
            .collect();
        let mut heap = VarHeap::new(nvars);
        for v in 0..nvars as u32 {
            heap.insert(v, &activity);
        }
        Self {
            nvars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); nvars * 2],
            assign: vec![UNDEF; nvars],
            level: vec![0; nvars],
            reason: vec![NO_REASON; nvars],
            trail: Vec::with_capacity(nvars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            heap,
            phase: vec![false; nvars],
            seen: vec![false; nvars],
            stats: SolverStats::default(),
            unsat: false,
        }
    }

    fn lit_value(&self, p: u32) -> u8 {
        lv(&self.assign, p)
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn add_clause(&mut self, clause: &[Lit]) {
        if self.unsat {
            return;
        }
        let mut lits: Vec<u32> = clause.iter().map(|&l| ilit(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return; // tautology
        }
        match lits.len() {
            0 => self.unsat = true,
            1 => match self.lit_value(lits[0]) {
                FALSE => self.unsat = true,
                TRUE => {}
                _ => self.enqueue(lits[0], NO_REASON),
            },
            _ => {
                let cref = self.clauses.len() as u32;
                self.watches[lits[0] as usize].push(Watch {
                    cref,
                    blocker: lits[1],
                });
                self.watches[lits[1] as usize].push(Watch {
                    cref,
                    blocker: lits[0],
                });
                self.clauses.push(lits);
            }
        }
    }

    fn enqueue(&mut self, p: u32, reason: u32) {
        let v = (p >> 1) as usize;
        debug_assert_eq!(self.assign[v], UNDEF);
        self.assign[v] = (p & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.phase[v] = p & 1 == 0;
        self.trail.push(p);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut kept = 0;
            let mut i = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == TRUE {
                    ws[kept] = w;
                    kept += 1;
                    continue;
                }
                enum Act {
                    Satisfied(u32),
                    Moved,
                    Unit(u32),
                    Conflict,
                }
                let act = {
                    let assign = &self.assign;
                    let lits = &mut self.clauses[w.cref as usize];
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                    debug_assert_eq!(lits[1], false_lit);
                    let first = lits[0];
                    if first != w.blocker && lv(assign, first) == TRUE {
                        Act::Satisfied(first)
                    } else {
                        let mut moved = None;
                        for k in 2..lits.len() {
                            if lv(assign, lits[k]) != FALSE {
                                lits.swap(1, k);
                                moved = Some((lits[1], first));
                                break;
                            }
                        }
                        match moved {
                            Some((new_watch, first)) => {
                                self.watches[new_watch as usize].push(Watch {
                                    cref: w.cref,
                                    blocker: first,
                                });
                                Act::Moved
                            }
                            None if lv(assign, first) == FALSE => Act::Conflict,
                            None => Act::Unit(first),
                        }
                    }
                };
                match act {
                    Act::Moved => {}
                    Act::Satisfied(first) => {
                        ws[kept] = Watch {
                            cref: w.cref,
                            blocker: first,
                        };
                        kept += 1;
                    }
                    Act::Unit(first) => {
                        ws[kept] = Watch {
                            cref: w.cref,
                            blocker: first,
                        };
                        kept += 1;
                        self.enqueue(first, w.cref);
                    }
                    Act::Conflict => {
                        ws[kept] = w;
                        kept += 1;
                        while i < ws.len() {
                            ws[kept] = ws[i];
                            kept += 1;
                            i += 1;
                        }
                        ws.truncate(kept);
                        self.watches[false_lit as usize] = ws;
                        self.qhead = self.trail.len();
                        return Some(w.cref);
                    }
                }
            }
            ws.truncate(kept);
            self.watches[false_lit as usize] = ws;
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.update(v as u32, &self.activity);
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32) {
        let mut learnt: Vec<u32> = vec![0];
        let mut counter = 0usize;
        let mut expanding: Option<u32> = None;
        let mut index = self.trail.len();
        let mut scratch: Vec<u32> = Vec::new();
        loop {
            scratch.clear();
            scratch.extend_from_slice(&self.clauses[confl as usize]);
            // A reason clause implies its first literal; skip it.
            let start = usize::from(expanding.is_some());
            for &q in &scratch[start..] {
                let v = (q >> 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[(self.trail[index] >> 1) as usize] {
                    break;
                }
            }
            let p = self.trail[index];
            let v = (p >> 1) as usize;
            self.seen[v] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = p ^ 1;
                break;
            }
            confl = self.reason[v];
            debug_assert_ne!(confl, NO_REASON);
            expanding = Some(p);
        }
        for &q in &learnt[1..] {
            self.seen[(q >> 1) as usize] = false;
        }
        let backlevel = if learnt.len() == 1 {
            0
        } else {
            let mut mi = 1;
            for k in 2..learnt.len() {
                if self.level[(learnt[k] >> 1) as usize] > self.level[(learnt[mi] >> 1) as usize] {
                    mi = k;
                }
            }
            learnt.swap(1, mi);
            self.level[(learnt[1] >> 1) as usize]
        };
        (learnt, backlevel)
    }

    fn backtrack(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let bound = self.trail_lim[target as usize];
        for k in (bound..self.trail.len()).rev() {
            let v = (self.trail[k] >> 1) as usize;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            if !self.heap.contains(v as u32) {
                self.heap.insert(v as u32, &self.activity);
            }
        }
        self.trail.truncate(bound);
        self.trail_lim.truncate(target as usize);
        self.qhead = bound;
    }

    fn run(&mut self, budget: Option<u64>) -> SolveStatus {
        if self.unsat {
            return SolveStatus::Unsat;
        }
        if self.propagate().is_some() {
            return SolveStatus::Unsat;
        }
        let mut restart_seq = 0u64;
        let mut conflicts_here = 0u64;
        let mut restart_limit = 100 * luby(restart_seq);
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if let Some(b) = budget {
                    if self.stats.conflicts > b {
                        return SolveStatus::Aborted;
                    }
                }
                if self.decision_level() == 0 {
                    return SolveStatus::Unsat;
                }
                let (learnt, backlevel) = self.analyze(confl);
                self.backtrack(backlevel);
                let asserting = learnt[0];
                if learnt.len() == 1 {
                    self.enqueue(asserting, NO_REASON);
                } else {
                    let cref = self.clauses.len() as u32;
                    self.watches[learnt[0] as usize].push(Watch {
                        cref,
                        blocker: learnt[1],
                    });
                    self.watches[learnt[1] as usize].push(Watch {
                        cref,
                        blocker: learnt[0],
                    });
                    self.clauses.push(learnt);
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= 0.95;
            } else if conflicts_here >= restart_limit {
                conflicts_here = 0;
                restart_seq += 1;
                restart_limit = 100 * luby(restart_seq);
                self.backtrack(0);
            } else {
                let mut decision = None;
                while let Some(v) = self.heap.pop(&self.activity) {
                    if self.assign[v as usize] == UNDEF {
                        decision = Some(v);
                        break;
                    }
                }
                let Some(v) = decision else {
                    return SolveStatus::Sat;
                };
                self.stats.decisions += 1;
                self.trail_lim.push(self.trail.len());
                let lit = (v << 1) | !self.phase[v as usize] as u32;
                self.enqueue(lit, NO_REASON);
            }
        }
    }

    fn model(&self) -> Model {
        Model::from_values((0..self.nvars).map(|v| self.assign[v] == TRUE).collect())
    }
}

/// Luby restart sequence: 1 1 2 1 1 2 4 ...
fn luby(i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 2 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut i = i;
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

/// Binary max-heap over variables ordered by activity.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        Self {
            heap: Vec::with_capacity(n),
            pos: vec![-1; n],
        }
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] >= 0
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        debug_assert!(!self.contains(v));
        self.pos[v as usize] = self.heap.len() as i32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn update(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[i] as usize] <= act[self.heap[parent] as usize] {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let l = 2 * i + 1;
            let r = 2 * i + 2;
            let mut largest = i;
            if l < self.heap.len() && act[self.heap[l] as usize] > act[self.heap[largest] as usize]
            {
                largest = l;
            }
            if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[largest] as usize]
            {
                largest = r;
            }
            if largest == i {
                break;
            }
            self.swap(i, largest);
            i = largest;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i as i32;
        self.pos[self.heap[j] as usize] = j as i32;
    }
}
