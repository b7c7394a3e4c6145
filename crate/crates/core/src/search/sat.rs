//! A small CDCL solver: two watched literals, first-UIP learning with local
//! minimisation, VSIDS with phase saving, Luby restarts, and assumptions.
//!
//! Symmetry is broken lazily: whenever propagation reaches a fixpoint the
//! assigned prefix of the table variables is compared with its image under
//! each permutation, and a lex-leader violation becomes a conflict clause.
//!
//! [`solve`] returns the lexicographically least assignment of the table
//! variables (false before true). It first finds any model, then fixes the
//! table bits one at a time, asking the solver whether each can be false.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::logic::{Clause, Lit};

const UNDEF: u8 = 2;

/// The immutable part of a search instance, shared between workers.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub num_vars: usize,
    /// Variables `0..num_table_vars` are table bits in encoding order; the
    /// rest are auxiliary.
    pub num_table_vars: usize,
    pub clauses: Vec<Clause>,
    /// For each non-identity permutation, `image[i]` is the table variable
    /// whose value the permuted model carries at position `i`.
    pub symmetries: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub pruned: u64,
}

impl SolverStats {
    pub fn add(&mut self, other: &SolverStats) {
        self.decisions += other.decisions;
        self.propagations += other.propagations;
        self.conflicts += other.conflicts;
        self.pruned += other.pruned;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    Sat(Vec<bool>),
    Unsat,
    BudgetExceeded,
    Cancelled,
}

/// Stops a run early once a lower-numbered job has found a model.
pub(crate) struct Cancel<'a> {
    pub best: &'a AtomicUsize,
    pub job: usize,
}

impl Cancel<'_> {
    fn cancelled(&self) -> bool {
        self.best.load(Ordering::Relaxed) < self.job
    }
}

/// Max-heap of variables by activity; ties go to the lower index.
struct VarOrder {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
    activity: Vec<f64>,
    inc: f64,
}

impl VarOrder {
    fn new(n: usize) -> Self {
        VarOrder {
            heap: (0..n).collect(),
            pos: (0..n).map(Some).collect(),
            activity: vec![0.0; n],
            inc: 1.0,
        }
    }

    fn before(&self, a: usize, b: usize) -> bool {
        let (x, y) = (self.activity[a], self.activity[b]);
        x > y || (x == y && a < b)
    }

    fn up(&mut self, mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.before(v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && self.before(self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !self.before(self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize) {
        if self.pos[v].is_none() {
            self.heap.push(v);
            self.up(self.heap.len() - 1);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.down(0);
        }
        Some(top)
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
        if let Some(i) = self.pos[v] {
            self.up(i);
        }
    }

    fn decay(&mut self) {
        self.inc /= 0.95;
    }
}

fn luby(mut i: u64) -> u64 {
    // 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    let mut size = 1u64;
    let mut seq = 0;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

enum Stop {
    Budget,
    Cancelled,
}

struct Solver<'p> {
    problem: &'p Problem,
    clauses: Vec<Clause>,
    watches: Vec<Vec<usize>>,
    vals: Vec<u8>,
    phase: Vec<bool>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    order: VarOrder,
    restarts: u64,
    stats: SolverStats,
    ok: bool,
}

fn lit_val(vals: &[u8], l: Lit) -> u8 {
    match vals[l.var()] {
        UNDEF => UNDEF,
        v => (v == l.is_positive() as u8) as u8,
    }
}

impl<'p> Solver<'p> {
    fn new(problem: &'p Problem) -> Self {
        let n = problem.num_vars;
        let mut s = Solver {
            problem,
            clauses: Vec::with_capacity(problem.clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            vals: vec![UNDEF; n],
            phase: vec![false; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            order: VarOrder::new(n),
            restarts: 0,
            stats: SolverStats::default(),
            ok: true,
        };
        for c in &problem.clauses {
            if !s.add_root_clause(c) {
                s.ok = false;
                break;
            }
        }
        s
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.vals[v] = l.is_positive() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
        self.stats.propagations += 1;
    }

    fn add_root_clause(&mut self, c: &[Lit]) -> bool {
        match c {
            [] => false,
            [l] => match lit_val(&self.vals, *l) {
                1 => true,
                0 => false,
                _ => {
                    self.enqueue(*l, None);
                    true
                }
            },
            _ => {
                self.attach(c.to_vec());
                true
            }
        }
    }

    fn attach(&mut self, c: Clause) -> usize {
        let ci = self.clauses.len();
        self.watches[c[0].code()].push(ci);
        self.watches[c[1].code()].push(ci);
        self.clauses.push(c);
        ci
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let false_lit = self.trail[self.qhead].negate();
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                if lit_val(&self.vals, c[0]) == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                if let Some(k) = (2..c.len()).find(|&k| lit_val(&self.vals, c[k]) != 0) {
                    c.swap(1, k);
                    self.watches[c[1].code()].push(ci);
                    continue;
                }
                ws[j] = ci;
                j += 1;
                let first = c[0];
                if lit_val(&self.vals, first) == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.trail_lim[level as usize];
        for k in (keep..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.phase[v] = l.is_positive();
            self.vals[v] = UNDEF;
            self.reason[v] = None;
            self.order.insert(v);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    /// First-UIP analysis of a clause that is false under the trail and has
    /// at least one literal at the current level.
    fn analyze(&mut self, conflict: usize) -> (Clause, u32) {
        let current = self.decision_level();
        let mut learnt: Clause = vec![Lit::new(0, true)];
        let mut counter = 0;
        let mut clause = conflict;
        let mut skip_first = false;
        let mut idx = self.trail.len();
        let p = loop {
            let start = skip_first as usize;
            for k in start..self.clauses[clause].len() {
                let q = self.clauses[clause][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.order.bump(v);
                    if self.level[v] == current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var()] = false;
            counter -= 1;
            if counter == 0 {
                break p;
            }
            clause = self.reason[p.var()].expect("implied literal has a reason");
            skip_first = true;
        };
        learnt[0] = p.negate();
        // drop literals implied by the rest of the clause
        let all = learnt.clone();
        learnt.retain(|&q| {
            q == all[0]
                || !self.reason[q.var()].is_some_and(|r| {
                    self.clauses[r][1..]
                        .iter()
                        .all(|l| self.seen[l.var()] || self.level[l.var()] == 0)
                })
        });
        for l in &all[1..] {
            self.seen[l.var()] = false;
        }
        self.order.decay();
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[max_i].var()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    /// Learns from a conflicting clause and backjumps. Returns false when the
    /// conflict is at level 0.
    fn resolve_conflict(&mut self, conflict: usize) -> bool {
        self.stats.conflicts += 1;
        let max_level = self.clauses[conflict]
            .iter()
            .map(|l| self.level[l.var()])
            .max()
            .unwrap_or(0);
        if max_level == 0 {
            return false;
        }
        self.cancel_until(max_level);
        let (learnt, bt) = self.analyze(conflict);
        self.cancel_until(bt);
        if learnt.len() == 1 {
            self.enqueue(learnt[0], None);
        } else {
            let l0 = learnt[0];
            let ci = self.attach(learnt);
            self.enqueue(l0, Some(ci));
        }
        true
    }

    /// A clause falsified by the current assignment if the assigned prefix
    /// of the table bits violates the lex-leader condition for some
    /// permutation.
    fn symmetry_violation(&self) -> Option<Clause> {
        let vals = &self.vals;
        for image in &self.problem.symmetries {
            for (i, &m) in image.iter().enumerate() {
                let (a, b) = (vals[i], vals[m as usize]);
                if a == UNDEF || b == UNDEF || a < b {
                    break;
                }
                if a > b {
                    let mut vars: Vec<usize> = image[..=i]
                        .iter()
                        .enumerate()
                        .filter(|&(j, &m)| j != m as usize)
                        .flat_map(|(j, &m)| [j, m as usize])
                        .collect();
                    vars.sort_unstable();
                    vars.dedup();
                    return Some(
                        vars.into_iter()
                            .map(|v| Lit::new(v, vals[v] == 0))
                            .collect(),
                    );
                }
            }
        }
        None
    }

    fn add_violation(&mut self, mut c: Clause) -> usize {
        // watch the two literals assigned last
        c.sort_by_key(|l| std::cmp::Reverse(self.level[l.var()]));
        self.attach(c)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop() {
            if self.vals[v] == UNDEF {
                return Some(Lit::new(v, self.phase[v]));
            }
        }
        None
    }

    /// Searches for a model extending `assumptions`. `Ok(None)` means there is
    /// none; `self.ok` turns false when there is none at all.
    fn search(
        &mut self,
        assumptions: &[Lit],
        budget: u64,
        cancel: Option<&Cancel>,
    ) -> Result<Option<Vec<bool>>, Stop> {
        if !self.ok {
            return Ok(None);
        }
        let symmetric = !self.problem.symmetries.is_empty();
        let mut steps = 0u32;
        let mut conflicts_left = luby(self.restarts) * 64;
        loop {
            if let Some(c) = self.propagate() {
                if !self.resolve_conflict(c) {
                    self.ok = false;
                    return Ok(None);
                }
                conflicts_left = conflicts_left.saturating_sub(1);
                continue;
            }
            if symmetric {
                if let Some(c) = self.symmetry_violation() {
                    self.stats.pruned += 1;
                    let ci = self.add_violation(c);
                    if !self.resolve_conflict(ci) {
                        self.ok = false;
                        return Ok(None);
                    }
                    conflicts_left = conflicts_left.saturating_sub(1);
                    continue;
                }
            }
            if self.stats.propagations > budget {
                return Err(Stop::Budget);
            }
            steps = steps.wrapping_add(1);
            if steps.is_multiple_of(256) && cancel.is_some_and(Cancel::cancelled) {
                return Err(Stop::Cancelled);
            }
            if conflicts_left == 0 {
                self.restarts += 1;
                conflicts_left = luby(self.restarts) * 64;
                self.cancel_until(0);
                continue;
            }
            let level = self.decision_level() as usize;
            let next = if level < assumptions.len() {
                let a = assumptions[level];
                match lit_val(&self.vals, a) {
                    1 => {
                        self.trail_lim.push(self.trail.len());
                        continue;
                    }
                    0 => {
                        self.cancel_until(0);
                        return Ok(None);
                    }
                    _ => a,
                }
            } else {
                match self.pick_branch() {
                    None => {
                        let model = self.vals.iter().map(|&v| v == 1).collect();
                        self.cancel_until(0);
                        return Ok(Some(model));
                    }
                    Some(l) => {
                        self.stats.decisions += 1;
                        l
                    }
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }
}

/// Finds the assignment of the table variables that is lexicographically
/// least (false before true) among the models extending `assumptions`.
pub(crate) fn solve(
    problem: &Problem,
    assumptions: &[Lit],
    budget: u64,
    cancel: Option<&Cancel>,
) -> (Outcome, SolverStats) {
    let mut s = Solver::new(problem);
    let stop = |s: &Solver, e: Stop| {
        let out = match e {
            Stop::Budget => Outcome::BudgetExceeded,
            Stop::Cancelled => Outcome::Cancelled,
        };
        (out, s.stats)
    };
    let mut model = match s.search(assumptions, budget, cancel) {
        Ok(Some(m)) => m,
        Ok(None) => return (Outcome::Unsat, s.stats),
        Err(e) => return stop(&s, e),
    };
    let mut fixed = assumptions.to_vec();
    for v in 0..problem.num_table_vars {
        if model[v] {
            fixed.push(Lit::new(v, false));
            match s.search(&fixed, budget, cancel) {
                Ok(Some(m)) => model = m,
                Ok(None) => {
                    fixed.pop();
                    fixed.push(Lit::new(v, true));
                }
                Err(e) => return stop(&s, e),
            }
        } else {
            fixed.push(Lit::new(v, false));
        }
    }
    (Outcome::Sat(model), s.stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i32) -> Lit {
        Lit::new(v.unsigned_abs() as usize - 1, v > 0)
    }

    fn problem(n: usize, clauses: &[&[i32]]) -> Problem {
        Problem {
            num_vars: n,
            num_table_vars: n,
            clauses: clauses
                .iter()
                .map(|c| c.iter().map(|&v| lit(v)).collect())
                .collect(),
            symmetries: vec![],
        }
    }

    fn brute_least(p: &Problem) -> Option<Vec<bool>> {
        (0u32..1 << p.num_vars)
            .map(|bits| {
                (0..p.num_vars)
                    .map(|i| bits >> (p.num_vars - 1 - i) & 1 == 1)
                    .collect::<Vec<_>>()
            })
            .find(|a| {
                p.clauses
                    .iter()
                    .all(|c| c.iter().any(|l| a[l.var()] == l.is_positive()))
            })
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn finds_least_model() {
        let p = problem(3, &[&[1, 2], &[-1, 3], &[-2, -3]]);
        let (out, _) = solve(&p, &[], u64::MAX, None);
        assert_eq!(out, Outcome::Sat(brute_least(&p).unwrap()));
    }

    #[test]
    fn detects_unsat() {
        let p = problem(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        assert_eq!(solve(&p, &[], u64::MAX, None).0, Outcome::Unsat);
        assert_eq!(
            solve(&problem(1, &[&[]]), &[], u64::MAX, None).0,
            Outcome::Unsat
        );
    }

    #[test]
    fn assumptions_restrict_models() {
        let p = problem(3, &[&[1, 2, 3]]);
        let (out, _) = solve(&p, &[lit(-3)], u64::MAX, None);
        assert_eq!(out, Outcome::Sat(vec![false, true, false]));
        let (out, _) = solve(&p, &[lit(-1), lit(-2), lit(-3)], u64::MAX, None);
        assert_eq!(out, Outcome::Unsat);
    }

    #[test]
    fn agrees_with_brute_force_on_pseudo_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let n = rng.gen_range(1..=10);
            let m = rng.gen_range(0..=5 * n);
            let clauses: Vec<Vec<i32>> = (0..m)
                .map(|_| {
                    let k = rng.gen_range(1..=3);
                    let mut c: Vec<i32> = (0..k)
                        .map(|_| {
                            let v = rng.gen_range(1..=n as i32);
                            if rng.gen_bool(0.5) {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect();
                    c.sort_by_key(|v| (v.abs(), *v));
                    c.dedup();
                    c
                })
                .filter(|c| !c.windows(2).any(|w| w[0] == -w[1]))
                .collect();
            let refs: Vec<&[i32]> = clauses.iter().map(Vec::as_slice).collect();
            let p = problem(n, &refs);
            let expected = brute_least(&p);
            match solve(&p, &[], u64::MAX, None).0 {
                Outcome::Sat(a) => assert_eq!(Some(a), expected),
                Outcome::Unsat => assert_eq!(expected, None),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p = problem(20, &[]);
        assert_eq!(solve(&p, &[], 5, None).0, Outcome::BudgetExceeded);
    }
}
