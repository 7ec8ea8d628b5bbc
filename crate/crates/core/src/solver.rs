//! A small complete CDCL satisfiability solver.
//!
//! Two-literal watching, first-UIP conflict analysis, activity-driven
//! decisions with phase saving, and Luby restarts. Everything is
//! deterministic: ties in the decision order break toward the lowest
//! variable index and no randomness is involved, so identical inputs yield
//! identical models. The decision budget makes the search interruptible
//! without ever misreporting: an exhausted budget is surfaced as
//! [`SolveOutcome::Budget`], never as unsatisfiable.

const UNDEF: u8 = 0;
const TRUE: u8 = 1;
const FALSE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn positive(var: Var) -> Lit {
        Lit::new(var, true)
    }

    #[inline]
    pub fn negative(var: Var) -> Lit {
        Lit::new(var, false)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat,
    Unsat,
    /// The decision budget ran out before the search finished.
    Budget { decisions: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
}

#[inline]
fn lit_value_in(assign: &[u8], l: Lit) -> u8 {
    match assign[l.var().idx()] {
        UNDEF => UNDEF,
        v => {
            if (v == TRUE) == l.is_positive() {
                TRUE
            } else {
                FALSE
            }
        }
    }
}

/// Max-heap over variable activities with lowest-index tie break.
#[derive(Debug, Default)]
struct VarOrder {
    heap: Vec<Var>,
    position: Vec<Option<u32>>,
}

impl VarOrder {
    fn grow(&mut self) {
        self.position.push(None);
    }

    fn contains(&self, v: Var) -> bool {
        self.position[v.idx()].is_some()
    }

    fn better(activity: &[f64], a: Var, b: Var) -> bool {
        let (aa, ab) = (activity[a.idx()], activity[b.idx()]);
        aa > ab || (aa == ab && a.0 < b.0)
    }

    fn sift_up(&mut self, activity: &[f64], mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::better(activity, self.heap[i], self.heap[parent]) {
                self.heap.swap(i, parent);
                self.position[self.heap[i].idx()] = Some(i as u32);
                self.position[self.heap[parent].idx()] = Some(parent as u32);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, activity: &[f64], mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::better(activity, self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && Self::better(activity, self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.heap.swap(i, best);
            self.position[self.heap[i].idx()] = Some(i as u32);
            self.position[self.heap[best].idx()] = Some(best as u32);
            i = best;
        }
    }

    fn insert(&mut self, activity: &[f64], v: Var) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.position[v.idx()] = Some(i as u32);
        self.sift_up(activity, i);
    }

    fn pop_max(&mut self, activity: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.position[top.idx()] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last.idx()] = Some(0);
            self.sift_down(activity, 0);
        }
        Some(top)
    }

    fn bumped(&mut self, activity: &[f64], v: Var) {
        if let Some(i) = self.position[v.idx()] {
            self.sift_up(activity, i as usize);
        }
    }
}

#[derive(Debug, Default)]
pub struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    assign: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    order: VarOrder,
    phase: Vec<bool>,
    seen: Vec<bool>,
    decisions: u64,
    unsat: bool,
}

impl Solver {
    pub fn new() -> Self {
        Solver { var_inc: 1.0, ..Default::default() }
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assign.len() as u32);
        self.assign.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow();
        self.order.insert(&self.activity, v);
        v
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn decisions(&self) -> u64 {
        self.decisions
    }

    /// Model value of a variable; meaningful only after `solve` returned Sat.
    pub fn value(&self, v: Var) -> bool {
        self.assign[v.idx()] == TRUE
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        lit_value_in(&self.assign, l)
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Add a clause. Returns false once the instance is known unsatisfiable.
    /// Clauses must all be added before `solve` is called.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        debug_assert_eq!(self.decision_level(), 0);
        if self.unsat {
            return false;
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable_by_key(|l| l.0);
        c.dedup();
        // tautology or already satisfied at root level
        if c.windows(2).any(|w| w[0] == !w[1]) || c.iter().any(|&l| self.lit_value(l) == TRUE) {
            return true;
        }
        c.retain(|&l| self.lit_value(l) != FALSE);
        match c.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                if !self.enqueue(c[0], None) {
                    self.unsat = true;
                }
                !self.unsat
            }
            _ => {
                let cref = self.clauses.len() as u32;
                self.watches[c[0].idx()].push(Watch { cref, blocker: c[1] });
                self.watches[c[1].idx()].push(Watch { cref, blocker: c[0] });
                self.clauses.push(Clause { lits: c });
                true
            }
        }
    }

    fn enqueue(&mut self, p: Lit, reason: Option<u32>) -> bool {
        match self.lit_value(p) {
            TRUE => true,
            FALSE => false,
            _ => {
                let v = p.var();
                self.assign[v.idx()] = if p.is_positive() { TRUE } else { FALSE };
                self.level[v.idx()] = self.decision_level();
                self.reason[v.idx()] = reason;
                self.phase[v.idx()] = p.is_positive();
                self.trail.push(p);
                true
            }
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut j = 0;
            let mut i = 0;
            let mut conflict = None;
            'watches: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let assign = &self.assign;
                let c = &mut self.clauses[w.cref as usize];
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                debug_assert_eq!(c.lits[1], false_lit);
                let first = c.lits[0];
                if first != w.blocker && lit_value_in(assign, first) == TRUE {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    if lit_value_in(assign, c.lits[k]) != FALSE {
                        c.lits.swap(1, k);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    let new_watch = self.clauses[w.cref as usize].lits[1];
                    self.watches[new_watch.idx()].push(Watch { cref: w.cref, blocker: first });
                    continue 'watches;
                }
                // unit or conflicting
                ws[j] = w;
                j += 1;
                if self.lit_value(first) == FALSE {
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    conflict = Some(w.cref);
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: Var) {
        self.activity[v.idx()] += self.var_inc;
        if self.activity[v.idx()] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(&self.activity, v);
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the level to backtrack to.
    fn analyze(&mut self, conflict: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit(0)]; // slot 0 filled at the end
        let mut counter = 0usize;
        let mut p: Option<Lit> = None;
        let mut cref = conflict;
        let mut idx = self.trail.len();

        loop {
            let start = usize::from(p.is_some());
            let lits: Vec<Lit> = self.clauses[cref as usize].lits[start..].to_vec();
            for q in lits {
                let v = q.var();
                if !self.seen[v.idx()] && self.level[v.idx()] > 0 {
                    self.seen[v.idx()] = true;
                    self.bump_var(v);
                    if self.level[v.idx()] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().idx()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var().idx()] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = !pl;
                break;
            }
            cref = self.reason[pl.var().idx()].expect("non-decision literal has a reason");
            p = Some(pl);
        }

        for l in &learnt[1..] {
            self.seen[l.var().idx()] = false;
        }

        let backtrack = if learnt.len() == 1 {
            0
        } else {
            // move the highest-level remaining literal to the second slot
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().idx()] > self.level[learnt[max_i].var().idx()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().idx()]
        };
        (learnt, backtrack)
    }

    fn cancel_until(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let keep = self.trail_lim[target as usize];
        for i in (keep..self.trail.len()).rev() {
            let v = self.trail[i].var();
            self.assign[v.idx()] = UNDEF;
            self.reason[v.idx()] = None;
            self.order.insert(&self.activity, v);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(target as usize);
        self.qhead = keep;
    }

    fn learn(&mut self, learnt: Vec<Lit>) {
        let asserting = learnt[0];
        if learnt.len() == 1 {
            let ok = self.enqueue(asserting, None);
            debug_assert!(ok);
        } else {
            let cref = self.clauses.len() as u32;
            self.watches[learnt[0].idx()].push(Watch { cref, blocker: learnt[1] });
            self.watches[learnt[1].idx()].push(Watch { cref, blocker: learnt[0] });
            self.clauses.push(Clause { lits: learnt });
            let ok = self.enqueue(asserting, Some(cref));
            debug_assert!(ok);
        }
    }

    fn next_decision(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop_max(&self.activity) {
            if self.assign[v.idx()] == UNDEF {
                return Some(Lit::new(v, self.phase[v.idx()]));
            }
        }
        None
    }

    fn luby(mut i: u64) -> u64 {
        // O(log i) per query; i is 1-based
        let mut size = 1u64;
        let mut seq = 0u32;
        while size < i + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != i {
            size = (size - 1) / 2;
            seq -= 1;
            i %= size;
        }
        1u64 << seq
    }

    /// Run the search with a cap on the number of branching decisions.
    pub fn solve(&mut self, decision_budget: u64) -> SolveOutcome {
        if self.unsat {
            return SolveOutcome::Unsat;
        }
        self.decisions = 0;
        let mut restarts = 0u64;
        let mut conflicts_left = Self::luby(1) * 64;

        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return SolveOutcome::Unsat;
                }
                let (learnt, backtrack) = self.analyze(conflict);
                self.cancel_until(backtrack);
                self.learn(learnt);
                self.var_inc /= 0.95;
                conflicts_left = conflicts_left.saturating_sub(1);
            } else {
                if conflicts_left == 0 {
                    restarts += 1;
                    conflicts_left = Self::luby(restarts + 1) * 64;
                    self.cancel_until(0);
                }
                match self.next_decision() {
                    None => return SolveOutcome::Sat,
                    Some(p) => {
                        if self.decisions >= decision_budget {
                            return SolveOutcome::Budget { decisions: self.decisions };
                        }
                        self.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        let ok = self.enqueue(p, None);
                        debug_assert!(ok);
                    }
                }
            }
        }
    }
}
