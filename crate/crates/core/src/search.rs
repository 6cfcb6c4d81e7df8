//! Bounded backtracking search for decompositions into partial cycle factors.
//!
//! Factors are filled one at a time. Within a factor the next cycle always starts
//! at the least uncovered vertex and its second vertex is smaller than its last,
//! so each cycle is generated once. Interchangeable factors (same span) are
//! ordered by their first cycle. The last factor is read off from the leftover
//! edges directly.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graphs::{Cycle, MultiGraph, PartialFactor, Vertex};

/// One requested factor: its hole label and which host vertices it must cover.
#[derive(Debug, Clone)]
pub(crate) struct FactorSlot {
    pub hole: Option<u32>,
    pub span: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SearchOutcome {
    Found(Vec<PartialFactor>),
    /// The whole space was explored without a solution.
    Exhausted,
    BudgetExceeded,
}

#[derive(Debug, Clone)]
pub(crate) struct SearchProblem {
    vertices: Vec<Vertex>,
    multiplicity: Vec<u32>,
    slots: Vec<FactorSlot>,
    cycle_length: usize,
}

impl SearchProblem {
    /// Vertices are indexed in `host.vertices()` order.
    pub fn new(host: &MultiGraph, slots: Vec<FactorSlot>, cycle_length: usize) -> Self {
        let vertices: Vec<Vertex> = host.vertices().collect();
        let n = vertices.len();
        let index = |v: Vertex| (v.part * host.part_size() + v.slot) as usize;
        let mut multiplicity = vec![0; n * n];
        for ((a, b), m) in host.edges() {
            multiplicity[index(a) * n + index(b)] = m;
            multiplicity[index(b) * n + index(a)] = m;
        }
        SearchProblem { vertices, multiplicity, slots, cycle_length }
    }

    /// Span covering every vertex outside `hole` (a part index of `host`).
    pub fn span_without_part(host: &MultiGraph, hole: Option<u32>) -> Vec<bool> {
        host.vertices().map(|v| Some(v.part) != hole).collect()
    }

    /// Runs attempts with shuffled vertex orders until `budget` nodes are spent.
    /// Attempt zero uses the natural order; the sequence is fixed, so results are
    /// reproducible.
    pub fn solve(&self, budget: u64) -> SearchOutcome {
        if !self.counts_consistent() {
            return SearchOutcome::Exhausted;
        }
        let n = self.vertices.len();
        let first = (budget / 2).max(1);
        let mut spent = 0;
        let mut attempt = 0u64;
        loop {
            let share = if attempt == 0 { first } else { (budget / 16).max(1).min(budget - spent) };
            let order: Vec<usize> = if attempt == 0 {
                (0..n).collect()
            } else {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(attempt));
                order
            };
            let mut engine = Engine::new(self, &order, share);
            match engine.run() {
                Step::Found => return SearchOutcome::Found(engine.into_factors(self, &order)),
                Step::Fail => return SearchOutcome::Exhausted,
                Step::Abort => {}
            }
            spent += share;
            attempt += 1;
            if spent >= budget {
                return SearchOutcome::BudgetExceeded;
            }
        }
    }

    fn counts_consistent(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|v| {
            let degree: u32 = self.multiplicity[v * n..(v + 1) * n].iter().sum();
            let wanted = 2 * self.slots.iter().filter(|s| s.span[v]).count() as u32;
            degree == wanted
        }) && self.slots.iter().all(|s| s.span.iter().filter(|&&b| b).count() % self.cycle_length == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Found,
    Fail,
    Abort,
}

struct Engine {
    n: usize,
    k: usize,
    mult: Vec<u32>,
    spans: Vec<Vec<bool>>,
    /// Previous factor with an identical span, for ordering interchangeable factors.
    twin: Vec<Option<usize>>,
    first_key: Vec<(usize, usize)>,
    covered: Vec<bool>,
    factors: Vec<Vec<Vec<usize>>>,
    nodes: u64,
    budget: u64,
}

impl Engine {
    fn new(problem: &SearchProblem, order: &[usize], budget: u64) -> Self {
        let n = problem.vertices.len();
        let mut mult = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                mult[a * n + b] = problem.multiplicity[order[a] * n + order[b]];
            }
        }
        let spans: Vec<Vec<bool>> = problem.slots.iter().map(|s| (0..n).map(|i| s.span[order[i]]).collect()).collect();
        let twin = (0..spans.len()).map(|i| (0..i).rev().find(|&j| spans[j] == spans[i])).collect();
        Engine {
            n,
            k: problem.cycle_length,
            mult,
            twin,
            first_key: vec![(0, 0); spans.len()],
            spans,
            covered: vec![false; n],
            factors: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn run(&mut self) -> Step {
        if self.spans.is_empty() {
            return if self.mult.iter().all(|&m| m == 0) { Step::Found } else { Step::Fail };
        }
        self.factors.push(Vec::new());
        self.next_cycle(0)
    }

    fn into_factors(self, problem: &SearchProblem, order: &[usize]) -> Vec<PartialFactor> {
        self.factors
            .into_iter()
            .zip(&problem.slots)
            .map(|(cycles, slot)| {
                let cycles = cycles
                    .into_iter()
                    .map(|c| {
                        Cycle::new(c.into_iter().map(|i| problem.vertices[order[i]]).collect())
                            .expect("search emits simple cycles")
                    })
                    .collect();
                PartialFactor::new(slot.hole, self.k, cycles)
            })
            .collect()
    }

    fn edge(&self, a: usize, b: usize) -> u32 {
        self.mult[a * self.n + b]
    }

    fn take(&mut self, a: usize, b: usize) {
        self.mult[a * self.n + b] -= 1;
        self.mult[b * self.n + a] -= 1;
    }

    fn give(&mut self, a: usize, b: usize) {
        self.mult[a * self.n + b] += 1;
        self.mult[b * self.n + a] += 1;
    }

    /// Starts the next cycle of factor `fi`, or moves on when it is complete.
    fn next_cycle(&mut self, fi: usize) -> Step {
        if fi + 1 == self.spans.len() && self.factors[fi].is_empty() {
            return self.close_last(fi);
        }
        let start = (0..self.n).find(|&v| self.spans[fi][v] && !self.covered[v]);
        let Some(v) = start else {
            let saved = std::mem::replace(&mut self.covered, vec![false; self.n]);
            self.factors.push(Vec::new());
            let step = self.next_cycle(fi + 1);
            if step != Step::Found {
                self.factors.pop();
                self.covered = saved;
            }
            return step;
        };
        self.covered[v] = true;
        let mut path = vec![v];
        let step = self.extend(fi, &mut path);
        if step != Step::Found {
            self.covered[v] = false;
        }
        step
    }

    fn extend(&mut self, fi: usize, path: &mut Vec<usize>) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::Abort;
        }
        let last = *path.last().expect("path starts non-empty");
        let start = path[0];
        if path.len() == self.k {
            return self.close_cycle(fi, path);
        }
        let closing = path.len() + 1 == self.k;
        let mut outcome = Step::Fail;
        for w in start + 1..self.n {
            if self.covered[w] || !self.spans[fi][w] || self.edge(last, w) == 0 {
                continue;
            }
            if closing && (self.edge(w, start) == 0 || w < path[1]) {
                continue;
            }
            self.covered[w] = true;
            self.take(last, w);
            path.push(w);
            let step = self.extend(fi, path);
            if step == Step::Found {
                return step;
            }
            path.pop();
            self.give(last, w);
            self.covered[w] = false;
            if step == Step::Abort {
                return step;
            }
            outcome = Step::Fail;
        }
        outcome
    }

    fn close_cycle(&mut self, fi: usize, path: &mut [usize]) -> Step {
        let (start, last) = (path[0], path[self.k - 1]);
        if self.edge(last, start) == 0 {
            return Step::Fail;
        }
        let is_first = self.factors[fi].is_empty();
        if is_first {
            let key = (path[1], last);
            if let Some(prev) = self.twin[fi] {
                if key < self.first_key[prev] {
                    return Step::Fail;
                }
            }
            self.first_key[fi] = key;
        }
        self.take(last, start);
        if !self.uncovered_have_room(fi) {
            self.give(last, start);
            return Step::Fail;
        }
        self.factors[fi].push(path.to_vec());
        let step = self.next_cycle(fi);
        if step != Step::Found {
            self.factors[fi].pop();
            self.give(last, start);
        }
        step
    }

    /// Every vertex still to be covered in factor `fi` needs two usable neighbours.
    fn uncovered_have_room(&self, fi: usize) -> bool {
        let span = &self.spans[fi];
        (0..self.n).filter(|&x| span[x] && !self.covered[x]).all(|x| {
            let row = &self.mult[x * self.n..(x + 1) * self.n];
            (0..self.n).filter(|&w| row[w] > 0 && span[w] && !self.covered[w]).take(2).count() == 2
        })
    }

    /// The last factor is whatever is left; accept it if it is a valid factor.
    fn close_last(&mut self, fi: usize) -> Step {
        self.nodes += 1;
        let span = &self.spans[fi];
        let mut neighbours = vec![Vec::with_capacity(2); self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                let m = self.edge(a, b);
                if m == 0 {
                    continue;
                }
                if m > 1 || !span[a] || !span[b] {
                    return Step::Fail;
                }
                neighbours[a].push(b);
            }
        }
        if (0..self.n).any(|v| neighbours[v].len() != if span[v] { 2 } else { 0 }) {
            return Step::Fail;
        }
        let mut seen = vec![false; self.n];
        let mut cycles = Vec::new();
        for s in 0..self.n {
            if !span[s] || seen[s] {
                continue;
            }
            let mut cycle = vec![s];
            seen[s] = true;
            let (mut prev, mut cur) = (s, neighbours[s][0]);
            while cur != s {
                seen[cur] = true;
                cycle.push(cur);
                let next = if neighbours[cur][0] == prev { neighbours[cur][1] } else { neighbours[cur][0] };
                prev = cur;
                cur = next;
            }
            if cycle.len() != self.k {
                return Step::Fail;
            }
            cycles.push(cycle);
        }
        if let Some(prev) = self.twin[fi] {
            let first = &cycles[0];
            let key = (first[1].min(first[self.k - 1]), first[1].max(first[self.k - 1]));
            if key < self.first_key[prev] {
                return Step::Fail;
            }
        }
        self.factors[fi] = cycles;
        Step::Found
    }
}
