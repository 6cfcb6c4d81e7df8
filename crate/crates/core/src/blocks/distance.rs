//! Solving for families of distance vectors.
//!
//! A family threads distances around a cycle of `length` parts of size `modulus`.
//! Every position must receive each allowed distance exactly once across the
//! family, and every vector's sum `σ` must satisfy `gcd(σ, modulus) = sum_gcd`,
//! which fixes the length of the traced cycles at `length · modulus / sum_gcd`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct DistanceSystem {
    pub length: usize,
    pub modulus: u32,
    /// Distance 0 is available (the blocks are full `K_{n,n}`), as in `C_m ⊗ K̄_n`.
    pub allow_zero: bool,
    pub sum_gcd: u32,
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl DistanceSystem {
    fn values(&self) -> Vec<u32> {
        let start = if self.allow_zero { 0 } else { 1 };
        (start..self.modulus).collect()
    }

    fn sum_ok(&self, sum: u64) -> bool {
        let n = self.modulus as u64;
        gcd(sum % n, n) == self.sum_gcd as u64
    }

    /// A parity count that rules out some systems outright: the total of all
    /// sums is fixed, and for even moduli so is the parity of each sum.
    fn parity_blocked(&self) -> bool {
        let n = self.modulus as u64;
        if n % 2 == 1 {
            return false;
        }
        let g = self.sum_gcd as u64;
        if g % 2 == 0 || (n / g) % 2 == 1 {
            return false;
        }
        let values = self.values();
        let per_sum_parity = values.len() as u64 % 2;
        let total: u64 = values.iter().map(|&v| v as u64).sum::<u64>() * self.length as u64;
        per_sum_parity != total % 2
    }

    pub fn solve(&self) -> Option<Vec<Vec<u32>>> {
        if self.length < 2 || self.modulus == 0 || self.parity_blocked() {
            return None;
        }
        if let Some(family) = self.closed_form() {
            return Some(family);
        }
        self.matching_search(4000).or_else(|| self.backtrack(2_000_000))
    }

    fn check(&self, family: &[Vec<u32>]) -> bool {
        let values = self.values();
        if family.len() != values.len() {
            return false;
        }
        for pos in 0..self.length {
            let mut column: Vec<u32> = family.iter().map(|v| v[pos]).collect();
            column.sort_unstable();
            if column != values {
                return false;
            }
        }
        family.iter().all(|v| self.sum_ok(v.iter().map(|&d| d as u64).sum()))
    }

    /// Alternating `(a, −a, …)` prefixes closed by `c − a` or `(a, a, c − 2a)`.
    fn closed_form(&self) -> Option<Vec<Vec<u32>>> {
        let n = self.modulus;
        let m = self.length;
        let neg = |a: u32| (n - a % n) % n;
        let targets: Vec<u32> = (0..n).filter(|&c| self.sum_ok(c as u64)).collect();
        for &c in &targets {
            let family: Vec<Vec<u32>> = if m % 2 == 0 {
                self.values()
                    .into_iter()
                    .map(|a| {
                        let mut v: Vec<u32> = (0..m - 1).map(|j| if j % 2 == 0 { a } else { neg(a) }).collect();
                        v.push((c + n - a) % n);
                        v
                    })
                    .collect()
            } else if n % 2 == 1 && m >= 3 {
                self.values()
                    .into_iter()
                    .map(|a| {
                        let mut v: Vec<u32> = (0..m - 3).map(|j| if j % 2 == 0 { a } else { neg(a) }).collect();
                        v.extend([a, a, (c + 2 * n - 2 * a % n) % n]);
                        v
                    })
                    .collect()
            } else {
                continue;
            };
            if self.check(&family) {
                return Some(family);
            }
        }
        None
    }

    /// Fixes the first `length − 1` columns and solves the last by bipartite matching.
    fn matching_search(&self, tries: u64) -> Option<Vec<Vec<u32>>> {
        let values = self.values();
        let n = self.modulus as u64;
        let count = values.len();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for attempt in 0..tries {
            let mut columns: Vec<Vec<u32>> = Vec::with_capacity(self.length);
            for pos in 0..self.length - 1 {
                let mut column = values.clone();
                if attempt > 0 && pos > 0 {
                    column.shuffle(&mut rng);
                } else if pos % 2 == 1 {
                    column = column.iter().map(|&a| ((n - a as u64) % n) as u32).collect();
                }
                columns.push(column);
            }
            let partial: Vec<u64> = (0..count).map(|i| columns.iter().map(|c| c[i] as u64).sum()).collect();
            let allowed: Vec<Vec<usize>> = (0..count)
                .map(|i| (0..count).filter(|&j| self.sum_ok(partial[i] + values[j] as u64)).collect())
                .collect();
            if let Some(assign) = bipartite_matching(&allowed, count) {
                let family = (0..count)
                    .map(|i| {
                        let mut v: Vec<u32> = columns.iter().map(|c| c[i]).collect();
                        v.push(values[assign[i]]);
                        v
                    })
                    .collect::<Vec<_>>();
                debug_assert!(self.check(&family));
                return Some(family);
            }
        }
        None
    }
}

impl DistanceSystem {
    /// Depth-first fill, row by row, with the first column fixed to the values in
    /// order; gives up after `budget` nodes.
    fn backtrack(&self, budget: u64) -> Option<Vec<Vec<u32>>> {
        let values = self.values();
        let count = values.len();
        let n = self.modulus as usize;
        let mut used = vec![vec![false; n]; self.length];
        let mut family: Vec<Vec<u32>> = values.iter().map(|&a| vec![a]).collect();
        let mut nodes = 0u64;
        struct State<'a> {
            sys: &'a DistanceSystem,
            values: &'a [u32],
            used: &'a mut [Vec<bool>],
            family: &'a mut [Vec<u32>],
            nodes: &'a mut u64,
            budget: u64,
        }
        fn fill(st: &mut State<'_>, row: usize, pos: usize) -> Option<bool> {
            *st.nodes += 1;
            if *st.nodes > st.budget {
                return None;
            }
            if row == st.family.len() {
                return Some(true);
            }
            if pos == st.sys.length {
                return fill(st, row + 1, 1);
            }
            let last = pos + 1 == st.sys.length;
            for &v in st.values {
                if st.used[pos][v as usize] {
                    continue;
                }
                if last {
                    let sum: u64 = st.family[row].iter().map(|&d| d as u64).sum::<u64>() + v as u64;
                    if !st.sys.sum_ok(sum) {
                        continue;
                    }
                }
                st.used[pos][v as usize] = true;
                st.family[row].push(v);
                match fill(st, row, pos + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                st.family[row].pop();
                st.used[pos][v as usize] = false;
            }
            Some(false)
        }
        if count == 0 {
            return None;
        }
        let mut st =
            State { sys: self, values: &values, used: &mut used, family: &mut family, nodes: &mut nodes, budget };
        match fill(&mut st, 0, 1) {
            Some(true) => {
                debug_assert!(self.check(&family));
                Some(family)
            }
            _ => None,
        }
    }
}

/// Kuhn's augmenting-path matching; `allowed[i]` lists right vertices for left `i`.
pub(crate) fn bipartite_matching(allowed: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    fn augment(i: usize, allowed: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &allowed[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(owner[j].expect("checked"), allowed, seen, owner) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for i in 0..allowed.len() {
        let mut seen = vec![false; right];
        if !augment(i, allowed, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut assign = vec![0; allowed.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            assign[*i] = j;
        }
    }
    Some(assign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(length: usize, modulus: u32, allow_zero: bool, sum_gcd: u32) -> DistanceSystem {
        DistanceSystem { length, modulus, allow_zero, sum_gcd }
    }

    #[test]
    fn closed_forms_match_small_examples() {
        assert_eq!(system(4, 2, true, 1).solve().unwrap(), vec![vec![0, 0, 0, 1], vec![1, 1, 1, 0]]);
        assert_eq!(system(3, 3, false, 3).solve().unwrap(), vec![vec![1, 1, 1], vec![2, 2, 2]]);
        assert_eq!(system(4, 3, false, 3).solve().unwrap(), vec![vec![1, 2, 1, 2], vec![2, 1, 2, 1]]);
    }

    #[test]
    fn parity_obstruction_detected() {
        // Hamilton families on C_m × K_n with n even need an odd number of odd sums.
        assert!(system(4, 4, false, 1).parity_blocked());
        assert!(system(3, 4, false, 1).parity_blocked());
        assert!(!system(3, 2, false, 1).parity_blocked());
        assert!(system(3, 2, true, 1).parity_blocked());
    }

    #[test]
    fn matching_search_finds_odd_cycle_hamilton() {
        let family = system(3, 6, false, 1).solve().unwrap();
        assert_eq!(family.len(), 5);
        assert!(system(3, 6, false, 1).check(&family));
    }

    #[test]
    fn solutions_are_checked() {
        for (m, n, zero, g) in [(5, 3, false, 3), (6, 5, false, 1), (5, 4, true, 1), (3, 5, true, 1), (4, 6, false, 2)]
        {
            let s = system(m, n, zero, g);
            if let Some(family) = s.solve() {
                assert!(s.check(&family), "{s:?}");
            }
        }
    }

    #[test]
    fn backtracking_covers_what_matching_misses() {
        let s = system(3, 16, false, 8);
        assert!(s.matching_search(200).is_none());
        let family = s.backtrack(100_000).unwrap();
        assert!(s.check(&family));
        assert!(system(3, 8, false, 8).backtrack(1_000_000).is_none());
    }
}
