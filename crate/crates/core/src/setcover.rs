//! Exact minimum-cardinality set cover and the early-stopping test.
//!
//! Branch-and-bound: the greedy cover seeds the incumbent, every node branches
//! on the uncovered element contained in the fewest sets, and nodes are pruned
//! with the larger of a counting bound and a disjoint-element packing bound.

use fixedbitset::FixedBitSet;

use crate::data::IndexSet;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverProblem {
    pub universe_size: usize,
    pub sets: Vec<IndexSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    pub status: CoverStatus,
    /// Size of an optimal cover; meaningless when infeasible.
    pub size: usize,
    pub chosen: Vec<IndexSet>,
}

impl CoverResult {
    pub(crate) fn infeasible() -> Self {
        CoverResult {
            status: CoverStatus::Infeasible,
            size: 0,
            chosen: Vec::new(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == CoverStatus::Feasible
    }

    /// Cover size, or `None` for "∞".
    pub fn size_or_none(&self) -> Option<usize> {
        self.is_feasible().then_some(self.size)
    }
}

/// Outcome of the early-stopping test.
#[derive(Debug, Clone, PartialEq)]
pub enum EarlyStop {
    /// `α ≤ β`: the cover from confirmed sets is globally optimal.
    Break { cover: Vec<IndexSet> },
    Continue {
        alpha: Option<usize>,
        beta: Option<usize>,
    },
}

pub fn min_cover(problem: &CoverProblem) -> CoverResult {
    let sets = canonical_sets(&problem.sets);
    let solver = BranchAndBound::new(problem.universe_size, &sets);
    match solver.solve(full_universe(problem.universe_size), usize::MAX) {
        Some(chosen) => CoverResult {
            status: CoverStatus::Feasible,
            size: chosen.len(),
            chosen: chosen.into_iter().map(|i| sets[i].clone()).collect(),
        },
        None => CoverResult::infeasible(),
    }
}

/// Among all minimum covers, the one whose chosen sets, sorted by canonical
/// key, form the lexicographically smallest sequence.
pub fn lexicographic_min_cover(problem: &CoverProblem) -> CoverResult {
    let sets = canonical_sets(&problem.sets);
    let k = problem.universe_size;
    let solver = BranchAndBound::new(k, &sets);
    let Some(optimum) = solver.solve(full_universe(k), usize::MAX).map(|c| c.len()) else {
        return CoverResult::infeasible();
    };
    let bits: Vec<FixedBitSet> = sets.iter().map(|s| s.to_bits(k)).collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(optimum);
    let mut uncovered = full_universe(k);
    let mut start = 0;
    while chosen.len() < optimum {
        let remaining = optimum - chosen.len() - 1;
        let pick = (start..sets.len()).find(|&j| {
            let mut rest = uncovered.clone();
            rest.difference_with(&bits[j]);
            if rest.is_clear() {
                return true;
            }
            if remaining == 0 {
                return false;
            }
            let tail = BranchAndBound::new(k, &sets[j + 1..]);
            tail.solve(rest, remaining + 1).is_some()
        });
        let j = pick.expect("an optimal cover extends every feasible prefix");
        uncovered.difference_with(&bits[j]);
        chosen.push(j);
        start = j + 1;
        if uncovered.is_clear() {
            break;
        }
    }
    CoverResult {
        status: CoverStatus::Feasible,
        size: chosen.len(),
        chosen: chosen.into_iter().map(|i| sets[i].clone()).collect(),
    }
}

/// `α` from `confirmed` alone, `β` from `confirmed ∪ frontier`; break iff
/// `α ≤ β`, with `α = ∞` never breaking.
pub fn early_stop_check(confirmed: &[IndexSet], frontier: &[IndexSet], k: usize) -> EarlyStop {
    let alpha = min_cover(&CoverProblem {
        universe_size: k,
        sets: confirmed.to_vec(),
    });
    early_stop_given_alpha(alpha, confirmed.iter().chain(frontier), k)
}

/// [`early_stop_check`] with `α` already known; `all` is `confirmed ∪ frontier`.
pub(crate) fn early_stop_given_alpha<'a>(
    alpha: CoverResult,
    all: impl IntoIterator<Item = &'a IndexSet>,
    k: usize,
) -> EarlyStop {
    if !alpha.is_feasible() {
        return EarlyStop::Continue {
            alpha: None,
            beta: None,
        };
    }
    let smaller = BranchAndBound::new(k, all).solve(full_universe(k), alpha.size);
    match smaller {
        None => EarlyStop::Break {
            cover: alpha.chosen,
        },
        Some(c) => EarlyStop::Continue {
            alpha: Some(alpha.size),
            beta: Some(c.len()),
        },
    }
}

/// Sorted by key, deduplicated.
fn canonical_sets(sets: &[IndexSet]) -> Vec<IndexSet> {
    let mut v: Vec<IndexSet> = sets.iter().filter(|s| !s.is_empty()).cloned().collect();
    v.sort();
    v.dedup();
    v
}

fn full_universe(k: usize) -> FixedBitSet {
    let mut u = FixedBitSet::with_capacity(k + 1);
    u.insert_range(1..k + 1);
    u
}

struct BranchAndBound {
    sets: Vec<FixedBitSet>,
    /// Position of each kept set in the list given to [`BranchAndBound::new`].
    original: Vec<usize>,
    containing: Vec<Vec<usize>>,
}

impl BranchAndBound {
    /// Drops sets strictly contained in another one; they never improve a
    /// minimum-cardinality cover.
    fn new<'a>(k: usize, sets: impl IntoIterator<Item = &'a IndexSet>) -> Self {
        let bits: Vec<FixedBitSet> = sets.into_iter().map(|s| s.to_bits(k)).collect();
        let keep: Vec<usize> = (0..bits.len())
            .filter(|&i| {
                !(0..bits.len())
                    .any(|j| j != i && bits[i].is_subset(&bits[j]) && (bits[i] != bits[j] || j < i))
            })
            .collect();
        let sets: Vec<FixedBitSet> = keep.iter().map(|&i| bits[i].clone()).collect();
        let mut containing = vec![Vec::new(); k + 1];
        for (i, s) in sets.iter().enumerate() {
            for e in s.ones() {
                containing[e].push(i);
            }
        }
        BranchAndBound {
            sets,
            original: keep,
            containing,
        }
    }

    /// A minimum cover of `target` with strictly fewer than `bound` sets, as
    /// positions in the list given to [`BranchAndBound::new`].
    fn solve(&self, target: FixedBitSet, bound: usize) -> Option<Vec<usize>> {
        if target
            .ones()
            .any(|e| self.containing.get(e).is_none_or(Vec::is_empty))
        {
            return None;
        }
        let mut best: Option<Vec<usize>> = None;
        let mut best_size = bound;
        if let Some(g) = self.greedy(&target) {
            if g.len() < best_size {
                best_size = g.len();
                best = Some(g);
            }
        }
        let mut chosen = Vec::new();
        self.search(&target, &mut chosen, &mut best, &mut best_size);
        best.map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| self.original[i]).collect();
            c.sort_unstable();
            c
        })
    }

    fn greedy(&self, target: &FixedBitSet) -> Option<Vec<usize>> {
        let mut uncovered = target.clone();
        let mut chosen = Vec::new();
        while !uncovered.is_clear() {
            let (i, gain) = self
                .sets
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.intersection_count(&uncovered)))
                .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if gain == 0 {
                return None;
            }
            uncovered.difference_with(&self.sets[i]);
            chosen.push(i);
        }
        Some(chosen)
    }

    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        let n = uncovered.count_ones(..);
        let widest = self
            .sets
            .iter()
            .map(|s| s.intersection_count(uncovered))
            .max()
            .unwrap_or(0);
        if widest == 0 {
            return usize::MAX;
        }
        let counting = n.div_ceil(widest);

        // Elements no two of which share a set each need their own set.
        let mut order: Vec<usize> = uncovered.ones().collect();
        order.sort_by_key(|&e| (self.containing[e].len(), e));
        let mut blocked = FixedBitSet::with_capacity(uncovered.len());
        let mut packing = 0;
        for e in order {
            if blocked.contains(e) {
                continue;
            }
            packing += 1;
            for &s in &self.containing[e] {
                blocked.union_with(&self.sets[s]);
            }
        }
        counting.max(packing)
    }

    fn search(
        &self,
        uncovered: &FixedBitSet,
        chosen: &mut Vec<usize>,
        best: &mut Option<Vec<usize>>,
        best_size: &mut usize,
    ) {
        if uncovered.is_clear() {
            if chosen.len() < *best_size {
                *best_size = chosen.len();
                *best = Some(chosen.clone());
            }
            return;
        }
        let lb = self.lower_bound(uncovered);
        if lb == usize::MAX || chosen.len() + lb >= *best_size {
            return;
        }
        let pivot = uncovered
            .ones()
            .min_by_key(|&e| (self.containing[e].len(), e))
            .expect("nonempty");
        let mut candidates: Vec<(usize, usize)> = self.containing[pivot]
            .iter()
            .map(|&s| (s, self.sets[s].intersection_count(uncovered)))
            .collect();
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (s, _) in candidates {
            let mut next = uncovered.clone();
            next.difference_with(&self.sets[s]);
            chosen.push(s);
            self.search(&next, chosen, best, best_size);
            chosen.pop();
            if chosen.len() + 1 >= *best_size {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.iter().copied()).unwrap()
    }

    fn cover(k: usize, sets: &[&[usize]]) -> CoverResult {
        min_cover(&CoverProblem {
            universe_size: k,
            sets: sets.iter().map(|s| set(s)).collect(),
        })
    }

    #[test]
    fn small_covers() {
        let r = cover(3, &[&[1, 2], &[2, 3]]);
        assert_eq!((r.status, r.size), (CoverStatus::Feasible, 2));
        let r = cover(3, &[&[1, 2, 3], &[1, 2]]);
        assert_eq!((r.status, r.size), (CoverStatus::Feasible, 1));
        assert_eq!(r.chosen, vec![set(&[1, 2, 3])]);
        let r = cover(3, &[&[1], &[2]]);
        assert_eq!(r.status, CoverStatus::Infeasible);
    }

    #[test]
    fn chosen_sets_cover_the_universe() {
        let r = cover(
            6,
            &[&[1, 2, 3], &[3, 4], &[4, 5, 6], &[1, 4], &[2, 5], &[6]],
        );
        assert_eq!(r.size, 2);
        let union = r.chosen.iter().fold(IndexSet::empty(), |a, s| a.union(s));
        assert_eq!(union, IndexSet::full(6));
    }

    #[test]
    fn greedy_is_not_optimal_here() {
        // Greedy takes the 4-element middle set first and ends with 3 sets.
        let r = cover(6, &[&[1, 2, 3], &[4, 5, 6], &[2, 3, 4, 5], &[1], &[6]]);
        assert_eq!(r.size, 2);
    }

    #[test]
    fn lexicographic_choice() {
        let p = CoverProblem {
            universe_size: 4,
            sets: vec![set(&[3, 4]), set(&[1, 2]), set(&[2, 3, 4]), set(&[1, 3])],
        };
        let r = lexicographic_min_cover(&p);
        assert_eq!(r.size, 2);
        assert_eq!(r.chosen, vec![set(&[1, 2]), set(&[2, 3, 4])]);
    }

    #[test]
    fn early_stop_cases() {
        let s = vec![set(&[1, 2]), set(&[3])];
        assert_eq!(
            early_stop_check(&s, &[], 3),
            EarlyStop::Break { cover: s.clone() }
        );

        let r = early_stop_check(&[set(&[1, 2])], &[set(&[1, 2, 3])], 3);
        assert_eq!(
            r,
            EarlyStop::Continue {
                alpha: None,
                beta: None
            }
        );

        let r = early_stop_check(&[set(&[1, 2]), set(&[3])], &[set(&[1, 2, 3])], 3);
        assert_eq!(
            r,
            EarlyStop::Continue {
                alpha: Some(2),
                beta: Some(1)
            }
        );

        let fig = vec![
            IndexSet::new(1..=5).unwrap(),
            set(&[5, 6, 7]),
            IndexSet::new(7..=11).unwrap(),
        ];
        match early_stop_check(&fig, &[], 11) {
            EarlyStop::Break { cover } => assert_eq!(cover.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
