//! Brute-force baselines for cross-checking the search: exhaustive
//! enumeration of inducible sets, the naive optimal algorithm, tiny
//! switched-affine regression and a consistency checker. None of these is on
//! the fitting hot path.

use std::collections::{BTreeSet, HashMap};

use crate::affine_fit::{chebyshev_fit_with, is_compatible};
use crate::data::{DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::lp::DenseSimplex;
use crate::model::{PwaModel, DEFAULT_TOL};
use crate::setcover::{min_cover, CoverProblem};
use crate::template::{Offset, TemplateSpec, TemplateValues};
use crate::topdown::model_from_cover;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub tol: f64,
    /// Cap on the number of candidate offsets, i.e. the product over
    /// components of the number of distinct template values.
    pub enumeration_budget: u128,
    /// Cap on `K` for [`sa_bruteforce`].
    pub sa_max_points: usize,
    /// Cap on the number of minimum covers listed by [`naive_optimal_covers`].
    pub max_covers: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            tol: DEFAULT_TOL,
            enumeration_budget: 1_000_000,
            sa_max_points: 12,
            max_covers: 100_000,
        }
    }
}

pub fn enumerate_index_sets(t: &TemplateSpec, data: &DataSet) -> Result<Vec<IndexSet>> {
    enumerate_index_sets_with(t, data, &OracleConfig::default())
}

/// All distinct nonempty inducible index sets, sorted by key. Every
/// component of the candidate offset ranges over the distinct values that
/// component takes on the data.
pub fn enumerate_index_sets_with(
    t: &TemplateSpec,
    data: &DataSet,
    config: &OracleConfig,
) -> Result<Vec<IndexSet>> {
    t.check_data(data)?;
    let tv = TemplateValues::new(t, data);
    let grids: Vec<Vec<f64>> = (0..tv.h())
        .map(|s| tv.distinct_component_values(s))
        .collect();
    let needed = grids
        .iter()
        .try_fold(1u128, |acc, g| acc.checked_mul(g.len() as u128))
        .unwrap_or(u128::MAX);
    if needed > config.enumeration_budget {
        return Err(TpwaError::BudgetExceeded {
            needed,
            budget: config.enumeration_budget,
        });
    }

    let mut found = BTreeSet::new();
    let mut digits = vec![0usize; grids.len()];
    let mut c = Offset(grids.iter().map(|g| g[0]).collect());
    loop {
        let set = tv.induced(&c, config.tol);
        if !set.is_empty() {
            found.insert(set);
        }
        // Mixed-radix increment.
        let mut s = 0;
        while s < digits.len() {
            digits[s] += 1;
            if digits[s] < grids[s].len() {
                c.0[s] = grids[s][digits[s]];
                break;
            }
            digits[s] = 0;
            c.0[s] = grids[s][0];
            s += 1;
        }
        if s == digits.len() {
            break;
        }
    }
    Ok(found.into_iter().collect())
}

/// Compatible inducible sets, sorted by key.
pub fn compatible_index_sets(
    t: &TemplateSpec,
    data: &DataSet,
    epsilon: f64,
    config: &OracleConfig,
) -> Result<Vec<IndexSet>> {
    let mut out = Vec::new();
    for set in enumerate_index_sets_with(t, data, config)? {
        if is_compatible(data, &set, epsilon, config.tol)? {
            out.push(set);
        }
    }
    Ok(out)
}

/// Inclusion-maximal members of `sets`, keeping their order.
pub fn maximal_sets(sets: &[IndexSet]) -> Vec<IndexSet> {
    sets.iter()
        .filter(|s| !sets.iter().any(|o| o != *s && s.is_subset_of(o)))
        .cloned()
        .collect()
}

pub fn naive_optimal(t: &TemplateSpec, data: &DataSet, epsilon: f64) -> Result<PwaModel> {
    naive_optimal_with(t, data, epsilon, &OracleConfig::default())
}

/// Minimum-piece model from exhaustive enumeration: every compatible
/// inducible set is a candidate, and an exact set cover picks the pieces.
pub fn naive_optimal_with(
    t: &TemplateSpec,
    data: &DataSet,
    epsilon: f64,
    config: &OracleConfig,
) -> Result<PwaModel> {
    check_epsilon(epsilon)?;
    let compatible = compatible_index_sets(t, data, epsilon, config)?;
    // Any minimum cover can swap its sets for maximal supersets.
    let candidates = maximal_sets(&compatible);
    model_from_cover(t, data, &candidates, epsilon, config.tol)
}

/// Every minimum-cardinality cover of `{1..K}` by compatible inducible sets.
/// Each cover is sorted by key; covers come in lexicographic order.
pub fn naive_optimal_covers(
    t: &TemplateSpec,
    data: &DataSet,
    epsilon: f64,
    config: &OracleConfig,
) -> Result<Vec<Vec<IndexSet>>> {
    check_epsilon(epsilon)?;
    let compatible = compatible_index_sets(t, data, epsilon, config)?;
    let k = data.len();
    let best = min_cover(&CoverProblem {
        universe_size: k,
        sets: maximal_sets(&compatible),
    });
    let Some(q) = best.size_or_none() else {
        let uncovered = uncovered(&compatible, k);
        return Err(TpwaError::InfeasibleInstance { uncovered });
    };
    let mut covers = Vec::new();
    let mut stack = Vec::with_capacity(q);
    list_covers(
        &compatible,
        k,
        q,
        0,
        &mut stack,
        &mut covers,
        config.max_covers,
    )?;
    Ok(covers)
}

fn list_covers(
    sets: &[IndexSet],
    k: usize,
    q: usize,
    start: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<IndexSet>>,
    cap: usize,
) -> Result<()> {
    if stack.len() == q {
        let mut hit = vec![false; k + 1];
        for &i in stack.iter() {
            for j in sets[i].iter() {
                hit[j] = true;
            }
        }
        if hit[1..].iter().all(|&h| h) {
            if out.len() == cap {
                return Err(TpwaError::BudgetExceeded {
                    needed: cap as u128 + 1,
                    budget: cap as u128,
                });
            }
            out.push(stack.iter().map(|&i| sets[i].clone()).collect());
        }
        return Ok(());
    }
    for i in start..sets.len() {
        stack.push(i);
        list_covers(sets, k, q, i + 1, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

/// Result of [`sa_bruteforce`]: a 0-based group label per data point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SaOutcome {
    Feasible { assignment: Vec<usize> },
    Infeasible,
}

pub fn sa_bruteforce(data: &DataSet, epsilon: f64, q: usize) -> Result<SaOutcome> {
    sa_bruteforce_with(data, epsilon, q, &OracleConfig::default())
}

/// Switched affine regression by exhaustive search over assignments of
/// points to at most `q` groups, modulo relabeling. A partial assignment is
/// abandoned as soon as one of its groups stops being compatible.
pub fn sa_bruteforce_with(
    data: &DataSet,
    epsilon: f64,
    q: usize,
    config: &OracleConfig,
) -> Result<SaOutcome> {
    check_epsilon(epsilon)?;
    if data.len() > config.sa_max_points {
        return Err(TpwaError::BudgetExceeded {
            needed: data.len() as u128,
            budget: config.sa_max_points as u128,
        });
    }
    if q == 0 {
        return Ok(SaOutcome::Infeasible);
    }
    let mut search = SaSearch {
        data,
        epsilon,
        tol: config.tol,
        q,
        groups: Vec::new(),
        assignment: Vec::with_capacity(data.len()),
        memo: HashMap::new(),
    };
    Ok(if search.extend(1)? {
        SaOutcome::Feasible {
            assignment: search.assignment,
        }
    } else {
        SaOutcome::Infeasible
    })
}

struct SaSearch<'a> {
    data: &'a DataSet,
    epsilon: f64,
    tol: f64,
    q: usize,
    groups: Vec<Vec<usize>>,
    assignment: Vec<usize>,
    memo: HashMap<Vec<usize>, bool>,
}

impl SaSearch<'_> {
    fn compatible(&mut self, group: &[usize]) -> Result<bool> {
        if let Some(&v) = self.memo.get(group) {
            return Ok(v);
        }
        let set = IndexSet::new(group.iter().copied())?;
        let v = chebyshev_fit_with(&DenseSimplex::default(), self.data, &set)?.t_min
            <= self.epsilon + self.tol;
        self.memo.insert(group.to_vec(), v);
        Ok(v)
    }

    fn extend(&mut self, k: usize) -> Result<bool> {
        if k > self.data.len() {
            return Ok(true);
        }
        // Existing groups, then at most one new group (relabeling symmetry).
        let open = (self.groups.len() + 1).min(self.q);
        for g in 0..open {
            if g == self.groups.len() {
                self.groups.push(Vec::new());
            }
            self.groups[g].push(k);
            let group = self.groups[g].clone();
            if self.compatible(&group)? {
                self.assignment.push(g);
                if self.extend(k + 1)? {
                    return Ok(true);
                }
                self.assignment.pop();
            }
            self.groups[g].pop();
            if self.groups[g].is_empty() {
                self.groups.pop();
            }
        }
        Ok(false)
    }
}

pub fn check_consistency(
    t: &TemplateSpec,
    data: &DataSet,
    indices: &IndexSet,
    subsets: &[IndexSet],
    epsilon: f64,
) -> Result<bool> {
    check_consistency_with(t, data, indices, subsets, epsilon, &OracleConfig::default())
}

/// True iff every subset is a strict subset of `indices` and every
/// compatible inducible `J ⊆ indices` lies inside one of them.
pub fn check_consistency_with(
    t: &TemplateSpec,
    data: &DataSet,
    indices: &IndexSet,
    subsets: &[IndexSet],
    epsilon: f64,
    config: &OracleConfig,
) -> Result<bool> {
    check_epsilon(epsilon)?;
    data.check_indices(indices)?;
    if subsets
        .iter()
        .any(|s| !s.is_subset_of(indices) || s.len() == indices.len())
    {
        return Ok(false);
    }
    for j in enumerate_index_sets_with(t, data, config)? {
        if !j.is_subset_of(indices) || subsets.iter().any(|s| j.is_subset_of(s)) {
            continue;
        }
        if is_compatible(data, &j, epsilon, config.tol)? {
            log::debug!("consistency witness {j}");
            return Ok(false);
        }
    }
    Ok(true)
}

/// Size of a minimum cover by trying every subcollection, or `None` if no
/// subcollection covers. Limited to 20 sets.
pub fn exhaustive_min_cover(problem: &CoverProblem) -> Result<Option<usize>> {
    let n = problem.sets.len();
    if n > 20 {
        return Err(TpwaError::BudgetExceeded {
            needed: 1u128.checked_shl(n as u32).unwrap_or(u128::MAX),
            budget: 1 << 20,
        });
    }
    let k = problem.universe_size;
    if k > 128 {
        return Err(TpwaError::BudgetExceeded {
            needed: k as u128,
            budget: 128,
        });
    }
    let masks: Vec<u128> = problem
        .sets
        .iter()
        .map(|s| {
            s.iter()
                .filter(|&i| i <= k)
                .fold(0u128, |m, i| m | 1 << (i - 1))
        })
        .collect();
    let full = if k == 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    };
    let mut best: Option<usize> = None;
    for pick in 0u32..(1 << n) {
        let size = pick.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let union = (0..n)
            .filter(|i| pick >> i & 1 == 1)
            .fold(0u128, |m, i| m | masks[i]);
        if union == full {
            best = Some(size);
        }
    }
    Ok(best)
}

fn uncovered(sets: &[IndexSet], k: usize) -> Vec<usize> {
    (1..=k)
        .filter(|&i| !sets.iter().any(|s| s.contains(i)))
        .collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon >= 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(TpwaError::InvalidInput(
            "epsilon must be finite and nonnegative".into(),
        ))
    }
}
