//! Top-down search over the lattice of inducible index sets.
//!
//! Starting from the full data set, every incompatible set is split with an
//! infeasibility certificate into the largest inducible subsets that avoid
//! part of the certificate. Compatible sets are kept as candidate pieces, and
//! the search stops as soon as an exact set-cover bound proves that no
//! unexplored set can lead to a smaller cover.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::affine_fit::{chebyshev_fit_with, fit_rows, FitResult};
use crate::certificate::{certificate_from_rows, DistanceNorm};
use crate::data::{DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::lp::DenseSimplex;
use crate::model::{AffinePiece, FitConfig, PwaModel};
use crate::setcover::{
    early_stop_given_alpha, lexicographic_min_cover, min_cover, CoverProblem, CoverResult,
    EarlyStop,
};
use crate::template::{Offset, TemplateSpec, TemplateValues};

/// Snapshot handed to the progress hook after every iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Progress {
    pub iteration: usize,
    pub confirmed: usize,
    pub frontier: usize,
    /// Latest cover bounds; `None` is "∞" or "not computed yet".
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Index sets popped from the frontier and tested.
    pub iterations: usize,
    pub certificates: usize,
    /// Incompatible sets split with a certificate found earlier, skipping
    /// both LPs.
    pub reused_certificates: usize,
    pub cover_checks: usize,
    /// True when the exact cover bound ended the search early.
    pub stopped_early: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub model: PwaModel,
    pub stats: SearchStats,
}

/// Children of the incompatible set `indices = I(offset)` given a certificate
/// `cert ⊆ indices`: for each template component `s`, lower `c^s` to the
/// largest value strictly below `max_{ℓ∈C} p^s(x_ℓ)` attained in `indices`.
/// Components without such a value produce no child.
pub fn find_subsets(
    t: &TemplateSpec,
    data: &DataSet,
    indices: &IndexSet,
    offset: &Offset,
    cert: &IndexSet,
    tol: f64,
) -> Result<Vec<(IndexSet, Offset)>> {
    t.check_data(data)?;
    data.check_indices(indices)?;
    if offset.len() != t.h() {
        return Err(TpwaError::DimensionMismatch {
            expected: t.h(),
            got: offset.len(),
        });
    }
    if cert.is_empty() || !cert.is_subset_of(indices) {
        return Err(TpwaError::InvalidCertificate);
    }
    let tv = TemplateValues::new(t, data);
    if tv.induced(offset, tol) != *indices {
        return Err(TpwaError::InvalidInput(
            "offset does not induce the index set".into(),
        ));
    }
    Ok(split(&tv, indices, cert, tol)
        .into_iter()
        .map(|(s, child)| {
            let mut c = offset.clone();
            c.0[s] = child.1;
            (child.0, c)
        })
        .collect())
}

/// Children of `indices` as `(component, (set, lowered offset value))`.
/// Only component `s` changes, so each child is a subset of `indices`.
fn split(
    tv: &TemplateValues,
    indices: &IndexSet,
    cert: &IndexSet,
    tol: f64,
) -> Vec<(usize, (IndexSet, f64))> {
    let mut out = Vec::new();
    for s in 0..tv.h() {
        let cmax = cert
            .iter()
            .map(|k| tv.at(k)[s])
            .fold(f64::NEG_INFINITY, f64::max);
        let below = indices
            .iter()
            .map(|k| tv.at(k)[s])
            .filter(|&v| v < cmax - tol)
            .fold(f64::NEG_INFINITY, f64::max);
        if below == f64::NEG_INFINITY {
            continue;
        }
        let child = IndexSet::from_sorted(
            indices
                .iter()
                .filter(|&k| tv.at(k)[s] <= below + tol)
                .collect(),
        );
        if !child.is_empty() {
            out.push((s, (child, below)));
        }
    }
    out
}

/// Frontier order: larger sets first, then smaller canonical key.
type FrontierKey = (Reverse<usize>, IndexSet);

struct Search<'a> {
    data: &'a DataSet,
    tv: TemplateValues,
    solver: DenseSimplex,
    epsilon: f64,
    tol: f64,
    /// Compatible sets not dominated by another one, in discovery order.
    confirmed: Vec<IndexSet>,
    /// Bumped whenever `confirmed` changes.
    generation: usize,
    frontier: BTreeSet<FrontierKey>,
    visited: HashSet<IndexSet>,
    /// Every certificate found so far; any of them inside a later set
    /// proves that set incompatible too.
    certificates: Vec<IndexSet>,
    /// Fits of the confirmed sets.
    fits: HashMap<IndexSet, FitResult>,
    stats: SearchStats,
}

impl<'a> Search<'a> {
    fn new(t: &TemplateSpec, data: &'a DataSet, epsilon: f64, tol: f64) -> Result<Self> {
        t.check_data(data)?;
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(TpwaError::InvalidInput(
                "epsilon must be finite and nonnegative".into(),
            ));
        }
        let full = IndexSet::full(data.len());
        Ok(Search {
            data,
            tv: TemplateValues::new(t, data),
            solver: DenseSimplex::default(),
            epsilon,
            tol,
            confirmed: Vec::new(),
            generation: 0,
            frontier: BTreeSet::from([(Reverse(full.len()), full)]),
            visited: HashSet::new(),
            certificates: Vec::new(),
            fits: HashMap::new(),
            stats: SearchStats::default(),
        })
    }

    fn dominated(&self, set: &IndexSet) -> bool {
        self.confirmed.iter().any(|s| set.is_subset_of(s))
    }

    /// Pops and processes the next frontier set. Returns false once the
    /// frontier is exhausted.
    fn step(&mut self) -> Result<bool> {
        let set = loop {
            let Some((_, entry)) = self.frontier.pop_first() else {
                return Ok(false);
            };
            if !self.dominated(&entry) {
                break entry;
            }
            self.visited.insert(entry);
        };
        self.visited.insert(set.clone());
        self.stats.iterations += 1;

        if let Some(i) = self.certificates.iter().position(|c| c.is_subset_of(&set)) {
            self.stats.reused_certificates += 1;
            let cert = self.certificates[i].clone();
            return self.push_children(&set, &cert).map(|()| true);
        }

        let rows = fit_rows(&self.solver, self.data, &set)?;
        let t_min = rows.iter().map(|r| r.t).fold(0.0, f64::max);
        if t_min <= self.epsilon + self.tol {
            log::debug!("compatible |I| = {} (t = {t_min:.3e})", set.len());
            self.confirmed.retain(|s| !s.is_subset_of(&set));
            let pruned: Vec<FrontierKey> = self
                .frontier
                .iter()
                .filter(|(_, s)| s.is_subset_of(&set))
                .cloned()
                .collect();
            for key in pruned {
                self.frontier.remove(&key);
                self.visited.insert(key.1);
            }
            self.fits.retain(|s, _| !s.is_subset_of(&set));
            self.fits.insert(set.clone(), FitResult::from_rows(&rows));
            self.confirmed.push(set);
            self.generation += 1;
            return Ok(true);
        }

        let cert = certificate_from_rows(
            &self.solver,
            self.data,
            &set,
            &rows,
            self.epsilon,
            self.tol,
            DistanceNorm::default(),
        )?;
        self.stats.certificates += 1;
        log::debug!(
            "incompatible |I| = {}, certificate {}",
            set.len(),
            cert.indices
        );
        self.push_children(&set, &cert.indices)?;
        self.certificates.push(cert.indices);
        Ok(true)
    }

    /// Replaces the popped set by its children. Points of `set` left out
    /// of every child must still lie in some confirmed or frontier set.
    fn push_children(&mut self, set: &IndexSet, cert: &IndexSet) -> Result<()> {
        let k = self.data.len();
        let mut kept = FixedBitSet::with_capacity(k + 1);
        for (_, (child, _)) in split(&self.tv, set, cert, self.tol) {
            // A visited child may have been split further since, so its
            // points are not known to be covered.
            if self.visited.contains(&child) {
                continue;
            }
            child.iter().for_each(|i| kept.insert(i));
            if !self.dominated(&child) {
                self.frontier.insert((Reverse(child.len()), child));
            }
        }
        let dropped: Vec<usize> = set.iter().filter(|&i| !kept.contains(i)).collect();
        if dropped.is_empty() {
            Ok(())
        } else {
            self.check_coverable()
        }
    }

    fn confirmed_covers(&self) -> bool {
        let k = self.data.len();
        let mut bits = FixedBitSet::with_capacity(k + 1);
        for s in &self.confirmed {
            for i in s.iter() {
                bits.insert(i);
            }
        }
        bits.count_ones(1..) == k
    }

    /// Points that no confirmed or frontier set contains. Any such point
    /// can never be covered, so the instance has no ε-approximation.
    fn uncovered(&self) -> Vec<usize> {
        let k = self.data.len();
        let mut bits = FixedBitSet::with_capacity(k + 1);
        for s in self
            .confirmed
            .iter()
            .chain(self.frontier.iter().map(|(_, s)| s))
        {
            for i in s.iter() {
                bits.insert(i);
            }
        }
        (1..=k).filter(|&i| !bits.contains(i)).collect()
    }

    fn check_coverable(&self) -> Result<()> {
        let missing = self.uncovered();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(TpwaError::InfeasibleInstance { uncovered: missing })
        }
    }
}

/// Every inclusion-maximal compatible inducible set, in discovery order.
pub fn enumerate_maximal_compatible(
    t: &TemplateSpec,
    data: &DataSet,
    epsilon: f64,
    tol: f64,
) -> Result<Vec<IndexSet>> {
    let mut search = Search::new(t, data, epsilon, tol)?;
    while search.step()? {}
    search.check_coverable()?;
    Ok(search.confirmed)
}

/// Minimum-piece model built from the maximal compatible sets.
pub fn fit_maximal(t: &TemplateSpec, data: &DataSet, config: &FitConfig) -> Result<PwaModel> {
    config.validate()?;
    let sets = enumerate_maximal_compatible(t, data, config.epsilon, config.tol)?;
    model_from_cover(t, data, &sets, config.epsilon, config.tol)
}

pub fn fit_optimal(t: &TemplateSpec, data: &DataSet, config: &FitConfig) -> Result<PwaModel> {
    fit_optimal_with_progress(t, data, config, &mut |_| {}).map(|o| o.model)
}

pub fn fit_optimal_with_progress(
    t: &TemplateSpec,
    data: &DataSet,
    config: &FitConfig,
    progress: &mut dyn FnMut(&Progress),
) -> Result<FitOutcome> {
    config.validate()?;
    let mut search = Search::new(t, data, config.epsilon, config.tol)?;
    let k = data.len();
    let (mut alpha, mut beta) = (None, None);
    let mut since_check = 0;
    // Minimum cover of the confirmed sets, recomputed when they change.
    let mut confirmed_cover: Option<(usize, CoverResult)> = None;
    loop {
        if since_check == 0 {
            if confirmed_cover
                .as_ref()
                .is_none_or(|(g, _)| *g != search.generation)
            {
                let cover = if search.confirmed_covers() {
                    min_cover(&CoverProblem {
                        universe_size: k,
                        sets: search.confirmed.clone(),
                    })
                } else {
                    CoverResult::infeasible()
                };
                confirmed_cover = Some((search.generation, cover));
            }
            let cover = &confirmed_cover.as_ref().expect("just computed").1;
            // α = ∞ until the confirmed sets cover every point.
            if cover.is_feasible() {
                search.stats.cover_checks += 1;
                let all = search
                    .confirmed
                    .iter()
                    .chain(search.frontier.iter().map(|(_, s)| s));
                match early_stop_given_alpha(cover.clone(), all, k) {
                    EarlyStop::Break { .. } => {
                        search.stats.stopped_early = !search.frontier.is_empty();
                        log::info!(
                            "cover bound met after {} iterations, {} candidate pieces",
                            search.stats.iterations,
                            search.confirmed.len()
                        );
                        break;
                    }
                    EarlyStop::Continue { alpha: a, beta: b } => {
                        alpha = a;
                        beta = b;
                        log::info!(
                            "iteration {}: alpha = {a:?}, beta = {b:?}, |S| = {}, frontier = {}",
                            search.stats.iterations,
                            search.confirmed.len(),
                            search.frontier.len()
                        );
                    }
                }
            }
        }
        if !search.step()? {
            break;
        }
        since_check = (since_check + 1) % config.cover_period;
        progress(&Progress {
            iteration: search.stats.iterations,
            confirmed: search.confirmed.len(),
            frontier: search.frontier.len(),
            alpha,
            beta,
        });
    }
    search.check_coverable()?;
    let model = build_model(
        t,
        data,
        &search.confirmed,
        config.epsilon,
        config.tol,
        &search.fits,
    )?;
    Ok(FitOutcome {
        model,
        stats: search.stats,
    })
}

/// Fits a piece on each set of the lexicographically smallest minimum cover
/// drawn from `candidates`. Pieces keep the order of `candidates`.
pub fn model_from_cover(
    t: &TemplateSpec,
    data: &DataSet,
    candidates: &[IndexSet],
    epsilon: f64,
    tol: f64,
) -> Result<PwaModel> {
    build_model(t, data, candidates, epsilon, tol, &HashMap::new())
}

fn build_model(
    t: &TemplateSpec,
    data: &DataSet,
    candidates: &[IndexSet],
    epsilon: f64,
    tol: f64,
    fits: &HashMap<IndexSet, FitResult>,
) -> Result<PwaModel> {
    let k = data.len();
    let cover = lexicographic_min_cover(&CoverProblem {
        universe_size: k,
        sets: candidates.to_vec(),
    });
    if !cover.is_feasible() {
        let mut covered = vec![false; k + 1];
        for s in candidates {
            for i in s.iter() {
                covered[i] = true;
            }
        }
        let uncovered = (1..=k).filter(|&i| !covered[i]).collect();
        return Err(TpwaError::InfeasibleInstance { uncovered });
    }
    let tv = TemplateValues::new(t, data);
    let solver = DenseSimplex::default();
    let mut chosen: Vec<(usize, IndexSet)> = cover
        .chosen
        .into_iter()
        .map(|s| {
            (
                candidates
                    .iter()
                    .position(|c| *c == s)
                    .unwrap_or(usize::MAX),
                s,
            )
        })
        .collect();
    chosen.sort();
    let pieces = chosen
        .into_iter()
        .map(|(_, set)| {
            let fit = match fits.get(&set) {
                Some(f) => f.clone(),
                None => chebyshev_fit_with(&solver, data, &set)?,
            };
            Ok(AffinePiece {
                a: fit.a,
                b: fit.b,
                offset: tv.canonical(&set),
                support: set,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PwaModel::new(pieces, t.clone(), epsilon, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{max_residual, OutOfDomainPolicy};

    const TOL: f64 = 1e-7;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.iter().copied()).unwrap()
    }

    /// `x_k = -1 + 0.2 (k - 1)` for `k = 1..11`.
    fn line11() -> DataSet {
        let xs: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        DataSet::from_scalar(&xs, &[0.0; 11]).unwrap()
    }

    #[test]
    fn splits_on_line() {
        let data = line11();
        let t = TemplateSpec::rectangular(1);
        let all = IndexSet::full(11);
        let c = crate::template::canonical_offset(&t, &data, &all).unwrap();
        let kids = find_subsets(&t, &data, &all, &c, &set(&[4, 5, 6]), TOL).unwrap();
        let sets: Vec<_> = kids.iter().map(|(s, _)| s.clone()).collect();
        assert_eq!(
            sets,
            vec![set(&[1, 2, 3, 4, 5]), set(&[5, 6, 7, 8, 9, 10, 11])]
        );

        let right = set(&[5, 6, 7, 8, 9, 10, 11]);
        let c = crate::template::canonical_offset(&t, &data, &right).unwrap();
        let kids = find_subsets(&t, &data, &right, &c, &set(&[6, 7, 8]), TOL).unwrap();
        let sets: Vec<_> = kids.iter().map(|(s, _)| s.clone()).collect();
        assert_eq!(sets, vec![set(&[5, 6, 7]), set(&[7, 8, 9, 10, 11])]);
    }

    #[test]
    fn split_rejects_bad_arguments() {
        let data = line11();
        let t = TemplateSpec::rectangular(1);
        let all = IndexSet::full(11);
        let c = crate::template::canonical_offset(&t, &data, &all).unwrap();
        assert_eq!(
            find_subsets(&t, &data, &set(&[1, 2]), &c, &set(&[1]), TOL),
            Err(TpwaError::InvalidInput(
                "offset does not induce the index set".into()
            ))
        );
        assert_eq!(
            find_subsets(&t, &data, &all, &c, &IndexSet::empty(), TOL),
            Err(TpwaError::InvalidCertificate)
        );
    }

    #[test]
    fn identical_template_values_have_no_children() {
        let data = DataSet::from_scalar(&[1.0, 1.0], &[0.0, 1.0]).unwrap();
        let t = TemplateSpec::rectangular(1);
        let all = IndexSet::full(2);
        let c = crate::template::canonical_offset(&t, &data, &all).unwrap();
        assert!(find_subsets(&t, &data, &all, &c, &all, TOL)
            .unwrap()
            .is_empty());
        assert_eq!(
            fit_optimal(&t, &data, &FitConfig::new(0.1)),
            Err(TpwaError::InfeasibleInstance {
                uncovered: vec![1, 2]
            })
        );
    }

    #[test]
    fn affine_data_gives_one_piece() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let data = DataSet::from_scalar(&xs, &ys).unwrap();
        let out = fit_optimal_with_progress(
            &TemplateSpec::rectangular(1),
            &data,
            &FitConfig::new(0.0),
            &mut |_| {},
        )
        .unwrap();
        assert_eq!(out.model.q(), 1);
        assert_eq!(out.stats.iterations, 1);
        assert_eq!(out.model.pieces[0].support, IndexSet::full(10));
    }

    #[test]
    fn tent_needs_two_pieces() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - (2.0 * x - 1.0f64).abs()).collect();
        let data = DataSet::from_scalar(&xs, &ys).unwrap();
        let t = TemplateSpec::rectangular(1);
        let model = fit_optimal(&t, &data, &FitConfig::new(0.01)).unwrap();
        assert_eq!(model.q(), 2);
        let r = max_residual(&model, &data, OutOfDomainPolicy::Error).unwrap();
        assert!(r <= 0.01 + TOL);
        let maximal = enumerate_maximal_compatible(&t, &data, 0.01, TOL).unwrap();
        assert_eq!(maximal.len(), 2);
        assert_eq!(
            fit_maximal(&t, &data, &FitConfig::new(0.01)).unwrap().q(),
            2
        );
    }

    #[test]
    fn progress_reports_every_iteration() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 1.3).sin()).collect();
        let data = DataSet::from_scalar(&xs, &ys).unwrap();
        let mut seen = Vec::new();
        let out = fit_optimal_with_progress(
            &TemplateSpec::rectangular(1),
            &data,
            &FitConfig::new(0.05),
            &mut |p| seen.push(p.iteration),
        )
        .unwrap();
        assert_eq!(seen.len(), out.stats.iterations);
        assert!(seen.windows(2).all(|w| w[1] == w[0] + 1));
    }
}
