//! Hypersensitivity analysis: entropy/information trade-off over groupings of
//! a history ensemble.
//!
//! A grouping splits the `2^t` histories into groups; purchasing `information`
//! bits about which group a history landed in buys a reduction of the average
//! conditional entropy. The trade-off between the two is summarized by the
//! hypersensitivity parameter `s = 1 / (H_S - H(I = 1 bit))`.
//!
//! Groupings come from three searches: `temporal` (group by the perturbation
//! branch taken on a chosen subset of steps), `exhaustive` (every bipartition,
//! small ensembles only) and `genetic` (stochastic bipartition search, see
//! [`genetic_bipartition`]).

mod ga;

pub use ga::{genetic_bipartition, genetic_bipartition_states, GaConfig};

use crate::error::{Error, Result};
use crate::perturb::HistoryEnsemble;
use crate::state::{
    accumulate_outer, clamp_eigenvalues, entropy_bits_of, mirror_lower, slice_overlap, vec_norm,
    EnsembleView,
};
use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest ensemble accepted by [`exhaustive_bipartition`] (2^(K-1) - 1
/// candidates; anywhere near the cap is already a long wait).
pub const EXHAUSTIVE_CAP: usize = 24;

/// Acceptance band around 1 bit when a grouping's information is used as the
/// `H(I = 1)` reading.
pub(crate) const INFO_BAND: (f64, f64) = (0.99, 1.01);

/// Outcome of measuring one grouping: per-group entropies plus the two
/// ensemble-level numbers (average entropy and information).
#[derive(Clone, Debug)]
pub struct GroupingReport {
    /// `assignment[k]` = group index of history `k`.
    pub assignment: Vec<u32>,
    pub group_sizes: Vec<usize>,
    /// Entropy (bits) of the normalized mixture within each group.
    pub group_entropies: Vec<f64>,
    /// `sum_r p_r H_r` with `p_r = |r| / K`.
    pub avg_entropy: f64,
    /// `-sum_r p_r log2 p_r`.
    pub information: f64,
}

impl GroupingReport {
    pub fn num_groups(&self) -> usize {
        self.group_sizes.len()
    }
}

/// Entropy (bits) of the uniform mixture of the listed ensemble members.
///
/// Uses the Gram matrix of the members when there are at most `dim` of them
/// (the nonzero spectrum of the mixture equals the spectrum of `G / m`), and
/// the dense density matrix otherwise, so the eigenproblem is always the
/// smaller of `m x m` and `dim x dim`.
pub fn members_entropy(view: &EnsembleView<'_>, members: &[usize]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyInput { what: "group member list" });
    }
    for &k in members {
        if k >= view.len() {
            return Err(Error::HistoryOutOfRange { index: k, count: view.len() });
        }
    }
    if members.len() <= view.dim() {
        gram_entropy(view, members)
    } else {
        let mut mat = DMatrix::zeros(view.dim(), view.dim());
        accumulate_members(view, members, &mut mat);
        spectrum_entropy_scaled(&mat, 1.0 / members.len() as f64)
    }
}

/// Gram-matrix route: eigenvalues of `G / m` where `G_ij = <i|j>`.
pub(crate) fn gram_entropy(view: &EnsembleView<'_>, members: &[usize]) -> Result<f64> {
    let m = members.len();
    let dim = view.dim();
    let mut store: Vec<C64> = Vec::new();
    let rows: Vec<&[C64]> = if members.iter().all(|&k| view.state_slice(k).is_some()) {
        members.iter().map(|&k| view.state_slice(k).unwrap()).collect()
    } else {
        store.resize(m * dim, C64::ZERO);
        for (i, &k) in members.iter().enumerate() {
            view.copy_state_into(k, &mut store[i * dim..(i + 1) * dim]);
        }
        store.chunks_exact(dim).collect()
    };
    let mut g = DMatrix::<C64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            g[(i, j)] = slice_overlap(rows[i], rows[j]);
        }
    }
    mirror_lower(&mut g);
    spectrum_entropy_scaled(&g, 1.0 / m as f64)
}

/// Adds `|k><k|` for every listed member into `mat` (upper triangle, weight 1
/// each) and mirrors. Caller rescales through [`spectrum_entropy_scaled`].
pub(crate) fn accumulate_members(
    view: &EnsembleView<'_>,
    members: &[usize],
    mat: &mut DMatrix<C64>,
) {
    mat.fill(C64::ZERO);
    let mut buf = vec![C64::ZERO; view.dim()];
    for &k in members {
        match view.state_slice(k) {
            Some(s) => accumulate_outer(mat, s, 1.0),
            None => {
                view.copy_state_into(k, &mut buf);
                accumulate_outer(mat, &buf, 1.0);
            }
        }
    }
    mirror_lower(mat);
}

/// Entropy (bits) of `scale * mat` from its eigenvalues, with the usual
/// round-off clamping.
pub(crate) fn spectrum_entropy_scaled(mat: &DMatrix<C64>, scale: f64) -> Result<f64> {
    let raw = mat.symmetric_eigenvalues();
    let eig = clamp_eigenvalues(raw.iter().map(|v| v * scale))?;
    Ok(entropy_bits_of(&eig))
}

/// Measures one explicit grouping: validates that `groups` is a partition of
/// `0..K` and returns entropies, average entropy and information.
pub fn grouping_stats(view: &EnsembleView<'_>, groups: &[Vec<usize>]) -> Result<GroupingReport> {
    if groups.is_empty() {
        return Err(Error::NoGroups);
    }
    let count = view.len();
    let mut assignment = vec![u32::MAX; count];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::EmptyInput { what: "group member list" });
        }
        for &k in members {
            if k >= count {
                return Err(Error::HistoryOutOfRange { index: k, count });
            }
            if assignment[k] != u32::MAX {
                return Err(Error::DoublyAssigned { index: k });
            }
            assignment[k] = g as u32;
        }
    }
    if let Some(k) = assignment.iter().position(|&g| g == u32::MAX) {
        return Err(Error::UnassignedHistory { index: k });
    }

    let group_entropies: Vec<f64> = groups
        .par_iter()
        .map(|members| members_entropy(view, members))
        .collect::<Result<_>>()?;
    let group_sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let total = count as f64;
    let avg_entropy = group_sizes
        .iter()
        .zip(&group_entropies)
        .map(|(&sz, &h)| sz as f64 / total * h)
        .sum();
    let information = group_sizes
        .iter()
        .map(|&sz| {
            let p = sz as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0);
    Ok(GroupingReport { assignment, group_sizes, group_entropies, avg_entropy, information })
}

/// Best temporal grouping at subset size `l`, and the steps that achieve it.
#[derive(Clone, Debug)]
pub struct TemporalGrouping {
    /// The winning step subset (1-based, ascending).
    pub steps: Vec<usize>,
    pub report: GroupingReport,
}

fn temporal_buckets(t: usize, steps: &[usize]) -> Vec<Vec<usize>> {
    let l = steps.len();
    let mut groups = vec![Vec::with_capacity(1 << (t - l)); 1 << l];
    for k in 0..1usize << t {
        let mut g = 0usize;
        for &s in steps {
            g = (g << 1) | ((k >> (t - s)) & 1);
        }
        groups[g].push(k);
    }
    groups
}

/// Searches every size-`l` subset of the `t` steps, grouping histories by the
/// branch bits taken on those steps, and returns the subset with the lowest
/// average entropy (ties broken toward the lexicographically first subset).
/// All `2^l` groups have equal size, so the information is exactly `l` bits.
pub fn temporal_grouping(ens: &HistoryEnsemble, l: usize) -> Result<TemporalGrouping> {
    let t = ens.steps();
    if l > t {
        return Err(Error::BadSubsetSize { l, t });
    }
    let view = ens.view();
    if l == 0 {
        let all: Vec<usize> = (0..view.len()).collect();
        let report = grouping_stats(&view, std::slice::from_ref(&all))?;
        return Ok(TemporalGrouping { steps: Vec::new(), report });
    }
    let subsets: Vec<Vec<usize>> = (1..=t).combinations(l).collect();
    let best = subsets
        .par_iter()
        .map(|steps| -> Result<(f64, &Vec<usize>)> {
            let groups = temporal_buckets(t, steps);
            let mut h = 0.0;
            for members in &groups {
                h += members_entropy(&view, members)?;
            }
            Ok((h / groups.len() as f64, steps))
        })
        .try_reduce(
            || (f64::INFINITY, &subsets[0]),
            |a, b| Ok(if (b.0, b.1) < (a.0, a.1) { b } else { a }),
        )?;
    let steps = best.1.clone();
    let report = grouping_stats(&view, &temporal_buckets(t, &steps))?;
    Ok(TemporalGrouping { steps, report })
}

/// Scans every bipartition of the ensemble (the last state pinned to group 0
/// to skip mirror duplicates) and returns the one with the lowest average
/// entropy. Exponential in the ensemble size; refused above
/// [`EXHAUSTIVE_CAP`] states.
pub fn exhaustive_bipartition(view: &EnsembleView<'_>) -> Result<GroupingReport> {
    let count = view.len();
    if count < 2 {
        return Err(Error::EmptyInput { what: "bipartition needs at least two states" });
    }
    if count > EXHAUSTIVE_CAP {
        return Err(Error::ExhaustiveTooLarge { count, cap: EXHAUSTIVE_CAP });
    }
    let top = 1u32 << (count - 1);
    let best = (1..top)
        .into_par_iter()
        .map(|mask| -> Result<(f64, u32)> {
            let (zeros, ones) = split_by_mask(count, mask);
            let h0 = members_entropy(view, &zeros)?;
            let h1 = members_entropy(view, &ones)?;
            let h = (zeros.len() as f64 * h0 + ones.len() as f64 * h1) / count as f64;
            Ok((h, mask))
        })
        .try_reduce(
            || (f64::INFINITY, u32::MAX),
            |a, b| Ok(if (b.0, b.1) < (a.0, a.1) { b } else { a }),
        )?;
    let (zeros, ones) = split_by_mask(count, best.1);
    grouping_stats(view, &[zeros, ones])
}

fn split_by_mask(count: usize, mask: u32) -> (Vec<usize>, Vec<usize>) {
    let mut zeros = Vec::new();
    let mut ones = Vec::new();
    for k in 0..count {
        if k < count - 1 && mask >> k & 1 == 1 {
            ones.push(k);
        } else {
            zeros.push(k);
        }
    }
    (zeros, ones)
}

/// `s = 1 / (H_S - H(I = 1 bit))`. Errors if the grouping failed to reduce
/// the entropy at all.
pub fn s_parameter(h_s: f64, h_at_one_bit: f64) -> Result<f64> {
    let gap = h_s - h_at_one_bit;
    if gap <= 0.0 {
        return Err(Error::UndefinedS { h_s, h_bar: h_at_one_bit });
    }
    Ok(1.0 / gap)
}

/// Which search produced a trade-off point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingMethod {
    Temporal,
    Genetic,
    Exhaustive,
}

/// One point on the entropy/information trade-off.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(rename = "I")]
    pub information: f64,
    #[serde(rename = "H")]
    pub avg_entropy: f64,
    pub method: GroupingMethod,
    /// Step subset, for temporal points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<usize>>,
}

/// Provenance of the ensemble a curve was computed from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleMeta {
    pub n_qubits: usize,
    pub map_index: usize,
    pub steps: usize,
    pub perturbation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

/// Entropy/information trade-off for one ensemble, plus the derived `s` when
/// a grouping within [`INFO_BAND`] of 1 bit exists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TradeoffCurve {
    #[serde(rename = "H_S")]
    pub h_s: f64,
    pub points: Vec<TradeoffPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_method: Option<GroupingMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleMeta>,
}

/// Runs the requested searches on one ensemble and assembles the trade-off
/// curve. Temporal contributes one point per subset size `l = 0..=t`; genetic
/// and exhaustive contribute one bipartition point each.
///
/// `s` is taken from the first method (preference genetic, exhaustive,
/// temporal `l = 1`) whose point's information lands within [`INFO_BAND`];
/// methods outside the band still contribute their point to the curve.
pub fn tradeoff_curve(
    ens: &HistoryEnsemble,
    methods: &[GroupingMethod],
    ga: &GaConfig,
    seed: u64,
) -> Result<TradeoffCurve> {
    let view = ens.view();
    let all: Vec<usize> = (0..view.len()).collect();
    let h_s = members_entropy(&view, &all)?;

    let mut points: Vec<TradeoffPoint> = Vec::new();
    let mut seen = Vec::new();
    for &method in methods {
        if seen.contains(&method) {
            continue;
        }
        seen.push(method);
        match method {
            GroupingMethod::Temporal => {
                for l in 0..=ens.steps() {
                    let tg = temporal_grouping(ens, l)?;
                    points.push(TradeoffPoint {
                        information: tg.report.information,
                        avg_entropy: tg.report.avg_entropy,
                        method,
                        steps: Some(tg.steps),
                    });
                }
            }
            GroupingMethod::Genetic => {
                let report = genetic_bipartition(ens, ga, seed)?;
                points.push(TradeoffPoint {
                    information: report.information,
                    avg_entropy: report.avg_entropy,
                    method,
                    steps: None,
                });
            }
            GroupingMethod::Exhaustive => {
                let report = exhaustive_bipartition(&view)?;
                points.push(TradeoffPoint {
                    information: report.information,
                    avg_entropy: report.avg_entropy,
                    method,
                    steps: None,
                });
            }
        }
    }

    let mut s = None;
    let mut s_method = None;
    for method in [GroupingMethod::Genetic, GroupingMethod::Exhaustive, GroupingMethod::Temporal] {
        let candidate = points.iter().find(|p| {
            p.method == method
                && p.information >= INFO_BAND.0
                && p.information <= INFO_BAND.1
        });
        if let Some(p) = candidate {
            if let Ok(v) = s_parameter(h_s, p.avg_entropy) {
                s = Some(v);
                s_method = Some(method);
                break;
            }
        }
    }

    Ok(TradeoffCurve { h_s, points, s, s_method, ensemble: None })
}

/// One entry of [`s_series`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SPoint {
    pub t: usize,
    #[serde(rename = "H_S")]
    pub h_s: f64,
    #[serde(rename = "H")]
    pub h_at_one_bit: f64,
    #[serde(rename = "I")]
    pub information: f64,
    pub s: f64,
}

/// Evolves the ensemble step by step and reports `s` at each time in
/// `t_from..=t_to`, using `method` to find the one-bit grouping (genetic gets
/// a per-time seed derived from `seed`). Errors if a grouping's information
/// falls outside [`INFO_BAND`] or fails to reduce the entropy.
#[allow(clippy::too_many_arguments)]
pub fn s_series(
    ens0: HistoryEnsemble,
    map: &crate::baker::BakerMap,
    spec: &crate::perturb::PerturbationSpec,
    t_from: usize,
    t_to: usize,
    method: GroupingMethod,
    ga: &GaConfig,
    seed: u64,
    memory_budget: u64,
) -> Result<Vec<SPoint>> {
    if t_from < 1 || t_from > t_to {
        return Err(Error::BadSubsetSize { l: t_from, t: t_to });
    }
    let mut ens = ens0;
    let mut out = Vec::new();
    loop {
        let t = ens.steps();
        if t >= t_from && t <= t_to {
            let view = ens.view();
            let all: Vec<usize> = (0..view.len()).collect();
            let h_s = members_entropy(&view, &all)?;
            let report = match method {
                GroupingMethod::Temporal => temporal_grouping(&ens, 1)?.report,
                GroupingMethod::Genetic => genetic_bipartition(&ens, ga, mix64(seed, t as u64))?,
                GroupingMethod::Exhaustive => exhaustive_bipartition(&view)?,
            };
            if report.information < INFO_BAND.0 || report.information > INFO_BAND.1 {
                return Err(Error::OffTargetInformation { info: report.information });
            }
            let s = s_parameter(h_s, report.avg_entropy)?;
            out.push(SPoint {
                t,
                h_s,
                h_at_one_bit: report.avg_entropy,
                information: report.information,
                s,
            });
        }
        if t >= t_to {
            break;
        }
        ens = ens.step_with_budget(map, spec, memory_budget)?;
    }
    Ok(out)
}

/// SplitMix64-style mixing for deriving independent RNG streams.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn mix64(seed: u64, salt: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ salt)
}

/// A batch of Haar-random pure states (reference ensemble for calibrating
/// the bipartition searches).
#[derive(Clone, Debug)]
pub struct HaarEnsemble {
    dim: usize,
    amps: Vec<C64>,
}

impl HaarEnsemble {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.amps.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn view(&self) -> EnsembleView<'_> {
        EnsembleView::double(self.dim, &self.amps)
    }
}

/// Draws `count` states uniformly from the unit sphere in dimension `dim`
/// (normalized complex Gaussian vectors), deterministically from `seed`.
pub fn haar_random_ensemble(dim: usize, count: usize, seed: u64) -> Result<HaarEnsemble> {
    if dim < 2 {
        return Err(Error::BadParameter {
            name: "dim",
            value: dim as f64,
            domain: "integers >= 2",
        });
    }
    if count == 0 {
        return Err(Error::EmptyInput { what: "state count" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut amps = vec![C64::ZERO; count * dim];
    for state in amps.chunks_exact_mut(dim) {
        for a in state.iter_mut() {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            *a = C64::new(re, im);
        }
        let norm = vec_norm(state);
        for a in state.iter_mut() {
            *a /= norm;
        }
    }
    Ok(HaarEnsemble { dim, amps })
}
