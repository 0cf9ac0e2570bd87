//! Genetic bipartition search: minimize the average conditional entropy over
//! two-group splits of an ensemble.
//!
//! Genome = one bit per ensemble member (which of the two groups it sits in),
//! canonicalized so member 0 is always in group 0 (a mask and its complement
//! describe the same bipartition). Tournament selection, uniform crossover,
//! per-bit mutation, elitism, and a stagnation stop; after the evolutionary
//! loop a deterministic single-move descent polishes the best genome until no
//! single member can switch sides profitably. Reproducible for a fixed seed:
//! every child draws from its own RNG keyed by (seed, generation, slot), so
//! results do not depend on thread scheduling.

use super::{
    accumulate_members, gram_entropy, grouping_stats, members_entropy, mix64,
    spectrum_entropy_scaled, GroupingReport, HaarEnsemble,
};
use crate::error::{Error, Result};
use crate::perturb::HistoryEnsemble;
use crate::state::{accumulate_outer, mirror_lower, EnsembleView};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;

/// Fitness improvements smaller than this neither reset the stagnation
/// counter nor justify a polish move.
const IMPROVE_EPS: f64 = 1e-12;

const MAX_POLISH_PASSES: usize = 200;

/// Knobs for [`genetic_bipartition`]. The defaults are deliberately plain;
/// the initial population is always topped up with random genomes after any
/// injected seeds.
#[derive(Clone, Debug)]
pub struct GaConfig {
    pub population: usize,
    /// Tournament size for parent selection.
    pub tournament: usize,
    /// Per-bit mutation probability; `None` means `1 / genome_length`.
    pub mutation: Option<f64>,
    /// Genomes copied unchanged into the next generation.
    pub elitism: usize,
    pub max_generations: usize,
    /// Stop after this many generations without measurable improvement.
    pub stagnation_limit: usize,
    /// Run the single-move descent on the final best genome.
    pub polish: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 64,
            tournament: 3,
            mutation: None,
            elitism: 2,
            max_generations: 500,
            stagnation_limit: 50,
            polish: true,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::BadParameter {
                name: "population",
                value: self.population as f64,
                domain: "integers >= 4",
            });
        }
        if self.tournament < 1 || self.tournament > self.population {
            return Err(Error::BadParameter {
                name: "tournament",
                value: self.tournament as f64,
                domain: "1..=population",
            });
        }
        if self.elitism >= self.population {
            return Err(Error::BadParameter {
                name: "elitism",
                value: self.elitism as f64,
                domain: "integers < population",
            });
        }
        if let Some(r) = self.mutation {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::BadParameter {
                    name: "mutation",
                    value: r,
                    domain: "(0, 1)",
                });
            }
        }
        if self.max_generations < 1 {
            return Err(Error::BadParameter {
                name: "max_generations",
                value: self.max_generations as f64,
                domain: "integers >= 1",
            });
        }
        if self.stagnation_limit < 1 {
            return Err(Error::BadParameter {
                name: "stagnation_limit",
                value: self.stagnation_limit as f64,
                domain: "integers >= 1",
            });
        }
        Ok(())
    }
}

/// Group mask over the ensemble, bit `k` = group of member `k`.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct BitMask {
    words: Vec<u64>,
    len: usize,
}

impl BitMask {
    pub(crate) fn zeros(len: usize) -> Self {
        BitMask { words: vec![0; len.div_ceil(64)], len }
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn clear_tail(&mut self) {
        let used = self.len % 64;
        if used != 0 {
            *self.words.last_mut().unwrap() &= (1 << used) - 1;
        }
    }

    fn complement(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.clear_tail();
    }

    /// A mask and its complement are the same bipartition; keep the form
    /// with member 0 in group 0.
    pub(crate) fn canonicalize(&mut self) {
        if self.get(0) {
            self.complement();
        }
    }

    /// After canonicalization the only invalid genome is all-zeros (one
    /// group empty).
    fn is_degenerate(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.len
    }

    fn random(len: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut m = BitMask::zeros(len);
        for _ in 0..64 {
            for w in &mut m.words {
                *w = rng.random();
            }
            m.clear_tail();
            m.canonicalize();
            if !m.is_degenerate() {
                return m;
            }
        }
        m.set(len - 1, true);
        m
    }

    fn split_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let mut zeros = Vec::new();
        let mut ones = Vec::new();
        for i in 0..self.len {
            if self.get(i) {
                ones.push(i);
            } else {
                zeros.push(i);
            }
        }
        (zeros, ones)
    }
}

struct FitnessCtx<'a> {
    view: &'a EnsembleView<'a>,
    /// Unnormalized sum of all |k><k|, kept when the ensemble is large enough
    /// that the bigger side of a split is cheaper by subtraction.
    total: Option<DMatrix<C64>>,
}

struct Scratch {
    mat: DMatrix<C64>,
    members0: Vec<usize>,
    members1: Vec<usize>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch { mat: DMatrix::zeros(dim, dim), members0: Vec::new(), members1: Vec::new() }
    }
}

fn fitness(ctx: &FitnessCtx<'_>, mask: &BitMask, sc: &mut Scratch) -> Result<f64> {
    let view = ctx.view;
    let dim = view.dim();
    let count = view.len();
    sc.members0.clear();
    sc.members1.clear();
    for k in 0..count {
        if mask.get(k) {
            sc.members1.push(k);
        } else {
            sc.members0.push(k);
        }
    }
    let (n0, n1) = (sc.members0.len(), sc.members1.len());
    if n0 == 0 || n1 == 0 {
        return Ok(f64::INFINITY);
    }
    let (h0, h1) = if let Some(total) = &ctx.total {
        let (small, small_is_zero) =
            if n0 <= n1 { (&sc.members0, true) } else { (&sc.members1, false) };
        let big_n = count - small.len();
        accumulate_members(view, small, &mut sc.mat);
        let h_small = if small.len() <= dim {
            gram_entropy(view, small)?
        } else {
            spectrum_entropy_scaled(&sc.mat, 1.0 / small.len() as f64)?
        };
        sc.mat.zip_apply(total, |m, t| *m = t - *m);
        let h_big = spectrum_entropy_scaled(&sc.mat, 1.0 / big_n as f64)?;
        if small_is_zero {
            (h_small, h_big)
        } else {
            (h_big, h_small)
        }
    } else {
        (members_entropy(view, &sc.members0)?, members_entropy(view, &sc.members1)?)
    };
    Ok((n0 as f64 * h0 + n1 as f64 * h1) / count as f64)
}

fn eval_all(ctx: &FitnessCtx<'_>, pop: &[BitMask]) -> Result<Vec<f64>> {
    pop.par_iter()
        .map_init(|| Scratch::new(ctx.view.dim()), |sc, m| fitness(ctx, m, sc))
        .collect()
}

fn child_rng(seed: u64, generation: usize, slot: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed, ((generation as u64) << 32) | slot as u64))
}

fn tournament_pick(rng: &mut ChaCha8Rng, fits: &[f64], k: usize) -> usize {
    let mut best = rng.random_range(0..fits.len());
    for _ in 1..k {
        let c = rng.random_range(0..fits.len());
        if fits[c].total_cmp(&fits[best]).then(c.cmp(&best)) == Ordering::Less {
            best = c;
        }
    }
    best
}

fn crossover(a: &BitMask, b: &BitMask, rng: &mut ChaCha8Rng) -> BitMask {
    let mut child = BitMask::zeros(a.len);
    for (c, (&wa, &wb)) in child.words.iter_mut().zip(a.words.iter().zip(&b.words)) {
        let pick: u64 = rng.random();
        *c = (wa & pick) | (wb & !pick);
    }
    child
}

fn mutate(mask: &mut BitMask, rate: f64, rng: &mut ChaCha8Rng) {
    // Geometric gap sampling: one uniform draw per flipped bit instead of
    // one per bit.
    let ln_keep = (1.0 - rate).ln();
    let mut pos = 0usize;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / ln_keep) as usize;
        pos = match pos.checked_add(skip) {
            Some(p) => p,
            None => break,
        };
        if pos >= mask.len {
            break;
        }
        mask.flip(pos);
        pos += 1;
    }
}

/// Ranks population indices best-first; ties broken by genome then index so
/// elite selection is a total order.
fn ranked(pop: &[BitMask], fits: &[f64]) -> Vec<usize> {
    let mut rank: Vec<usize> = (0..pop.len()).collect();
    rank.sort_by(|&a, &b| {
        fits[a]
            .total_cmp(&fits[b])
            .then_with(|| pop[a].words.cmp(&pop[b].words))
            .then(a.cmp(&b))
    });
    rank
}

pub(crate) fn run_bipartition(
    view: &EnsembleView<'_>,
    seeds: Vec<BitMask>,
    cfg: &GaConfig,
    seed: u64,
) -> Result<GroupingReport> {
    cfg.validate()?;
    let count = view.len();
    if count < 2 {
        return Err(Error::EmptyInput { what: "bipartition needs at least two states" });
    }
    let total = if count >= 2 * view.dim() {
        let all: Vec<usize> = (0..count).collect();
        let mut mat = DMatrix::zeros(view.dim(), view.dim());
        accumulate_members(view, &all, &mut mat);
        Some(mat)
    } else {
        None
    };
    let ctx = FitnessCtx { view, total };
    let rate = cfg.mutation.unwrap_or(1.0 / count as f64);

    let mut pop: Vec<BitMask> = Vec::with_capacity(cfg.population);
    for mut m in seeds.into_iter().take(cfg.population) {
        m.canonicalize();
        if !m.is_degenerate() {
            pop.push(m);
        }
    }
    for slot in pop.len()..cfg.population {
        let mut rng = child_rng(seed, 0, slot);
        pop.push(BitMask::random(count, &mut rng));
    }
    let mut fits = eval_all(&ctx, &pop)?;

    let mut rank = ranked(&pop, &fits);
    let mut best_fit = fits[rank[0]];
    let mut best_mask = pop[rank[0]].clone();
    let mut stagnant = 0usize;

    for generation in 1..=cfg.max_generations {
        let mut next: Vec<BitMask> =
            rank.iter().take(cfg.elitism).map(|&i| pop[i].clone()).collect();
        for slot in cfg.elitism..cfg.population {
            let mut rng = child_rng(seed, generation, slot);
            let p1 = tournament_pick(&mut rng, &fits, cfg.tournament);
            let p2 = tournament_pick(&mut rng, &fits, cfg.tournament);
            let mut child = crossover(&pop[p1], &pop[p2], &mut rng);
            mutate(&mut child, rate, &mut rng);
            child.canonicalize();
            next.push(child);
        }
        pop = next;
        fits = eval_all(&ctx, &pop)?;
        rank = ranked(&pop, &fits);
        let gen_fit = fits[rank[0]];
        if gen_fit < best_fit {
            if best_fit - gen_fit > IMPROVE_EPS {
                stagnant = 0;
            } else {
                stagnant += 1;
            }
            best_fit = gen_fit;
            best_mask = pop[rank[0]].clone();
        } else {
            stagnant += 1;
        }
        if stagnant >= cfg.stagnation_limit {
            break;
        }
    }

    if cfg.polish {
        polish_mask(&ctx, &mut best_mask)?;
    }
    let (zeros, ones) = best_mask.split_indices();
    grouping_stats(view, &[zeros, ones])
}

/// First-improvement descent: repeatedly move single members across the
/// split while that lowers the average entropy. Deterministic; rebuilds the
/// side sums each pass so incremental round-off cannot accumulate.
fn polish_mask(ctx: &FitnessCtx<'_>, mask: &mut BitMask) -> Result<()> {
    let view = ctx.view;
    let dim = view.dim();
    let count = view.len();
    let mut sides = [DMatrix::<C64>::zeros(dim, dim), DMatrix::<C64>::zeros(dim, dim)];
    let mut cand = [DMatrix::<C64>::zeros(dim, dim), DMatrix::<C64>::zeros(dim, dim)];
    let mut buf = vec![C64::ZERO; dim];
    for _pass in 0..MAX_POLISH_PASSES {
        let (zeros, ones) = mask.split_indices();
        let mut sizes = [zeros.len(), ones.len()];
        accumulate_members(view, &zeros, &mut sides[0]);
        accumulate_members(view, &ones, &mut sides[1]);
        let h0 = spectrum_entropy_scaled(&sides[0], 1.0 / sizes[0] as f64)?;
        let h1 = spectrum_entropy_scaled(&sides[1], 1.0 / sizes[1] as f64)?;
        let mut h_cur =
            (sizes[0] as f64 * h0 + sizes[1] as f64 * h1) / count as f64;
        let mut improved = false;
        for k in 0..count {
            let from = mask.get(k) as usize;
            let to = 1 - from;
            if sizes[from] == 1 {
                continue;
            }
            let amps = match view.state_slice(k) {
                Some(s) => s,
                None => {
                    view.copy_state_into(k, &mut buf);
                    &buf[..]
                }
            };
            cand[from].copy_from(&sides[from]);
            accumulate_outer(&mut cand[from], amps, -1.0);
            mirror_lower(&mut cand[from]);
            cand[to].copy_from(&sides[to]);
            accumulate_outer(&mut cand[to], amps, 1.0);
            mirror_lower(&mut cand[to]);
            let hf = spectrum_entropy_scaled(&cand[from], 1.0 / (sizes[from] - 1) as f64)?;
            let ht = spectrum_entropy_scaled(&cand[to], 1.0 / (sizes[to] + 1) as f64)?;
            let h_new = ((sizes[from] - 1) as f64 * hf + (sizes[to] + 1) as f64 * ht)
                / count as f64;
            if h_new < h_cur - IMPROVE_EPS {
                sides[from].copy_from(&cand[from]);
                sides[to].copy_from(&cand[to]);
                sizes[from] -= 1;
                sizes[to] += 1;
                mask.flip(k);
                h_cur = h_new;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    mask.canonicalize();
    Ok(())
}

/// Branch mask of each single step, the `l = 1` temporal groupings; injected
/// into the initial population so the search never loses to them.
fn temporal_seed_masks(t: usize) -> Vec<BitMask> {
    (1..=t)
        .map(|s| {
            let mut m = BitMask::zeros(1 << t);
            for k in 0..1usize << t {
                if k >> (t - s) & 1 == 1 {
                    m.set(k, true);
                }
            }
            m
        })
        .collect()
}

/// Searches bipartitions of a history ensemble for the lowest average
/// conditional entropy. The initial population contains every single-step
/// branch grouping, so the result is never worse than the best temporal
/// `l = 1` grouping. Deterministic given `seed`.
pub fn genetic_bipartition(
    ens: &HistoryEnsemble,
    cfg: &GaConfig,
    seed: u64,
) -> Result<GroupingReport> {
    let view = ens.view();
    run_bipartition(&view, temporal_seed_masks(ens.steps()), cfg, seed)
}

/// [`genetic_bipartition`] over a plain batch of states (purely random
/// initial population).
pub fn genetic_bipartition_states(
    ens: &HaarEnsemble,
    cfg: &GaConfig,
    seed: u64,
) -> Result<GroupingReport> {
    run_bipartition(&ens.view(), Vec::new(), cfg, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_masks_keep_member_zero_in_group_zero() {
        let mut m = BitMask::zeros(130);
        m.set(0, true);
        m.set(5, true);
        m.set(129, true);
        m.canonicalize();
        assert!(!m.get(0));
        assert!(!m.get(5));
        assert!(!m.get(129));
        assert!(m.get(1));
        assert!(m.get(128));
        assert_eq!(m.count_ones(), 127);
    }

    #[test]
    fn random_masks_are_never_degenerate() {
        for len in [2usize, 3, 64, 65] {
            for s in 0..50 {
                let mut rng = child_rng(s, 0, 0);
                let m = BitMask::random(len, &mut rng);
                assert!(!m.is_degenerate(), "len {len} seed {s}");
                assert!(!m.get(0));
            }
        }
    }

    #[test]
    fn mutation_rate_matches_expectation() {
        let len = 4096;
        let rate = 0.01;
        let mut flips = 0usize;
        for s in 0..200 {
            let mut m = BitMask::zeros(len);
            let mut rng = child_rng(s, 1, 1);
            mutate(&mut m, rate, &mut rng);
            flips += m.count_ones();
        }
        let mean = flips as f64 / 200.0;
        let expect = len as f64 * rate;
        // ~41 flips expected per genome, 200 repeats: generous 5-sigma band.
        assert!((mean - expect).abs() < 5.0 * (expect / 200.0f64).sqrt() + 1.0);
    }

    #[test]
    fn temporal_seed_masks_split_on_one_step_bit() {
        let masks = temporal_seed_masks(3);
        assert_eq!(masks.len(), 3);
        for (i, m) in masks.iter().enumerate() {
            let s = i + 1;
            assert_eq!(m.count_ones(), 4);
            for k in 0..8usize {
                assert_eq!(m.get(k), k >> (3 - s) & 1 == 1, "step {s} history {k}");
            }
        }
    }
}
