//! Stochastic single-qubit perturbations and the ensembles they generate.
//!
//! One evolution step applies the map, then one of two branch unitaries
//! `U_0`, `U_1` on a fixed target qubit. Running `t` steps over every
//! branch choice produces the history ensemble of all `2^t` states
//! `U_{k_t} B ... U_{k_1} B |psi_0>`, indexed so that the step-1 branch
//! is the most significant bit of the history index. States are never
//! renormalized during evolution; norm drift is a bug indicator, not
//! something to paper over.

use num_complex::{Complex32, Complex64 as C64};
use rayon::prelude::*;
use std::io::{Read, Write};

use crate::baker::BakerMap;
use crate::error::{Error, Result};
use crate::state::{accumulate_outer, mirror_lower, DensityMatrix, PureState};

/// Default cap on stored ensemble size: 4 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

const SNAPSHOT_MAGIC: &[u8; 4] = b"BKE1";

/// Which branch of the perturbation was taken at one step.
pub type Branch = u8;

#[derive(Debug, Clone)]
pub enum PerturbationKind {
    /// `U_k = exp(pi i (-1)^k alpha sigma_y)` on the middle qubit; both
    /// branches rotate, in opposite directions.
    MiddleYRotation,
    /// Branch 0 is the identity, branch 1 flips the last qubit.
    LastQubitFlip,
    /// Branch 0 is the identity, branch 1 applies the given unitary.
    Custom([[C64; 2]; 2]),
}

/// A two-branch perturbation acting on one qubit of an N-qubit register.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    kind: PerturbationKind,
    alpha: f64,
    target: usize,
    n_qubits: usize,
}

impl PerturbationSpec {
    /// Opposite y-rotations by `pi * alpha` on the middle qubit. Needs an
    /// odd qubit count so the middle is well defined.
    pub fn middle_y_rotation(n_qubits: usize, alpha: f64) -> Result<Self> {
        if n_qubits.is_multiple_of(2) {
            return Err(Error::EvenQubitCount { n_qubits });
        }
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::BadParameter {
                name: "alpha",
                value: alpha,
                domain: "(0, 0.5)",
            });
        }
        Ok(Self {
            kind: PerturbationKind::MiddleYRotation,
            alpha,
            target: n_qubits.div_ceil(2),
            n_qubits,
        })
    }

    /// Identity or `sigma_x` on the last qubit.
    pub fn last_qubit_flip(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::BadQubitCount { n_qubits, reason: "need at least one qubit" });
        }
        Ok(Self {
            kind: PerturbationKind::LastQubitFlip,
            alpha: 0.0,
            target: n_qubits,
            n_qubits,
        })
    }

    /// Identity or a caller-supplied single-qubit unitary on `target`.
    pub fn custom(n_qubits: usize, target: usize, gate: [[C64; 2]; 2]) -> Result<Self> {
        if target < 1 || target > n_qubits {
            return Err(Error::QubitOutOfRange { qubit: target, n_qubits });
        }
        let max_dev = unitarity_deviation(&gate);
        if max_dev > 1e-12 {
            return Err(Error::NotUnitary { max_dev });
        }
        Ok(Self { kind: PerturbationKind::Custom(gate), alpha: 0.0, target, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// 1-based target qubit.
    pub fn target(&self) -> usize {
        self.target
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> &PerturbationKind {
        &self.kind
    }

    /// The 2x2 unitary applied on branch `k`.
    pub fn unitary(&self, branch: Branch) -> [[C64; 2]; 2] {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match (&self.kind, branch) {
            (PerturbationKind::MiddleYRotation, k) => {
                let theta = if k == 0 {
                    std::f64::consts::PI * self.alpha
                } else {
                    -std::f64::consts::PI * self.alpha
                };
                let (s, c) = theta.sin_cos();
                [
                    [C64::new(c, 0.0), C64::new(s, 0.0)],
                    [C64::new(-s, 0.0), C64::new(c, 0.0)],
                ]
            }
            (PerturbationKind::LastQubitFlip, 0) | (PerturbationKind::Custom(_), 0) => {
                [[one, zero], [zero, one]]
            }
            (PerturbationKind::LastQubitFlip, _) => [[zero, one], [one, zero]],
            (PerturbationKind::Custom(gate), _) => *gate,
        }
    }
}

fn unitarity_deviation(gate: &[[C64; 2]; 2]) -> f64 {
    let mut max_dev = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let s: C64 = gate.iter().map(|row| row[i].conj() * row[j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            max_dev = max_dev.max((s - C64::new(expect, 0.0)).norm());
        }
    }
    max_dev
}

/// Applies a 2x2 gate to one qubit (1-based, most significant first).
pub fn apply_single_qubit(
    state: &mut PureState,
    qubit: usize,
    gate: &[[C64; 2]; 2],
) -> Result<()> {
    let nq = state.n_qubits();
    if qubit < 1 || qubit > nq {
        return Err(Error::QubitOutOfRange { qubit, n_qubits: nq });
    }
    apply_single_qubit_raw(state.amps_mut(), nq, qubit, gate);
    Ok(())
}

fn apply_single_qubit_raw(amps: &mut [C64], n_qubits: usize, qubit: usize, gate: &[[C64; 2]; 2]) {
    let bit = 1usize << (n_qubits - qubit);
    for base in 0..amps.len() {
        if base & bit == 0 {
            let a0 = amps[base];
            let a1 = amps[base | bit];
            amps[base] = gate[0][0] * a0 + gate[0][1] * a1;
            amps[base | bit] = gate[1][0] * a0 + gate[1][1] * a1;
        }
    }
}

/// In-memory precision of a stored ensemble. Evolution always computes in
/// double precision; single is a storage format for large sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoragePrecision {
    Double,
    Single,
}

#[derive(Debug, Clone)]
enum Storage {
    Double(Vec<C64>),
    Single(Vec<Complex32>),
}

impl Storage {
    fn precision(&self) -> StoragePrecision {
        match self {
            Storage::Double(_) => StoragePrecision::Double,
            Storage::Single(_) => StoragePrecision::Single,
        }
    }
}

/// Options for [`evolve_histories_with`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub precision: StoragePrecision,
    pub memory_budget: u64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { precision: StoragePrecision::Double, memory_budget: DEFAULT_MEMORY_BUDGET }
    }
}

/// All `2^t` perturbation-history states after `t` steps, stored as one
/// contiguous history-major amplitude array.
#[derive(Debug, Clone)]
pub struct HistoryEnsemble {
    n_qubits: usize,
    steps: usize,
    storage: Storage,
}

impl HistoryEnsemble {
    /// The t = 0 ensemble holding only the initial state.
    pub fn initial(psi0: &PureState, precision: StoragePrecision) -> Self {
        let storage = match precision {
            StoragePrecision::Double => Storage::Double(psi0.amps().to_vec()),
            StoragePrecision::Single => Storage::Single(
                psi0.amps().iter().map(|a| Complex32::new(a.re as f32, a.im as f32)).collect(),
            ),
        };
        Self { n_qubits: psi0.n_qubits(), steps: 0, storage }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn num_histories(&self) -> usize {
        1 << self.steps
    }

    pub fn precision(&self) -> StoragePrecision {
        self.storage.precision()
    }

    /// Uniform weight of each history.
    pub fn weight(&self) -> f64 {
        1.0 / self.num_histories() as f64
    }

    /// Borrowed view of all history states for grouping statistics.
    pub fn view(&self) -> crate::state::EnsembleView<'_> {
        match &self.storage {
            Storage::Double(v) => crate::state::EnsembleView::double(self.dim(), v),
            Storage::Single(v) => crate::state::EnsembleView::single(self.dim(), v),
        }
    }

    /// Copies history `k` into `buf`, widening if stored single.
    pub fn copy_state_into(&self, k: usize, buf: &mut [C64]) {
        let dim = self.dim();
        debug_assert_eq!(buf.len(), dim);
        match &self.storage {
            Storage::Double(v) => buf.copy_from_slice(&v[k * dim..(k + 1) * dim]),
            Storage::Single(v) => {
                for (b, a) in buf.iter_mut().zip(&v[k * dim..(k + 1) * dim]) {
                    *b = C64::new(a.re as f64, a.im as f64);
                }
            }
        }
    }

    /// History `k` as a state. Single-precision storage is only
    /// approximately normalized after widening.
    pub fn state(&self, k: usize) -> Result<PureState> {
        if k >= self.num_histories() {
            return Err(Error::HistoryOutOfRange { index: k, count: self.num_histories() });
        }
        let mut buf = vec![C64::new(0.0, 0.0); self.dim()];
        self.copy_state_into(k, &mut buf);
        Ok(PureState::from_amplitudes_unchecked(self.n_qubits, buf))
    }

    /// Largest deviation of any history norm from 1.
    pub fn max_norm_drift(&self) -> f64 {
        let dim = self.dim();
        let norms: Vec<f64> = match &self.storage {
            Storage::Double(v) => v
                .par_chunks(dim)
                .map(|c| c.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
                .collect(),
            Storage::Single(v) => v
                .par_chunks(dim)
                .map(|c| c.iter().map(|a| a.norm_sqr() as f64).sum::<f64>().sqrt())
                .collect(),
        };
        norms.into_iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// One more evolution step: apply `map`, branch on both perturbation
    /// unitaries. History `k` of the result extends history `k >> 1` of
    /// `self` with branch bit `k & 1`.
    pub fn step(&self, map: &BakerMap, spec: &PerturbationSpec) -> Result<Self> {
        self.step_with_budget(map, spec, DEFAULT_MEMORY_BUDGET)
    }

    pub fn step_with_budget(
        &self,
        map: &BakerMap,
        spec: &PerturbationSpec,
        memory_budget: u64,
    ) -> Result<Self> {
        if map.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: map.dim(), right: self.dim() });
        }
        if spec.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: 1 << spec.n_qubits(),
                right: self.dim(),
            });
        }
        let histories = 2u64 << self.steps;
        let per_amp = match self.precision() {
            StoragePrecision::Double => 16u64,
            StoragePrecision::Single => 8u64,
        };
        let needed = histories
            .checked_mul(1 << self.n_qubits)
            .and_then(|n| n.checked_mul(per_amp))
            .ok_or(Error::MemoryBudget {
                histories,
                dim: self.dim(),
                needed: u64::MAX,
                budget: memory_budget,
            })?;
        if needed > memory_budget {
            return Err(Error::MemoryBudget {
                histories,
                dim: self.dim(),
                needed,
                budget: memory_budget,
            });
        }

        let dim = self.dim();
        let count = self.num_histories();
        let u0 = spec.unitary(0);
        let u1 = spec.unitary(1);

        let stepped: Result<Vec<Vec<C64>>> = (0..count)
            .into_par_iter()
            .map(|k| {
                let mut parent = vec![C64::new(0.0, 0.0); dim];
                self.copy_state_into(k, &mut parent);
                let mut s = PureState::from_amplitudes_unchecked(self.n_qubits, parent);
                map.apply(&mut s)?;
                let mut pair = s.amps().to_vec();
                pair.extend_from_slice(s.amps());
                apply_single_qubit_raw(&mut pair[..dim], self.n_qubits, spec.target(), &u0);
                apply_single_qubit_raw(&mut pair[dim..], self.n_qubits, spec.target(), &u1);
                Ok(pair)
            })
            .collect();
        let stepped = stepped?;

        let storage = match self.precision() {
            StoragePrecision::Double => {
                let mut flat = Vec::with_capacity(2 * count * dim);
                for pair in &stepped {
                    flat.extend_from_slice(pair);
                }
                Storage::Double(flat)
            }
            StoragePrecision::Single => {
                let mut flat = Vec::with_capacity(2 * count * dim);
                for pair in &stepped {
                    flat.extend(pair.iter().map(|a| Complex32::new(a.re as f32, a.im as f32)));
                }
                Storage::Single(flat)
            }
        };
        Ok(Self { n_qubits: self.n_qubits, steps: self.steps + 1, storage })
    }

    /// Average density matrix `(1/K) sum_k |psi_k><psi_k|`.
    pub fn reduced_state(&self) -> Result<DensityMatrix> {
        let dim = self.dim();
        let count = self.num_histories();
        let w = self.weight();
        let chunk = 1024usize;
        let ranges: Vec<(usize, usize)> = (0..count)
            .step_by(chunk)
            .map(|lo| (lo, (lo + chunk).min(count)))
            .collect();
        let partials: Vec<nalgebra::DMatrix<C64>> = ranges
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = nalgebra::DMatrix::zeros(dim, dim);
                let mut buf = vec![C64::new(0.0, 0.0); dim];
                for k in lo..hi {
                    self.copy_state_into(k, &mut buf);
                    accumulate_outer(&mut acc, &buf, w);
                }
                acc
            })
            .collect();
        let mut total = nalgebra::DMatrix::zeros(dim, dim);
        for p in partials {
            total += p;
        }
        mirror_lower(&mut total);
        DensityMatrix::new(total)
    }

    /// Writes the ensemble in the `BKE1` snapshot format: magic, then
    /// little-endian u32 qubit count, step count, and precision flag
    /// (0 = double, 1 = single), then the raw history-major amplitudes as
    /// little-endian re/im pairs in the stored precision.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&(self.n_qubits as u32).to_le_bytes())?;
        w.write_all(&(self.steps as u32).to_le_bytes())?;
        match &self.storage {
            Storage::Double(v) => {
                w.write_all(&0u32.to_le_bytes())?;
                for a in v {
                    w.write_all(&a.re.to_le_bytes())?;
                    w.write_all(&a.im.to_le_bytes())?;
                }
            }
            Storage::Single(v) => {
                w.write_all(&1u32.to_le_bytes())?;
                for a in v {
                    w.write_all(&a.re.to_le_bytes())?;
                    w.write_all(&a.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    /// Reads a `BKE1` snapshot written by [`write_snapshot`].
    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact_or(&mut r, &mut magic, "missing magic")?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::BadSnapshot { reason: format!("bad magic {magic:?}") });
        }
        let n_qubits = read_u32(&mut r, "qubit count")? as usize;
        let steps = read_u32(&mut r, "step count")? as usize;
        let flag = read_u32(&mut r, "precision flag")?;
        if n_qubits > 30 {
            return Err(Error::BadSnapshot { reason: format!("qubit count {n_qubits} too large") });
        }
        if steps > 40 {
            return Err(Error::BadSnapshot { reason: format!("step count {steps} too large") });
        }
        let amps = (1u64 << steps) * (1u64 << n_qubits);
        let storage = match flag {
            0 => {
                let mut v = Vec::with_capacity(amps as usize);
                let mut buf = [0u8; 16];
                for _ in 0..amps {
                    read_exact_or(&mut r, &mut buf, "truncated payload")?;
                    v.push(C64::new(
                        f64::from_le_bytes(buf[..8].try_into().unwrap()),
                        f64::from_le_bytes(buf[8..].try_into().unwrap()),
                    ));
                }
                Storage::Double(v)
            }
            1 => {
                let mut v = Vec::with_capacity(amps as usize);
                let mut buf = [0u8; 8];
                for _ in 0..amps {
                    read_exact_or(&mut r, &mut buf, "truncated payload")?;
                    v.push(Complex32::new(
                        f32::from_le_bytes(buf[..4].try_into().unwrap()),
                        f32::from_le_bytes(buf[4..].try_into().unwrap()),
                    ));
                }
                Storage::Single(v)
            }
            other => {
                return Err(Error::BadSnapshot { reason: format!("unknown precision flag {other}") })
            }
        };
        let mut probe = [0u8; 1];
        if r.read(&mut probe)? != 0 {
            return Err(Error::BadSnapshot { reason: "trailing bytes after payload".into() });
        }
        Ok(Self { n_qubits, steps, storage })
    }
}

fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact_or(r, &mut buf, what)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::BadSnapshot { reason: format!("truncated: {what}") }
        } else {
            Error::Io(e)
        }
    })
}

/// Evolves the full history ensemble of `psi0` under `map` and `spec` for
/// `steps` steps, in double precision under the default memory budget.
pub fn evolve_histories(
    psi0: &PureState,
    map: &BakerMap,
    spec: &PerturbationSpec,
    steps: usize,
) -> Result<HistoryEnsemble> {
    evolve_histories_with(psi0, map, spec, steps, &EvolveOptions::default())
}

pub fn evolve_histories_with(
    psi0: &PureState,
    map: &BakerMap,
    spec: &PerturbationSpec,
    steps: usize,
    opts: &EvolveOptions,
) -> Result<HistoryEnsemble> {
    if psi0.n_qubits() != map.n_qubits() {
        return Err(Error::DimensionMismatch { left: psi0.dim(), right: map.dim() });
    }
    let mut ens = HistoryEnsemble::initial(psi0, opts.precision);
    for _ in 0..steps {
        ens = ens.step_with_budget(map, spec, opts.memory_budget)?;
    }
    Ok(ens)
}
