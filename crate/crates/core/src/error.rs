use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state norm {norm} is outside the unit-norm tolerance")]
    NotNormalized { norm: f64 },

    #[error("qubit count {n_qubits} is not supported here: {reason}")]
    BadQubitCount { n_qubits: usize, reason: &'static str },

    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("map parameter n = {n} outside 1..={n_qubits}")]
    BadMapIndex { n: usize, n_qubits: usize },

    #[error("matrix is not Hermitian (max deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    #[error("matrix is not unitary (max deviation {max_dev:.3e})")]
    NotUnitary { max_dev: f64 },

    #[error("trace {trace} deviates from 1 beyond tolerance")]
    BadTrace { trace: f64 },

    #[error("eigenvalue {value:.6e} is negative beyond the clamping tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("spectrum sums to {sum}, expected 1 within 1e-9")]
    BadSpectrumSum { sum: f64 },

    #[error("weights sum to {sum}, expected 1")]
    BadWeightSum { sum: f64 },

    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    #[error("middle-qubit rotation needs an odd qubit count, got {n_qubits}")]
    EvenQubitCount { n_qubits: usize },

    #[error(
        "memory budget exceeded: {histories} histories x dim {dim} needs \
         {needed} bytes, budget is {budget}"
    )]
    MemoryBudget { histories: u64, dim: usize, needed: u64, budget: u64 },

    #[error("dense construction refused above {limit} qubits (asked for {n_qubits})")]
    DenseLimit { n_qubits: usize, limit: usize },

    #[error("history index {index} out of range for {count} histories")]
    HistoryOutOfRange { index: usize, count: usize },

    #[error("grouping leaves history {index} unassigned")]
    UnassignedHistory { index: usize },

    #[error("history {index} assigned to more than one group")]
    DoublyAssigned { index: usize },

    #[error("grouping has no groups")]
    NoGroups,

    #[error("subset size {l} out of range for {t} steps")]
    BadSubsetSize { l: usize, t: usize },

    #[error("ensemble of {count} states is too large for exhaustive search (cap {cap})")]
    ExhaustiveTooLarge { count: usize, cap: usize },

    #[error("s is undefined: average group entropy {h_bar} does not fall below H_S = {h_s}")]
    UndefinedS { h_s: f64, h_bar: f64 },

    #[error("achieved information {info} is too far from 1 bit to report s")]
    OffTargetInformation { info: f64 },

    #[error("parameter {name} = {value} outside its domain {domain}")]
    BadParameter { name: &'static str, value: f64, domain: &'static str },

    #[error("snapshot is malformed: {reason}")]
    BadSnapshot { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
