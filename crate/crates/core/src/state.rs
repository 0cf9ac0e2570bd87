//! Pure states, density matrices, and von Neumann entropy.
//!
//! Qubit 1 is the most significant bit of a basis index, so the basis
//! state `|x_1 x_2 ... x_N>` sits at index `sum_l x_l 2^(N-l)`. Entropies
//! are always in bits (base-2 logarithms).

use nalgebra::DMatrix;
use num_complex::{Complex32, Complex64 as C64};

use crate::error::{Error, Result};

pub(crate) const NORM_TOL: f64 = 1e-12;
pub(crate) const HERMITICITY_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGENVALUE_CLAMP, 0)` are rounded up to zero before
/// taking logs; anything more negative is treated as a corrupt density
/// matrix rather than silently clamped.
pub(crate) const EIGENVALUE_CLAMP: f64 = 1e-10;
pub(crate) const SPECTRUM_SUM_TOL: f64 = 1e-9;

/// A normalized state vector on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// The computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `|00...0>`.
    pub fn all_zeros(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0).expect("index 0 always valid")
    }

    /// Builds a state from raw amplitudes, checking normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { left: amps.len(), right: dim });
        }
        let norm = vec_norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amps })
    }

    pub(crate) fn from_amplitudes_unchecked(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amps)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(slice_overlap(&self.amps, &other.amps))
    }
}

pub(crate) fn vec_norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn slice_overlap(bra: &[C64], ket: &[C64]) -> C64 {
    bra.iter().zip(ket).map(|(a, b)| a.conj() * b).sum()
}

/// A trace-one Hermitian matrix. Positivity is enforced lazily: the
/// constructor checks Hermiticity and trace, and any eigenvalue below
/// `-1e-10` surfaces as an error when the spectrum is taken.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { left: mat.nrows(), right: mat.ncols() });
        }
        let max_dev = (0..mat.nrows())
            .flat_map(|i| (i..mat.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| (mat[(i, j)] - mat[(j, i)].conj()).norm())
            .fold(0.0f64, f64::max);
        if max_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_dev });
        }
        let trace = mat.diagonal().iter().map(|z| z.re).sum::<f64>();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        Ok(Self { mat })
    }

    /// `|psi><psi|`.
    pub fn from_pure(state: &PureState) -> Self {
        let d = state.dim();
        let a = state.amps();
        Self {
            mat: DMatrix::from_fn(d, d, |i, j| a[i] * a[j].conj()),
        }
    }

    /// Weighted mixture `sum_i w_i |psi_i><psi_i|`.
    pub fn mixture(states: &[PureState], weights: &[f64]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyInput { what: "mixture states" });
        }
        if states.len() != weights.len() {
            return Err(Error::DimensionMismatch { left: states.len(), right: weights.len() });
        }
        let wsum: f64 = weights.iter().sum();
        if (wsum - 1.0).abs() > SPECTRUM_SUM_TOL || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::BadWeightSum { sum: wsum });
        }
        let dim = states[0].dim();
        let mut mat = DMatrix::zeros(dim, dim);
        for (s, &w) in states.iter().zip(weights) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { left: s.dim(), right: dim });
            }
            accumulate_outer(&mut mat, s.amps(), w);
        }
        mirror_lower(&mut mat);
        Ok(Self { mat })
    }

    /// Equal-weight mixture of the given states.
    pub fn uniform_mixture(states: &[PureState]) -> Result<Self> {
        let w = vec![1.0 / states.len() as f64; states.len()];
        Self::mixture(states, &w)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::from_density(self)
    }
}

/// Accumulates `w * upper_triangle(|amps><amps|)` into `mat`.
pub(crate) fn accumulate_outer(mat: &mut DMatrix<C64>, amps: &[C64], w: f64) {
    for i in 0..amps.len() {
        let ai = amps[i] * w;
        for j in i..amps.len() {
            mat[(i, j)] += ai * amps[j].conj();
        }
    }
}

/// Fills the strict lower triangle with the conjugate of the upper one,
/// making the matrix exactly Hermitian.
pub(crate) fn mirror_lower(mat: &mut DMatrix<C64>) {
    for i in 0..mat.nrows() {
        mat[(i, i)] = C64::new(mat[(i, i)].re, 0.0);
        for j in (i + 1)..mat.ncols() {
            mat[(j, i)] = mat[(i, j)].conj();
        }
    }
}

/// Eigenvalues of a density matrix, descending, clamped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let raw = rho.mat.symmetric_eigenvalues();
        let mut eigenvalues = clamp_eigenvalues(raw.iter().copied())?;
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let sum: f64 = eigenvalues.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::BadSpectrumSum { sum });
        }
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Shannon entropy of the spectrum, in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits_of(&self.eigenvalues)
    }
}

/// Applies the clamping rule to raw eigenvalues: values within
/// `EIGENVALUE_CLAMP` of the `[0, 1]` interval are snapped to it, anything
/// further out is an error.
pub(crate) fn clamp_eigenvalues(raw: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    let raw: Vec<f64> = raw.collect();
    if let Some(&worst) = raw.iter().min_by(|a, b| a.total_cmp(b)) {
        if worst < -EIGENVALUE_CLAMP {
            return Err(Error::NegativeEigenvalue { value: worst });
        }
    }
    if let Some(&top) = raw.iter().max_by(|a, b| a.total_cmp(b)) {
        if top > 1.0 + EIGENVALUE_CLAMP {
            return Err(Error::BadSpectrumSum { sum: top });
        }
    }
    Ok(raw.into_iter().map(|ev| ev.clamp(0.0, 1.0)).collect())
}

pub(crate) fn entropy_bits_of(eigenvalues: &[f64]) -> f64 {
    // max(0.0) turns the -0.0 of a pure spectrum into a plain zero
    (-eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.log2())
        .sum::<f64>())
    .max(0.0)
}

/// Von Neumann entropy of `rho` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(rho.spectrum()?.entropy_bits())
}

/// Borrowed view of a uniform-weight collection of same-dimension state
/// vectors, stored contiguously in either precision. Grouping statistics
/// are written against this view so they work for history ensembles and
/// random ensembles alike.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleView<'a> {
    dim: usize,
    source: ViewSource<'a>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum ViewSource<'a> {
    Double(&'a [C64]),
    Single(&'a [Complex32]),
}

impl<'a> EnsembleView<'a> {
    pub(crate) fn double(dim: usize, amps: &'a [C64]) -> Self {
        debug_assert_eq!(amps.len() % dim, 0);
        Self { dim, source: ViewSource::Double(amps) }
    }

    pub(crate) fn single(dim: usize, amps: &'a [Complex32]) -> Self {
        debug_assert_eq!(amps.len() % dim, 0);
        Self { dim, source: ViewSource::Single(amps) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        match self.source {
            ViewSource::Double(v) => v.len() / self.dim,
            ViewSource::Single(v) => v.len() / self.dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn copy_state_into(&self, k: usize, buf: &mut [C64]) {
        let lo = k * self.dim;
        match self.source {
            ViewSource::Double(v) => buf.copy_from_slice(&v[lo..lo + self.dim]),
            ViewSource::Single(v) => {
                for (b, a) in buf.iter_mut().zip(&v[lo..lo + self.dim]) {
                    *b = C64::new(a.re as f64, a.im as f64);
                }
            }
        }
    }

    /// Zero-copy access, available only for double-precision storage.
    pub fn state_slice(&self, k: usize) -> Option<&'a [C64]> {
        match self.source {
            ViewSource::Double(v) => Some(&v[k * self.dim..(k + 1) * self.dim]),
            ViewSource::Single(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(n_qubits: usize, rng: &mut impl Rng) -> PureState {
        let dim = 1usize << n_qubits;
        let mut amps: Vec<C64> = (0..dim)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = vec_norm(&amps);
        amps.iter_mut().for_each(|a| *a /= norm);
        PureState::from_amplitudes(n_qubits, amps).unwrap()
    }

    #[test]
    fn basis_states_are_orthonormal() {
        for i in 0..8 {
            for j in 0..8 {
                let si = PureState::basis(3, i).unwrap();
                let sj = PureState::basis(3, j).unwrap();
                let ov = si.overlap(&sj).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ov.re, expect, epsilon = 1e-15);
                assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn from_amplitudes_rejects_unnormalized() {
        let amps = vec![c(1.0, 0.0), c(0.1, 0.0)];
        assert!(matches!(
            PureState::from_amplitudes(1, amps),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn pure_state_entropy_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_state(3, &mut rng);
        let rho = DensityMatrix::from_pure(&s);
        let h = von_neumann_entropy(&rho).unwrap();
        assert!(h.abs() < 1e-9, "pure state entropy {h}");
    }

    #[test]
    fn maximally_mixed_entropy_is_log_dim() {
        for n in 1..=4usize {
            let d = 1 << n;
            let mat = DMatrix::from_diagonal_element(d, d, c(1.0 / d as f64, 0.0));
            let rho = DensityMatrix::new(mat).unwrap();
            assert_abs_diff_eq!(
                von_neumann_entropy(&rho).unwrap(),
                n as f64,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn two_outcome_entropy_matches_closed_form() {
        let mat = dmatrix![c(0.75, 0.0), c(0.0, 0.0); c(0.0, 0.0), c(0.25, 0.0)];
        let rho = DensityMatrix::new(mat).unwrap();
        let expect = 2.0 - 0.75 * 3.0f64.log2();
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let states: Vec<PureState> = (0..5).map(|_| random_state(3, &mut rng)).collect();
        let rho = DensityMatrix::uniform_mixture(&states).unwrap();
        let h0 = von_neumann_entropy(&rho).unwrap();

        let gauss = DMatrix::from_fn(8, 8, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let u = gauss.qr().q();
        let rotated = &u * rho.matrix() * u.adjoint();
        let h1 = von_neumann_entropy(&DensityMatrix::new(rotated).unwrap()).unwrap();
        assert_abs_diff_eq!(h0, h1, epsilon = 1e-10);
    }

    #[test]
    fn two_state_mixture_eigenvalues_follow_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let a = random_state(3, &mut rng);
            let b = random_state(3, &mut rng);
            let ov = a.overlap(&b).unwrap().norm();
            let rho = DensityMatrix::uniform_mixture(&[a, b]).unwrap();
            let spec = rho.spectrum().unwrap();
            assert_abs_diff_eq!(spec.eigenvalues()[0], (1.0 + ov) / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(spec.eigenvalues()[1], (1.0 - ov) / 2.0, epsilon = 1e-12);
            for &ev in &spec.eigenvalues()[2..] {
                assert!(ev.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixture_entropy_never_exceeds_log_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let states: Vec<PureState> = (0..4).map(|_| random_state(4, &mut rng)).collect();
        let rho = DensityMatrix::uniform_mixture(&states).unwrap();
        let h = von_neumann_entropy(&rho).unwrap();
        assert!(h <= 2.0 + 1e-12, "mixture of 4 states has entropy {h} > 2");
    }

    #[test]
    fn negative_eigenvalue_within_clamp_is_zeroed() {
        let eps = 5e-11;
        let mat = dmatrix![c(1.0 + eps, 0.0), c(0.0, 0.0); c(0.0, 0.0), c(-eps, 0.0)];
        let rho = DensityMatrix::new(mat).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn negative_eigenvalue_beyond_clamp_errors() {
        let mat = dmatrix![c(1.1, 0.0), c(0.0, 0.0); c(0.0, 0.0), c(-0.1, 0.0)];
        let rho = DensityMatrix::new(mat).unwrap();
        assert!(matches!(
            von_neumann_entropy(&rho),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn non_hermitian_matrix_rejected() {
        let mat = dmatrix![c(0.5, 0.0), c(0.1, 0.0); c(0.3, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            DensityMatrix::new(mat),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn wrong_trace_rejected() {
        let mat = DMatrix::from_diagonal_element(2, 2, c(1.0, 0.0));
        assert!(matches!(DensityMatrix::new(mat), Err(Error::BadTrace { .. })));
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        let s = PureState::all_zeros(2);
        let r = DensityMatrix::mixture(&[s.clone(), s], &[0.3, 0.3]);
        assert!(matches!(r, Err(Error::BadWeightSum { .. })));
    }
}
