//! The family of quantum baker's maps on N qubits.
//!
//! Member n of the family (1 <= n <= N) is
//!
//! ```text
//! B_{N,n} = G_{n-1} o S_n o G_n^{-1}
//! ```
//!
//! where `G_n = 1_{2^n} (x) F_{2^(N-n)}` is a partial centered Fourier
//! transform acting on the `N-n` least significant qubits and `S_n`
//! cyclically left-shifts the `n` most significant qubits. `n = 1` is the
//! single-transform map and `n = N` is a pure shift-and-rotate map that
//! never entangles product states: it moves every qubit up one slot and
//! sends the first qubit through the quarter-turn gate `C = -i F_2` to
//! the last slot.
//!
//! Every map is also available as a dense matrix, both by running the
//! circuit on each basis column and through two independent algebraic
//! factorizations, so the routes can be checked against each other.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fourier::{centered_fourier_apply, centered_kernel_matrix, FourierDirection};
use crate::state::PureState;

/// Dense constructions are refused above this many qubits unless an
/// explicit limit is given.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

const UNITARITY_TOL: f64 = 1e-10;

/// Cyclic left shift of the `n` most significant qubits:
/// `|x1 x2 .. xn> (x) rest -> |x2 .. xn x1> (x) rest`.
pub fn shift_apply(state: &mut PureState, n: usize) -> Result<()> {
    let nq = state.n_qubits();
    if n < 1 || n > nq {
        return Err(Error::BadMapIndex { n, n_qubits: nq });
    }
    if n == 1 {
        return Ok(());
    }
    let low = nq - n;
    let low_mask = (1usize << low) - 1;
    let top_mask = (1usize << n) - 1;
    let amps = state.amps_mut();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (j, &a) in amps.iter().enumerate() {
        let top = j >> low;
        let rotated = ((top << 1) | (top >> (n - 1))) & top_mask;
        out[(rotated << low) | (j & low_mask)] = a;
    }
    amps.copy_from_slice(&out);
    Ok(())
}

/// One member of the baker's map family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BakerMap {
    n_qubits: usize,
    n: usize,
}

impl BakerMap {
    pub fn new(n_qubits: usize, n: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::BadQubitCount { n_qubits, reason: "need at least one qubit" });
        }
        if n < 1 || n > n_qubits {
            return Err(Error::BadMapIndex { n, n_qubits });
        }
        Ok(Self { n_qubits, n })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// The family index n.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Applies the map in place: inverse partial transform on `N - n`
    /// qubits, shift of the top `n`, forward partial transform on
    /// `N - n + 1` qubits.
    pub fn apply(&self, state: &mut PureState) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: state.dim(),
                right: self.dim(),
            });
        }
        centered_fourier_apply(state, self.n_qubits - self.n, FourierDirection::Inverse)?;
        shift_apply(state, self.n)?;
        centered_fourier_apply(state, self.n_qubits - self.n + 1, FourierDirection::Forward)
    }

    /// Dense matrix of the map, built by running the circuit on every
    /// basis column.
    pub fn dense(&self) -> Result<DenseUnitary> {
        self.dense_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn dense_with_limit(&self, limit: usize) -> Result<DenseUnitary> {
        if self.n_qubits > limit {
            return Err(Error::DenseLimit { n_qubits: self.n_qubits, limit });
        }
        DenseUnitary::from_circuit(self.n_qubits, |s| self.apply(s))
    }

    /// Dense matrix via `F_D o (1_2 (x) F_{D/2}^{-1})`, defined for the
    /// n = 1 member only. Independent of the circuit route.
    pub fn dense_from_fourier_pair(&self) -> Result<DenseUnitary> {
        if self.n != 1 {
            return Err(Error::BadMapIndex { n: self.n, n_qubits: self.n_qubits });
        }
        let full = centered_kernel_matrix(self.n_qubits, FourierDirection::Forward);
        let half = centered_kernel_matrix(self.n_qubits - 1, FourierDirection::Inverse);
        let block = DMatrix::identity(2, 2).kronecker(&half);
        DenseUnitary::new(full * block)
    }

    /// Dense matrix via the factorization
    /// `B_{N,n} = (1_{2^(n-1)} (x) B_{N-n+1,1}) o S_n`.
    pub fn dense_from_shift_factorization(&self) -> Result<DenseUnitary> {
        let inner = BakerMap::new(self.n_qubits - self.n + 1, 1)?.dense_from_fourier_pair()?;
        let eye = DMatrix::identity(1 << (self.n - 1), 1 << (self.n - 1));
        let lifted = eye.kronecker(inner.matrix());
        let shift = DenseUnitary::from_circuit(self.n_qubits, |s| shift_apply(s, self.n))?;
        DenseUnitary::new(lifted * shift.matrix())
    }
}

/// The quarter-turn gate `C = -i F_2 = e^(-i pi/4) e^(i pi sigma_x / 4)`;
/// `C^4 = 1`, and the n = N map sends `|psi_1 .. psi_N>` to
/// `|psi_2 .. psi_N> (x) C|psi_1>`.
pub fn quarter_turn_gate() -> [[C64; 2]; 2] {
    let g = C64::from_polar(1.0 / 2.0f64.sqrt(), -PI / 4.0);
    let gi = g * C64::new(0.0, 1.0);
    [[g, gi], [gi, g]]
}

/// A dense unitary matrix with a validated `U U^dag = 1`.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    mat: DMatrix<C64>,
}

impl DenseUnitary {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { left: mat.nrows(), right: mat.ncols() });
        }
        let gram = mat.adjoint() * &mat;
        let eye = DMatrix::<C64>::identity(mat.nrows(), mat.ncols());
        let max_dev = (gram - eye).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if max_dev > UNITARITY_TOL {
            return Err(Error::NotUnitary { max_dev });
        }
        Ok(Self { mat })
    }

    /// Materializes a circuit as a matrix by applying it to each basis
    /// column of an `n_qubits` register.
    pub fn from_circuit<F>(n_qubits: usize, mut apply: F) -> Result<Self>
    where
        F: FnMut(&mut PureState) -> Result<()>,
    {
        let dim = 1usize << n_qubits;
        let mut mat = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = PureState::basis(n_qubits, col)?;
            apply(&mut s)?;
            for (row, &a) in s.amps().iter().enumerate() {
                mat[(row, col)] = a;
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: state.dim(), right: self.dim() });
        }
        let v = nalgebra::DVector::from_column_slice(state.amps());
        let out = &self.mat * v;
        Ok(PureState::from_amplitudes_unchecked(
            state.n_qubits(),
            out.iter().copied().collect(),
        ))
    }

    /// `self * rhs`: the unitary that applies `rhs` first, then `self`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: rhs.dim() });
        }
        Ok(Self { mat: &self.mat * &rhs.mat })
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    /// `self^k` by binary exponentiation.
    pub fn power(&self, k: usize) -> Self {
        let mut result = Self { mat: DMatrix::identity(self.dim(), self.dim()) };
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result.mat = &result.mat * &base.mat;
            }
            base.mat = &base.mat * &base.mat;
            k >>= 1;
        }
        result
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff_from_identity(&self) -> f64 {
        let eye = DMatrix::<C64>::identity(self.dim(), self.dim());
        (&self.mat - eye).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The partial-Fourier basis state `|a_{N-n} .. a_1 . x_1 .. x_n>`, i.e.
/// the image under `G_n` of the basis state `|x_1 .. x_n a_1 .. a_{N-n}>`.
/// Built directly in product form: the first `n` qubits are sharp bits,
/// each remaining qubit k carries the phase `exp(2 pi i (0.a_{N-k+1} ..
/// a_{N-n} 1))` on its `|1>` component, and the whole state gets the
/// prefactor `exp(i pi (0.a_1 .. a_{N-n} 1))`.
pub fn partial_fourier_state(
    n_qubits: usize,
    n_pos: usize,
    x_bits: &[bool],
    a_bits: &[bool],
) -> Result<PureState> {
    if n_pos > n_qubits {
        return Err(Error::BadMapIndex { n: n_pos, n_qubits });
    }
    if x_bits.len() != n_pos {
        return Err(Error::DimensionMismatch { left: x_bits.len(), right: n_pos });
    }
    if a_bits.len() != n_qubits - n_pos {
        return Err(Error::DimensionMismatch {
            left: a_bits.len(),
            right: n_qubits - n_pos,
        });
    }

    let mut amps = vec![C64::new(1.0, 0.0)];
    for k in 1..=n_qubits {
        let factor: [C64; 2] = if k <= n_pos {
            if x_bits[k - 1] {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            } else {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            }
        } else {
            // bits a_{N-k+1} .. a_{N-n}, then a trailing 1
            let frac = dyadic_fraction(a_bits[(n_qubits - k)..].iter().copied());
            let r = 1.0 / 2.0f64.sqrt();
            [C64::new(r, 0.0), C64::from_polar(r, 2.0 * PI * frac)]
        };
        let mut next = Vec::with_capacity(amps.len() * 2);
        for &a in &amps {
            next.push(a * factor[0]);
            next.push(a * factor[1]);
        }
        amps = next;
    }

    let global = C64::from_polar(1.0, PI * dyadic_fraction(a_bits.iter().copied()));
    amps.iter_mut().for_each(|a| *a *= global);
    Ok(PureState::from_amplitudes_unchecked(n_qubits, amps))
}

/// `0.b_1 b_2 .. b_m 1` as a real number: the bits followed by a final 1.
fn dyadic_fraction(bits: impl Iterator<Item = bool>) -> f64 {
    let mut f = 0.0;
    let mut w = 0.5;
    for b in bits {
        if b {
            f += w;
        }
        w /= 2.0;
    }
    f + w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use crate::state::vec_norm;

    fn bits_msb_first(value: usize, len: usize) -> Vec<bool> {
        (0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect()
    }

    fn random_qubit(rng: &mut impl Rng) -> [C64; 2] {
        let mut v = [
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ];
        let n = vec_norm(&v);
        v.iter_mut().for_each(|a| *a /= n);
        v
    }

    fn product_state(qubits: &[[C64; 2]]) -> PureState {
        let mut amps = vec![C64::new(1.0, 0.0)];
        for q in qubits {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for &a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        PureState::from_amplitudes_unchecked(qubits.len(), amps)
    }

    #[test]
    fn shift_moves_first_bit_to_back() {
        // |100> -> |001> under a full 3-qubit shift
        let mut s = PureState::basis(3, 0b100).unwrap();
        shift_apply(&mut s, 3).unwrap();
        assert_abs_diff_eq!(s.amps()[0b001].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn shift_of_single_qubit_prefix_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let qs: Vec<[C64; 2]> = (0..4).map(|_| random_qubit(&mut rng)).collect();
        let s = product_state(&qs);
        let mut shifted = s.clone();
        shift_apply(&mut shifted, 1).unwrap();
        assert_eq!(s.amps(), shifted.amps());
    }

    #[test]
    fn map_parameters_are_validated() {
        assert!(BakerMap::new(3, 0).is_err());
        assert!(BakerMap::new(3, 4).is_err());
        assert!(BakerMap::new(0, 1).is_err());
        assert!(BakerMap::new(3, 3).is_ok());
    }

    #[test]
    fn dense_circuit_is_unitary_for_all_members() {
        for nq in 1..=4usize {
            for n in 1..=nq {
                let map = BakerMap::new(nq, n).unwrap();
                map.dense().expect("unitarity check inside DenseUnitary::new");
            }
        }
    }

    #[test]
    fn fourier_pair_factorization_matches_circuit() {
        for nq in 2..=4usize {
            let map = BakerMap::new(nq, 1).unwrap();
            let dev = map.dense().unwrap().max_abs_diff(&map.dense_from_fourier_pair().unwrap());
            assert!(dev < 1e-12, "N={nq}: deviation {dev:e}");
        }
    }

    #[test]
    fn shift_factorization_matches_circuit() {
        for nq in 2..=4usize {
            for n in 1..=nq {
                let map = BakerMap::new(nq, n).unwrap();
                let dev = map
                    .dense()
                    .unwrap()
                    .max_abs_diff(&map.dense_from_shift_factorization().unwrap());
                assert!(dev < 1e-12, "N={nq} n={n}: deviation {dev:e}");
            }
        }
    }

    #[test]
    fn product_form_matches_applied_partial_transform() {
        let nq = 3;
        for n_pos in 0..=nq {
            for x in 0..1usize << n_pos {
                for a in 0..1usize << (nq - n_pos) {
                    let x_bits = bits_msb_first(x, n_pos);
                    let a_bits = bits_msb_first(a, nq - n_pos);
                    let product =
                        partial_fourier_state(nq, n_pos, &x_bits, &a_bits).unwrap();
                    assert_abs_diff_eq!(product.norm(), 1.0, epsilon = 1e-12);

                    let mut applied =
                        PureState::basis(nq, (x << (nq - n_pos)) | a).unwrap();
                    centered_fourier_apply(&mut applied, nq - n_pos, FourierDirection::Forward)
                        .unwrap();
                    let ov = product.overlap(&applied).unwrap();
                    assert!(
                        (ov - C64::new(1.0, 0.0)).norm() < 1e-12,
                        "n={n_pos} x={x} a={a}: overlap {ov}"
                    );
                }
            }
        }
    }

    #[test]
    fn sharpest_states_are_position_states_times_i() {
        let s = partial_fourier_state(2, 2, &[true, false], &[]).unwrap();
        for (j, &amp) in s.amps().iter().enumerate() {
            let expect = if j == 0b10 { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) };
            assert!((amp - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn map_sends_resolution_n_states_to_resolution_n_minus_1() {
        let nq = 3;
        for n in 1..=nq {
            let map = BakerMap::new(nq, n).unwrap();
            for x in 0..1usize << n {
                for a in 0..1usize << (nq - n) {
                    let x_bits = bits_msb_first(x, n);
                    let a_bits = bits_msb_first(a, nq - n);
                    let mut state =
                        partial_fourier_state(nq, n, &x_bits, &a_bits).unwrap();
                    map.apply(&mut state).unwrap();

                    // the leading position bit becomes the freshest momentum bit
                    let mut a_out = vec![x_bits[0]];
                    a_out.extend_from_slice(&a_bits);
                    let expect =
                        partial_fourier_state(nq, n - 1, &x_bits[1..], &a_out).unwrap();
                    let ov = state.overlap(&expect).unwrap();
                    assert!(
                        (ov - C64::new(1.0, 0.0)).norm() < 1e-12,
                        "n={n} x={x} a={a}: overlap {ov}"
                    );
                }
            }
        }
    }

    #[test]
    fn shift_map_cycles_qubits_through_quarter_turn() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let qs: Vec<[C64; 2]> = (0..3).map(|_| random_qubit(&mut rng)).collect();
        let mut state = product_state(&qs);
        BakerMap::new(3, 3).unwrap().apply(&mut state).unwrap();

        let c = quarter_turn_gate();
        let c_q0 = [
            c[0][0] * qs[0][0] + c[0][1] * qs[0][1],
            c[1][0] * qs[0][0] + c[1][1] * qs[0][1],
        ];
        let expect = product_state(&[qs[1], qs[2], c_q0]);
        for (a, b) in state.amps().iter().zip(expect.amps()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn quarter_turn_has_period_four() {
        let c = quarter_turn_gate();
        let m = DMatrix::from_fn(2, 2, |i, j| c[i][j]);
        let m4 = &m * &m * &m * &m;
        let dev = (&m4 - DMatrix::<C64>::identity(2, 2))
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(dev < 1e-15);
    }

    #[test]
    fn shift_map_has_period_four_n() {
        let map = BakerMap::new(3, 3).unwrap();
        let dev = map.dense().unwrap().power(12).max_abs_diff_from_identity();
        assert!(dev < 1e-12, "deviation {dev:e}");
    }

    #[test]
    fn dense_limit_is_enforced() {
        let map = BakerMap::new(5, 1).unwrap();
        assert!(matches!(
            map.dense_with_limit(4),
            Err(Error::DenseLimit { .. })
        ));
    }
}
