//! Centered discrete Fourier transform on power-of-two blocks.
//!
//! The kernel is `<j|F_M|k> = exp(2 pi i (j+1/2)(k+1/2)/M) / sqrt(M)`;
//! the half-integer offsets make the transform antiperiodic rather than
//! periodic. Expanding `(j+1/2)(k+1/2)` shows it factors into diagonal
//! phases `exp(i pi j/M)` on input and output around a plain DFT with
//! kernel `exp(+2 pi i j k/M)`, times a global `exp(i pi/(2M))`, so the
//! fast path is an ordinary radix-2 transform. `F_1` is the scalar `i`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierDirection {
    Forward,
    Inverse,
}

impl FourierDirection {
    fn sign(self) -> f64 {
        match self {
            FourierDirection::Forward => 1.0,
            FourierDirection::Inverse => -1.0,
        }
    }
}

/// Applies the centered transform to the `block_qubits` least significant
/// qubits of `state`, i.e. `1 (x) F_M` with `M = 2^block_qubits`.
pub fn centered_fourier_apply(
    state: &mut PureState,
    block_qubits: usize,
    direction: FourierDirection,
) -> Result<()> {
    if block_qubits > state.n_qubits() {
        return Err(Error::BadQubitCount {
            n_qubits: block_qubits,
            reason: "transform block exceeds the state",
        });
    }
    let block = 1usize << block_qubits;
    let sign = direction.sign();
    for chunk in state.amps_mut().chunks_exact_mut(block) {
        centered_block(chunk, sign);
    }
    Ok(())
}

/// One centered transform on a single block; `sign` is +1 for forward,
/// -1 for the inverse (conjugate) kernel.
pub(crate) fn centered_block(block: &mut [C64], sign: f64) {
    let m = block.len();
    debug_assert!(m.is_power_of_two());
    let half_step = sign * PI / m as f64;
    for (j, a) in block.iter_mut().enumerate() {
        *a *= C64::from_polar(1.0, half_step * j as f64);
    }
    fft_pow2(block, sign);
    let global = C64::from_polar(1.0 / (m as f64).sqrt(), half_step / 2.0);
    for (k, a) in block.iter_mut().enumerate() {
        *a *= global * C64::from_polar(1.0, half_step * k as f64);
    }
}

/// In-place power-of-two DFT with kernel `exp(sign * 2 pi i j k / n)`,
/// unnormalized.
fn fft_pow2(a: &mut [C64], sign: f64) {
    let n = a.len();
    if n <= 1 {
        return;
    }
    // bit-reversal permutation
    let shift = n.leading_zeros() + 1;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for i in 0..len / 2 {
                let w = C64::from_polar(1.0, ang * i as f64);
                let u = lo[i];
                let v = hi[i] * w;
                lo[i] = u + v;
                hi[i] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Dense centered-DFT matrix by direct kernel summation. Slow by design;
/// it exists as an independent check on the fast path.
pub fn centered_kernel_matrix(block_qubits: usize, direction: FourierDirection) -> DMatrix<C64> {
    let m = 1usize << block_qubits;
    let sign = direction.sign();
    let norm = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, m, |j, k| {
        let phase = sign * 2.0 * PI * (j as f64 + 0.5) * (k as f64 + 0.5) / m as f64;
        C64::from_polar(norm, phase)
    })
}
