//! Time series that witness chaos: ensemble entropy growth and fidelity
//! decay under repeated perturbation.

use crate::baker::BakerMap;
use crate::error::{Error, Result};
use crate::perturb::{
    apply_single_qubit, evolve_histories_with, EvolveOptions, PerturbationSpec,
};
use crate::state::{slice_overlap, PureState};

/// A scalar signal sampled at t = 0, 1, .., t_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    values: Vec<f64>,
}

impl SignalSeries {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn t_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, t: usize) -> Option<f64> {
        self.values.get(t).copied()
    }

    /// `(t, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }
}

/// Entropy (in bits) of the average state of the history ensemble after
/// each step, starting from `H(0) = 0`.
pub fn entropy_growth(
    psi0: &PureState,
    map: &BakerMap,
    spec: &PerturbationSpec,
    t_max: usize,
) -> Result<SignalSeries> {
    entropy_growth_with(psi0, map, spec, t_max, &EvolveOptions::default())
}

pub fn entropy_growth_with(
    psi0: &PureState,
    map: &BakerMap,
    spec: &PerturbationSpec,
    t_max: usize,
    opts: &EvolveOptions,
) -> Result<SignalSeries> {
    let mut ens = evolve_histories_with(psi0, map, spec, 0, opts)?;
    let mut values = Vec::with_capacity(t_max + 1);
    values.push(ens.reduced_state()?.spectrum()?.entropy_bits());
    for _ in 1..=t_max {
        ens = ens.step_with_budget(map, spec, opts.memory_budget)?;
        values.push(ens.reduced_state()?.spectrum()?.entropy_bits());
    }
    Ok(SignalSeries { values })
}

/// Fidelity between the unperturbed trajectory and the trajectory that
/// takes perturbation branch 1 on every step:
/// `F(t) = |<psi_0| (B^dag U_1^dag)^t B^t |psi_0>|^2`.
pub fn fidelity_decay(
    psi0: &PureState,
    map: &BakerMap,
    spec: &PerturbationSpec,
    t_max: usize,
) -> Result<SignalSeries> {
    if psi0.n_qubits() != map.n_qubits() || spec.n_qubits() != map.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: map.dim(),
        });
    }
    let u1 = spec.unitary(1);
    let mut unpert = psi0.clone();
    let mut pert = psi0.clone();
    let mut values = Vec::with_capacity(t_max + 1);
    values.push(1.0);
    for _ in 1..=t_max {
        map.apply(&mut unpert)?;
        map.apply(&mut pert)?;
        apply_single_qubit(&mut pert, spec.target(), &u1)?;
        values.push(slice_overlap(pert.amps(), unpert.amps()).norm_sqr());
    }
    Ok(SignalSeries { values })
}

/// Least-squares fit of `ln value` against `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `ln v(t) = intercept + slope * t` over `t = 0..=t_hi`. All fitted
/// values must be positive.
pub fn log_linear_fit(series: &SignalSeries, t_hi: usize) -> Result<LogLinearFit> {
    let n = t_hi + 1;
    if series.values.len() < n {
        return Err(Error::IndexOutOfRange { index: t_hi, dim: series.values.len() });
    }
    let ys: Vec<f64> = series.values[..n]
        .iter()
        .map(|&v| {
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(Error::BadParameter {
                    name: "series value",
                    value: v,
                    domain: "(0, inf) for a log fit",
                })
            }
        })
        .collect::<Result<_>>()?;

    let nf = n as f64;
    let mean_x = (n - 1) as f64 / 2.0;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (t, &y) in ys.iter().enumerate() {
        let dx = t as f64 - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::BadParameter {
            name: "fit range",
            value: t_hi as f64,
            domain: "at least two points",
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LogLinearFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    #[test]
    fn flip_perturbed_shift_map_gains_one_bit_per_step() {
        let map = BakerMap::new(3, 3).unwrap();
        let spec = PerturbationSpec::last_qubit_flip(3).unwrap();
        let h = entropy_growth(&PureState::all_zeros(3), &map, &spec, 5).unwrap();
        for (t, v) in h.iter() {
            let expect = (t as f64).min(3.0);
            assert_abs_diff_eq!(v, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn entropy_starts_at_zero() {
        let map = BakerMap::new(3, 1).unwrap();
        let spec = PerturbationSpec::middle_y_rotation(3, 0.2).unwrap();
        let h = entropy_growth(&PureState::all_zeros(3), &map, &spec, 2).unwrap();
        assert!(h.get(0).unwrap().abs() < 1e-12);
    }

    fn x_rotation(alpha: f64) -> [[C64; 2]; 2] {
        // exp(i pi alpha sigma_x)
        let (s, c) = (PI * alpha).sin_cos();
        [
            [C64::new(c, 0.0), C64::new(0.0, s)],
            [C64::new(0.0, s), C64::new(c, 0.0)],
        ]
    }

    #[test]
    fn shift_map_fidelity_decays_exponentially() {
        let alpha = 0.2;
        let map = BakerMap::new(3, 3).unwrap();
        let spec = PerturbationSpec::custom(3, 3, x_rotation(alpha)).unwrap();
        let f = fidelity_decay(&PureState::all_zeros(3), &map, &spec, 3).unwrap();

        // decay rate from a 2x2 evaluation of the perturbation against the
        // quarter-turn gate, and independently from the closed form
        let c = crate::baker::quarter_turn_gate();
        let u = x_rotation(alpha);
        let mut cuc0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let gates: [&[[C64; 2]; 2]; 2] = [&c, &u];
        for g in gates {
            cuc0 = [
                g[0][0] * cuc0[0] + g[0][1] * cuc0[1],
                g[1][0] * cuc0[0] + g[1][1] * cuc0[1],
            ];
        }
        // <0|C^dag U C|0> = conj(C|0>) . (U C|0>)
        let c0 = [c[0][0], c[1][0]];
        let amp = c0[0].conj() * cuc0[0] + c0[1].conj() * cuc0[1];
        assert_abs_diff_eq!(amp.norm(), (PI * alpha).cos(), epsilon = 1e-14);

        let lambda = -2.0 * amp.norm().ln();
        for (t, v) in f.iter() {
            assert_abs_diff_eq!(v, (-lambda * t as f64).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn log_fit_recovers_exact_exponential() {
        let lambda = 0.42;
        let series = SignalSeries::from_values(
            (0..6).map(|t| (-lambda * t as f64).exp()).collect(),
        );
        let fit = log_linear_fit(&series, 5).unwrap();
        assert_abs_diff_eq!(fit.slope, -lambda, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn log_fit_rejects_nonpositive_values() {
        let series = SignalSeries::from_values(vec![1.0, 0.0]);
        assert!(log_linear_fit(&series, 1).is_err());
    }

    #[test]
    fn fidelity_stays_in_unit_interval() {
        let map = BakerMap::new(5, 1).unwrap();
        let spec = PerturbationSpec::middle_y_rotation(5, 0.2).unwrap();
        let f = fidelity_decay(&PureState::all_zeros(5), &map, &spec, 8).unwrap();
        assert_abs_diff_eq!(f.get(0).unwrap(), 1.0, epsilon = 1e-15);
        for (_, v) in f.iter() {
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }
}
