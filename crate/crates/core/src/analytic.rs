//! Closed-form baselines for the information-entropy trade-off: the
//! sphere-grouping model for random vectors, the half-space bipartition of
//! Hilbert space, and the product-basis grouping of qubit states — plus a
//! Monte Carlo sampler validating the half-space spectrum.

use crate::error::{Error, Result};
use crate::state::{accumulate_outer, mirror_lower};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

/// Shannon entropy (bits) of a {p, 1-p} split.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Sphere-grouping model: `n_vec` random vectors in dimension `dim`, grouped
/// by spheres of Hilbert-space angle `phi`.
#[derive(Clone, Copy, Debug)]
pub struct SphereModelParams {
    dim: usize,
    n_vec: u64,
    phi: f64,
}

impl SphereModelParams {
    pub fn new(dim: usize, n_vec: u64, phi: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadParameter {
                name: "dim",
                value: dim as f64,
                domain: "integers >= 2",
            });
        }
        if n_vec < dim as u64 {
            return Err(Error::BadParameter {
                name: "n_vec",
                value: n_vec as f64,
                domain: "n_vec >= dim",
            });
        }
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::BadParameter { name: "phi", value: phi, domain: "[0, pi/2]" });
        }
        Ok(SphereModelParams { dim, n_vec, phi })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vec(&self) -> u64 {
        self.n_vec
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `log2(n_vec / dim)`: the information at which sphere filling crosses
    /// one vector per dimension.
    pub fn knee(&self) -> f64 {
        (self.n_vec as f64).log2() - (self.dim as f64).log2()
    }
}

/// Number of radius-`phi` spheres needed to cover the unit sphere in
/// dimension `dim`: `(sin^2 phi)^-(dim-1)`.
pub fn sphere_count(dim: usize, phi: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::BadParameter { name: "dim", value: dim as f64, domain: "integers >= 2" });
    }
    if !(phi > 0.0 && phi <= FRAC_PI_2) {
        return Err(Error::BadParameter { name: "phi", value: phi, domain: "(0, pi/2]" });
    }
    Ok(phi.sin().powi(2).powi(-(dim as i32 - 1)))
}

/// Entropy (bits) of a uniform mixture over a radius-`phi` sphere of states:
/// one eigenvalue `lambda0 = 1 - ((dim-1)/dim) sin^2 phi` along the center,
/// the rest degenerate.
pub fn sphere_entropy(dim: usize, phi: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::BadParameter { name: "dim", value: dim as f64, domain: "integers >= 2" });
    }
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::BadParameter { name: "phi", value: phi, domain: "[0, pi/2]" });
    }
    let d = dim as f64;
    let lambda0 = 1.0 - (d - 1.0) / d * phi.sin().powi(2);
    Ok(binary_entropy(lambda0) + (1.0 - lambda0) * (d - 1.0).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TradeoffMode {
    /// Sphere mixtures evaluated through their full spectrum.
    Exact,
    /// Leading-order form for a sparse collection (`log2 n_vec << dim`).
    Sparse,
}

/// Average entropy left after buying `info` bits against the sphere
/// grouping, i.e. the model trade-off curve H(I).
///
/// Both modes switch branches at the knee `I = log2(n_vec/dim)`, below which
/// each sphere holds more vectors than dimensions. The exact mode is
/// continuous there; the sparse mode's branches meet only up to its
/// leading-order error (worst right at the knee). Sparse mode logs a warning
/// outside its `log2 n_vec <= dim/4` comfort zone rather than refusing.
pub fn sphere_tradeoff(params: &SphereModelParams, info: f64, mode: TradeoffMode) -> Result<f64> {
    let d = params.dim as f64;
    let log_n = (params.n_vec as f64).log2();
    if !(1.0..=log_n).contains(&info) {
        return Err(Error::BadParameter {
            name: "info",
            value: info,
            domain: "[1, log2(n_vec)]",
        });
    }
    let knee = params.knee();
    match mode {
        TradeoffMode::Exact => {
            if info <= knee {
                // Big spheres: same spectrum as sphere_entropy at the angle
                // where sphere_count = 2^info.
                let lambda0 = 1.0 - (d - 1.0) / d * 2f64.powf(-info / (d - 1.0));
                Ok(binary_entropy(lambda0) + (1.0 - lambda0) * (d - 1.0).log2())
            } else {
                // Sparse spheres: n_vec/2^info vectors inside each sphere.
                let per_sphere = params.n_vec as f64 * 2f64.powf(-info);
                let lambda = 1.0 - 2f64.powf(-info / (d - 1.0)) * (1.0 - 1.0 / per_sphere);
                let rest =
                    if per_sphere > 1.0 { (1.0 - lambda) * (per_sphere - 1.0).log2() } else { 0.0 };
                Ok(binary_entropy(lambda) + rest)
            }
        }
        TradeoffMode::Sparse => {
            if log_n > d / 4.0 {
                log::warn!(
                    "sparse trade-off outside its validity range: log2(n_vec) = {log_n} > dim/4 = {}",
                    d / 4.0
                );
            }
            if info <= knee {
                Ok(d.log2() - ((1.0 + info * LN_2) * (1.0 + info * LN_2).log2() - info) / d)
            } else {
                Ok(log_n - info)
            }
        }
    }
}

/// Half-space bipartition geometry: two n-dimensional reference subspaces
/// inside dimension `dim`, states assigned to the nearer one.
#[derive(Clone, Copy, Debug)]
pub struct HalfspaceParams {
    n: usize,
    dim: usize,
}

impl HalfspaceParams {
    pub fn new(n: usize, dim: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadParameter { name: "n", value: n as f64, domain: "integers >= 1" });
        }
        if 2 * n > dim {
            return Err(Error::BadParameter {
                name: "dim",
                value: dim as f64,
                domain: "dim >= 2n",
            });
        }
        Ok(HalfspaceParams { n, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Spectrum of the conditional mixture over one half-space: `lambda_plus`
/// (n-fold, on the near subspace), `lambda_minus` (n-fold, far subspace),
/// `lambda_zero = 1/dim` (rest).
#[derive(Clone, Copy, Debug)]
pub struct HalfspaceEigenvalues {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub lambda_zero: f64,
}

/// `prod_{k=1..n} (2k-1)/(2k)`, the anisotropy ratio of the half-space
/// spectrum. (Equals Gamma(n+1/2)/(sqrt(pi) n!); the running product is
/// exact at small n and immune to factorial overflow.)
fn halfspace_ratio(n: usize) -> f64 {
    (1..=n).map(|k| (2 * k - 1) as f64 / (2 * k) as f64).product()
}

pub fn halfspace_eigenvalues(params: &HalfspaceParams) -> HalfspaceEigenvalues {
    let d = params.dim as f64;
    let r = halfspace_ratio(params.n);
    HalfspaceEigenvalues {
        lambda_plus: (1.0 + r) / d,
        lambda_minus: (1.0 - r) / d,
        lambda_zero: 1.0 / d,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionMode {
    Exact,
    /// Large-dimension form `log2 dim - 1/(pi dim ln 2)`.
    Approx,
}

/// Entropy (bits) of the half-space conditional mixture.
pub fn partition_entropy(params: &HalfspaceParams, mode: PartitionMode) -> f64 {
    let d = params.dim as f64;
    match mode {
        PartitionMode::Exact => {
            let eig = halfspace_eigenvalues(params);
            let n = params.n as f64;
            let term = |lambda: f64, mult: f64| {
                if mult > 0.0 && lambda > 0.0 {
                    -mult * lambda * lambda.log2()
                } else {
                    0.0
                }
            };
            term(eig.lambda_plus, n)
                + term(eig.lambda_minus, n)
                + term(eig.lambda_zero, d - 2.0 * n)
        }
        PartitionMode::Approx => d.log2() - 1.0 / (PI * d * LN_2),
    }
}

/// Entropy left after `info` bits bought against the product-basis grouping
/// of `n_qubits` qubits: `H = N - ((3/4) log2 3 - 1) I`.
pub fn product_tradeoff(n_qubits: usize, info: f64) -> Result<f64> {
    if n_qubits == 0 {
        return Err(Error::BadParameter {
            name: "n_qubits",
            value: 0.0,
            domain: "integers >= 1",
        });
    }
    let n = n_qubits as f64;
    if !(0.0..=n).contains(&info) {
        return Err(Error::BadParameter { name: "info", value: info, domain: "[0, n_qubits]" });
    }
    Ok(n - product_slope() * info)
}

/// `(3/4) log2 3 - 1`, the per-bit entropy cost of the product grouping.
fn product_slope() -> f64 {
    0.75 * 3f64.log2() - 1.0
}

/// The three model predictions for the hypersensitivity parameter at
/// dimension `dim`.
#[derive(Clone, Copy, Debug)]
pub struct SBounds {
    /// Sphere grouping: `dim / ((1+ln2) log2(1+ln2) - 1)`, about 3.5 dim.
    pub spheres: f64,
    /// Half-space bipartition: `pi dim ln2`, about 2.2 dim.
    pub halfspace: f64,
    /// Product grouping: `4 / (3 log2 3 - 4)`, about 5.3, dimension-free.
    pub product: f64,
}

pub fn s_bounds(dim: usize) -> Result<SBounds> {
    if dim < 2 {
        return Err(Error::BadParameter { name: "dim", value: dim as f64, domain: "integers >= 2" });
    }
    let d = dim as f64;
    Ok(SBounds {
        spheres: d / ((1.0 + LN_2) * (1.0 + LN_2).log2() - 1.0),
        halfspace: PI * d * LN_2,
        product: 4.0 / (3.0 * 3f64.log2() - 4.0),
    })
}

/// A sampled mean with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Empirical half-space spectrum from rejection sampling.
///
/// Two routes are reported: projector means (`tr(rho P)/n` per sample, with
/// i.i.d. standard errors) and block means of the eigenvalues of the
/// accumulated empirical mixture. `*_zero` entries are absent when the two
/// reference subspaces fill the whole space.
#[derive(Clone, Debug)]
pub struct HalfspaceMonteCarlo {
    pub samples: usize,
    pub lambda_plus: Estimate,
    pub lambda_minus: Estimate,
    pub lambda_zero: Option<Estimate>,
    pub eig_plus: f64,
    pub eig_minus: f64,
    pub eig_zero: Option<f64>,
}

/// Draws Haar-random states, keeps those nearer the first reference subspace
/// than the second (`|P- psi| <= |P+ psi|`), and estimates the half-space
/// spectrum from `samples` accepted states. Deterministic given `seed`.
pub fn halfspace_monte_carlo(
    params: &HalfspaceParams,
    samples: usize,
    seed: u64,
) -> Result<HalfspaceMonteCarlo> {
    if samples < 2 {
        return Err(Error::BadParameter {
            name: "samples",
            value: samples as f64,
            domain: "integers >= 2",
        });
    }
    let n = params.n;
    let dim = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut psi = vec![C64::ZERO; dim];
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    // Running sums of the per-sample projector weights and their squares.
    let mut sum = [0.0f64; 3];
    let mut sum_sq = [0.0f64; 3];
    let mut accepted = 0usize;
    while accepted < samples {
        let mut norm_sq = 0.0;
        for a in psi.iter_mut() {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            *a = C64::new(re, im);
            norm_sq += a.norm_sqr();
        }
        let p_plus: f64 = psi[..n].iter().map(C64::norm_sqr).sum::<f64>() / norm_sq;
        let p_minus: f64 = psi[n..2 * n].iter().map(C64::norm_sqr).sum::<f64>() / norm_sq;
        if p_minus > p_plus {
            continue;
        }
        accepted += 1;
        let p_zero = 1.0 - p_plus - p_minus;
        for (i, p) in [p_plus, p_minus, p_zero].into_iter().enumerate() {
            sum[i] += p;
            sum_sq[i] += p * p;
        }
        let inv_norm = norm_sq.sqrt().recip();
        for a in psi.iter_mut() {
            *a *= inv_norm;
        }
        accumulate_outer(&mut rho, &psi, 1.0 / samples as f64);
    }
    mirror_lower(&mut rho);

    let m = samples as f64;
    let estimate = |i: usize, mult: usize| {
        let mean = sum[i] / m;
        let var = (sum_sq[i] / m - mean * mean).max(0.0) / (m - 1.0);
        Estimate { value: mean / mult as f64, std_err: var.sqrt() / mult as f64 }
    };
    let mut eig: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let block_mean = |range: std::ops::Range<usize>| {
        let len = range.len() as f64;
        eig[range].iter().sum::<f64>() / len
    };
    let has_zero = dim > 2 * n;
    Ok(HalfspaceMonteCarlo {
        samples,
        lambda_plus: estimate(0, n),
        lambda_minus: estimate(1, n),
        lambda_zero: has_zero.then(|| estimate(2, dim - 2 * n)),
        eig_plus: block_mean(0..n),
        eig_minus: block_mean(dim - n..dim),
        eig_zero: has_zero.then(|| block_mean(n..dim - n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::entropy_bits_of;

    #[test]
    fn sphere_count_examples() {
        assert!((sphere_count(7, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((sphere_count(2, PI / 4.0).unwrap() - 2.0).abs() < 1e-15);
        // Angle at which exactly two spheres fit.
        let dim = 5;
        let phi_d = (0.5f64.powf(1.0 / (2.0 * (dim as f64 - 1.0)))).asin();
        assert!((sphere_count(dim, phi_d).unwrap() - 2.0).abs() < 1e-12);
        assert!(sphere_count(2, 0.0).is_err());
        assert!(sphere_count(2, FRAC_PI_2 + 0.1).is_err());
        assert!(sphere_count(1, 1.0).is_err());
    }

    #[test]
    fn sphere_entropy_endpoints_and_spectrum_route() {
        assert_eq!(sphere_entropy(8, 0.0).unwrap(), 0.0);
        assert!((sphere_entropy(32, FRAC_PI_2).unwrap() - 5.0).abs() < 1e-12);
        // Independent route: build the full spectrum and take its entropy.
        let dim = 32;
        let phi = PI / 3.0;
        let lambda0 = 1.0 - (31.0 / 32.0) * 0.75;
        let mut spectrum = vec![lambda0];
        spectrum.extend(std::iter::repeat_n((1.0 - lambda0) / 31.0, 31));
        let want = entropy_bits_of(&spectrum);
        assert!((sphere_entropy(dim, phi).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn sphere_tradeoff_sparse_endpoint_and_knee() {
        let p = SphereModelParams::new(32, 1 << 16, FRAC_PI_2).unwrap();
        assert_eq!(p.knee(), 11.0);
        let end = sphere_tradeoff(&p, 16.0, TradeoffMode::Sparse).unwrap();
        assert!(end.abs() < 1e-12);
        // Above the knee the sparse branch is the straight line log2(N) - I.
        let h = sphere_tradeoff(&p, 13.0, TradeoffMode::Sparse).unwrap();
        assert!((h - 3.0).abs() < 1e-12);
        // Below it, the near-maximal branch stays under log2 dim.
        let h = sphere_tradeoff(&p, 5.0, TradeoffMode::Sparse).unwrap();
        assert!(h < 5.0 && h > 4.0);
        assert!(sphere_tradeoff(&p, 0.5, TradeoffMode::Sparse).is_err());
        assert!(sphere_tradeoff(&p, 16.5, TradeoffMode::Sparse).is_err());
    }

    #[test]
    fn sphere_tradeoff_exact_is_continuous_and_decreasing() {
        let p = SphereModelParams::new(32, 1 << 16, FRAC_PI_2).unwrap();
        let knee = p.knee();
        let lo = sphere_tradeoff(&p, knee - 1e-9, TradeoffMode::Exact).unwrap();
        let at = sphere_tradeoff(&p, knee, TradeoffMode::Exact).unwrap();
        let hi = sphere_tradeoff(&p, knee + 1e-9, TradeoffMode::Exact).unwrap();
        assert!((lo - at).abs() < 1e-6);
        assert!((hi - at).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        let mut i = 1.0;
        while i <= 16.0 {
            let h = sphere_tradeoff(&p, i, TradeoffMode::Exact).unwrap();
            assert!(h <= prev + 1e-12, "H rose at I = {i}");
            assert!(h >= -1e-12);
            prev = h;
            i += 0.25;
        }
    }

    #[test]
    fn sphere_tradeoff_modes_agree_deep_in_validity() {
        // log2(n_vec) = 16 <= 256/4, well inside the sparse regime.
        let p = SphereModelParams::new(256, 1 << 16, FRAC_PI_2).unwrap();
        let knee = p.knee();
        assert_eq!(knee, 8.0);
        let mut worst = 0.0f64;
        let mut i = 1.0;
        while i <= knee {
            let a = sphere_tradeoff(&p, i, TradeoffMode::Exact).unwrap();
            let b = sphere_tradeoff(&p, i, TradeoffMode::Sparse).unwrap();
            worst = worst.max((a - b).abs());
            i += 0.25;
        }
        assert!(worst < 0.1, "max exact/sparse gap {worst}");
    }

    #[test]
    fn halfspace_eigenvalue_fractions() {
        let e = halfspace_eigenvalues(&HalfspaceParams::new(1, 4).unwrap());
        assert!((e.lambda_plus - 3.0 / 8.0).abs() < 1e-14);
        assert!((e.lambda_minus - 1.0 / 8.0).abs() < 1e-14);
        assert!((e.lambda_zero - 0.25).abs() < 1e-14);
        let e = halfspace_eigenvalues(&HalfspaceParams::new(2, 16).unwrap());
        assert!((e.lambda_plus - 11.0 / (8.0 * 16.0)).abs() < 1e-14);
        assert!((e.lambda_minus - 5.0 / (8.0 * 16.0)).abs() < 1e-14);
        assert!(HalfspaceParams::new(3, 4).is_err());
        assert!(HalfspaceParams::new(0, 4).is_err());
    }

    #[test]
    fn halfspace_spectrum_sums_to_one() {
        for dim in [2usize, 4, 6, 16, 32, 64] {
            for n in 1..=dim / 2 {
                let p = HalfspaceParams::new(n, dim).unwrap();
                let e = halfspace_eigenvalues(&p);
                let total = n as f64 * (e.lambda_plus + e.lambda_minus)
                    + (dim - 2 * n) as f64 * e.lambda_zero;
                assert!((total - 1.0).abs() < 1e-14, "n={n} dim={dim}: {total}");
                assert!(e.lambda_plus > e.lambda_zero && e.lambda_zero > e.lambda_minus);
            }
        }
    }

    #[test]
    fn partition_entropy_qubit_value_and_closed_form() {
        let h = partition_entropy(&HalfspaceParams::new(1, 2).unwrap(), PartitionMode::Exact);
        assert!((h - (2.0 - 0.75 * 3f64.log2())).abs() < 1e-12);
        // Same quantity through the binary-entropy closed form.
        for (n, dim) in [(1usize, 2usize), (1, 8), (2, 8), (4, 32), (16, 32)] {
            let p = HalfspaceParams::new(n, dim).unwrap();
            let exact = partition_entropy(&p, PartitionMode::Exact);
            let e = halfspace_eigenvalues(&p);
            let d = dim as f64;
            let closed = d.log2()
                - (2.0 * n as f64 / d) * (1.0 - binary_entropy(d * e.lambda_plus / 2.0));
            assert!((exact - closed).abs() < 1e-12, "n={n} dim={dim}");
        }
    }

    #[test]
    fn partition_entropy_decreases_in_n_and_approaches_approx() {
        let mut prev = f64::INFINITY;
        for n in 1..=8usize {
            let h = partition_entropy(&HalfspaceParams::new(n, 16).unwrap(), PartitionMode::Exact);
            assert!(h < prev, "not decreasing at n={n}");
            prev = h;
        }
        for (dim, tol) in [(64usize, 0.005), (256, 0.002)] {
            let p = HalfspaceParams::new(dim / 2, dim).unwrap();
            let gap = (partition_entropy(&p, PartitionMode::Exact)
                - partition_entropy(&p, PartitionMode::Approx))
            .abs();
            assert!(gap < tol, "dim={dim}: gap {gap}");
        }
    }

    #[test]
    fn product_tradeoff_line() {
        assert_eq!(product_tradeoff(5, 0.0).unwrap(), 5.0);
        let want = 5.0 - 5.0 * (0.75 * 3f64.log2() - 1.0);
        assert!((product_tradeoff(5, 5.0).unwrap() - want).abs() < 1e-12);
        let slope = product_tradeoff(5, 1.0).unwrap() - product_tradeoff(5, 0.0).unwrap();
        assert!((slope + 0.188_721_875_540_867_06).abs() < 1e-15);
        assert!(product_tradeoff(5, 5.1).is_err());
        assert!(product_tradeoff(5, -0.1).is_err());
        assert!(product_tradeoff(0, 0.0).is_err());
    }

    #[test]
    fn s_bound_values() {
        let b = s_bounds(32).unwrap();
        assert!((b.halfspace - 69.682_754_889_715_26).abs() < 1e-10);
        assert!((b.spheres / 32.0 - 3.4929).abs() < 1e-4);
        assert!((b.product - 5.2988).abs() < 1e-4);
        // Product bound is the inverse of the product trade-off slope.
        assert!((b.product - 1.0 / (0.75 * 3f64.log2() - 1.0)).abs() < 1e-12);
        for dim in [2usize, 8, 32, 1024] {
            let b = s_bounds(dim).unwrap();
            assert!(b.halfspace < b.spheres);
            let c = s_bounds(2 * dim).unwrap();
            assert!((c.product - b.product).abs() < 1e-15);
        }
        assert!(s_bounds(1).is_err());
    }

    #[test]
    fn monte_carlo_matches_closed_form() {
        let p = HalfspaceParams::new(1, 4).unwrap();
        let mc = halfspace_monte_carlo(&p, 20_000, 7).unwrap();
        let e = halfspace_eigenvalues(&p);
        for (est, want) in [
            (mc.lambda_plus, e.lambda_plus),
            (mc.lambda_minus, e.lambda_minus),
            (mc.lambda_zero.unwrap(), e.lambda_zero),
        ] {
            assert!(
                (est.value - want).abs() < 4.0 * est.std_err,
                "estimate {} +- {} vs {}",
                est.value,
                est.std_err,
                want
            );
            assert!(est.std_err > 0.0 && est.std_err < 0.01);
        }
        assert!((mc.eig_plus - e.lambda_plus).abs() < 0.01);
        assert!((mc.eig_minus - e.lambda_minus).abs() < 0.01);
        assert!((mc.eig_zero.unwrap() - e.lambda_zero).abs() < 0.01);
    }

    #[test]
    fn monte_carlo_full_split_has_no_zero_block() {
        let p = HalfspaceParams::new(2, 4).unwrap();
        let mc = halfspace_monte_carlo(&p, 5_000, 3).unwrap();
        assert!(mc.lambda_zero.is_none());
        assert!(mc.eig_zero.is_none());
        let e = halfspace_eigenvalues(&p);
        assert!((mc.lambda_plus.value - e.lambda_plus).abs() < 4.0 * mc.lambda_plus.std_err);
        assert!((mc.lambda_minus.value - e.lambda_minus).abs() < 4.0 * mc.lambda_minus.std_err);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let p = HalfspaceParams::new(2, 8).unwrap();
        let a = halfspace_monte_carlo(&p, 2_000, 11).unwrap();
        let b = halfspace_monte_carlo(&p, 2_000, 11).unwrap();
        assert_eq!(a.lambda_plus.value.to_bits(), b.lambda_plus.value.to_bits());
        assert_eq!(a.eig_minus.to_bits(), b.eig_minus.to_bits());
        let c = halfspace_monte_carlo(&p, 2_000, 12).unwrap();
        assert_ne!(a.lambda_plus.value.to_bits(), c.lambda_plus.value.to_bits());
    }
}
