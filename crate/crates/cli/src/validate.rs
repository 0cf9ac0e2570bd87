//! `bakerlab validate`: a fast self-check suite that re-derives key
//! quantities through independent routes. Exits nonzero if anything drifts.

use anyhow::{bail, Result};
use bakerlab::analytic::{
    binary_entropy, halfspace_eigenvalues, halfspace_monte_carlo, partition_entropy,
    product_tradeoff, s_bounds, sphere_tradeoff, HalfspaceParams, PartitionMode,
    SphereModelParams, TradeoffMode,
};
use bakerlab::baker::{partial_fourier_state, quarter_turn_gate, BakerMap};
use bakerlab::hyper::{exhaustive_bipartition, genetic_bipartition, temporal_grouping, GaConfig};
use bakerlab::perturb::{evolve_histories, PerturbationSpec};
use bakerlab::signatures::{entropy_growth, fidelity_decay};
use bakerlab::PureState;
use num_complex::Complex64 as C64;
use std::f64::consts::{LN_2, PI};

type Check = (&'static str, fn() -> std::result::Result<(), String>);

fn fail(msg: String) -> std::result::Result<(), String> {
    Err(msg)
}

fn dense_constructions() -> std::result::Result<(), String> {
    for nq in 3..=4 {
        let n1 = BakerMap::new(nq, 1).unwrap();
        let dev = n1
            .dense()
            .unwrap()
            .max_abs_diff(&n1.dense_from_fourier_pair().unwrap());
        if dev > 1e-11 {
            return fail(format!("N={nq} Fourier-pair deviation {dev:.3e}"));
        }
        for n in 1..=nq {
            let map = BakerMap::new(nq, n).unwrap();
            let dev = map
                .dense()
                .unwrap()
                .max_abs_diff(&map.dense_from_shift_factorization().unwrap());
            if dev > 1e-11 {
                return fail(format!("N={nq} n={n} factorization deviation {dev:.3e}"));
            }
        }
    }
    Ok(())
}

fn shift_period() -> std::result::Result<(), String> {
    let dense = BakerMap::new(3, 3).unwrap().dense().unwrap();
    let dev = dense.power(12).max_abs_diff_from_identity();
    if dev > 1e-10 {
        return fail(format!("(B_3,3)^12 deviates from identity by {dev:.3e}"));
    }
    Ok(())
}

fn resolution_bijection() -> std::result::Result<(), String> {
    let nq = 3;
    let bits = |v: usize, len: usize| -> Vec<bool> {
        (0..len).map(|i| (v >> (len - 1 - i)) & 1 == 1).collect()
    };
    for n in 1..=nq {
        let map = BakerMap::new(nq, n).unwrap();
        for x in 0..1usize << n {
            for a in 0..1usize << (nq - n) {
                let x_bits = bits(x, n);
                let a_bits = bits(a, nq - n);
                let mut state = partial_fourier_state(nq, n, &x_bits, &a_bits).unwrap();
                map.apply(&mut state).unwrap();
                let mut a_out = vec![x_bits[0]];
                a_out.extend_from_slice(&a_bits);
                let expect = partial_fourier_state(nq, n - 1, &x_bits[1..], &a_out).unwrap();
                let dev = (state.overlap(&expect).unwrap() - C64::new(1.0, 0.0)).norm();
                if dev > 1e-12 {
                    return fail(format!("n={n} x={x} a={a}: overlap off by {dev:.3e}"));
                }
            }
        }
    }
    Ok(())
}

fn entropy_staircase() -> std::result::Result<(), String> {
    let map = BakerMap::new(5, 5).unwrap();
    let spec = PerturbationSpec::last_qubit_flip(5).unwrap();
    let h = entropy_growth(&PureState::all_zeros(5), &map, &spec, 6).unwrap();
    for (t, v) in h.iter() {
        let expect = (t as f64).min(5.0);
        if (v - expect).abs() > 1e-9 {
            return fail(format!("H({t}) = {v}, expected {expect}"));
        }
    }
    Ok(())
}

fn fidelity_rate() -> std::result::Result<(), String> {
    let alpha = 0.2;
    let (s, c) = (PI * alpha).sin_cos();
    let u = [
        [C64::new(c, 0.0), C64::new(0.0, s)],
        [C64::new(0.0, s), C64::new(c, 0.0)],
    ];
    // exact only while each rotation meets a freshly cycled qubit, i.e. t <= N
    let map = BakerMap::new(3, 3).unwrap();
    let spec = PerturbationSpec::custom(3, 3, u).unwrap();
    let f = fidelity_decay(&PureState::all_zeros(3), &map, &spec, 3).unwrap();

    // the per-step amplitude from a 2x2 product against the shift gate
    let g = quarter_turn_gate();
    let g0 = [g[0][0], g[1][0]];
    let ug0 = [u[0][0] * g0[0] + u[0][1] * g0[1], u[1][0] * g0[0] + u[1][1] * g0[1]];
    let amp = (g0[0].conj() * ug0[0] + g0[1].conj() * ug0[1]).norm();
    let lambda = -2.0 * amp.ln();
    for (t, v) in f.iter() {
        let expect = (-lambda * t as f64).exp();
        if (v - expect).abs() > 1e-9 {
            return fail(format!("F({t}) = {v}, expected {expect}"));
        }
    }
    Ok(())
}

fn temporal_ladder() -> std::result::Result<(), String> {
    let map = BakerMap::new(3, 3).unwrap();
    let spec = PerturbationSpec::last_qubit_flip(3).unwrap();
    let ens = evolve_histories(&PureState::all_zeros(3), &map, &spec, 3).unwrap();
    for l in 0..=3 {
        let tg = temporal_grouping(&ens, l).unwrap();
        let expect = (3 - l) as f64;
        if (tg.report.avg_entropy - expect).abs() > 1e-9 {
            return fail(format!("l={l}: H = {}, expected {expect}", tg.report.avg_entropy));
        }
    }
    Ok(())
}

fn bipartition_search() -> std::result::Result<(), String> {
    let map = BakerMap::new(3, 1).unwrap();
    let spec = PerturbationSpec::middle_y_rotation(3, 0.2).unwrap();
    let ens = evolve_histories(&PureState::all_zeros(3), &map, &spec, 3).unwrap();
    let exact = exhaustive_bipartition(&ens.view()).unwrap();
    let found = genetic_bipartition(&ens, &GaConfig::default(), 5).unwrap();
    let gap = (found.avg_entropy - exact.avg_entropy).abs();
    if gap > 1e-9 {
        return fail(format!(
            "genetic {} vs exhaustive {}",
            found.avg_entropy, exact.avg_entropy
        ));
    }
    Ok(())
}

fn halfspace_fractions() -> std::result::Result<(), String> {
    let p1 = HalfspaceParams::new(1, 4).unwrap();
    let e1 = halfspace_eigenvalues(&p1);
    if (e1.lambda_plus * 4.0 - 1.5).abs() > 1e-14 || (e1.lambda_minus * 4.0 - 0.5).abs() > 1e-14 {
        return fail(format!("n=1: {} / {}", e1.lambda_plus, e1.lambda_minus));
    }
    let e2 = halfspace_eigenvalues(&HalfspaceParams::new(2, 8).unwrap());
    if (e2.lambda_plus * 8.0 - 1.375).abs() > 1e-14 || (e2.lambda_minus * 8.0 - 0.625).abs() > 1e-14
    {
        return fail(format!("n=2: {} / {}", e2.lambda_plus, e2.lambda_minus));
    }
    let mc = halfspace_monte_carlo(&p1, 20_000, 99).unwrap();
    let dev = (mc.lambda_plus.value - e1.lambda_plus)
        .abs()
        .max((mc.lambda_minus.value - e1.lambda_minus).abs());
    if dev > 0.01 {
        return fail(format!("Monte Carlo off by {dev:.4}"));
    }
    Ok(())
}

fn partition_entropy_forms() -> std::result::Result<(), String> {
    let qubit = HalfspaceParams::new(1, 2).unwrap();
    let exact = partition_entropy(&qubit, PartitionMode::Exact);
    let expect = 2.0 - 0.75 * 3.0f64.log2();
    if (exact - expect).abs() > 1e-12 {
        return fail(format!("H(1,2) = {exact}, expected {expect}"));
    }

    // multiplicity sum against the binary-entropy identity
    let p = HalfspaceParams::new(4, 16).unwrap();
    let e = halfspace_eigenvalues(&p);
    let via_sum = partition_entropy(&p, PartitionMode::Exact);
    let via_identity =
        16f64.log2() - (8.0 / 16.0) * (1.0 - binary_entropy(16.0 * e.lambda_plus / 2.0));
    if (via_sum - via_identity).abs() > 1e-12 {
        return fail(format!("routes disagree: {via_sum} vs {via_identity}"));
    }

    let big = HalfspaceParams::new(32, 64).unwrap();
    let gap = (partition_entropy(&big, PartitionMode::Exact)
        - partition_entropy(&big, PartitionMode::Approx))
    .abs();
    if gap > 0.005 {
        return fail(format!("approximation gap {gap}"));
    }
    Ok(())
}

fn sphere_knee() -> std::result::Result<(), String> {
    let params = SphereModelParams::new(32, 1 << 16, 1.0).unwrap();
    let knee = params.knee();
    if (knee - 11.0).abs() > 1e-12 {
        return fail(format!("knee at {knee}"));
    }
    let below = sphere_tradeoff(&params, knee - 1e-9, TradeoffMode::Exact).unwrap();
    let above = sphere_tradeoff(&params, knee + 1e-9, TradeoffMode::Exact).unwrap();
    if (below - above).abs() > 1e-6 {
        return fail(format!("exact mode jumps at the knee: {below} vs {above}"));
    }
    let sparse_high = sphere_tradeoff(&params, 12.0, TradeoffMode::Sparse).unwrap();
    if (sparse_high - 4.0).abs() > 1e-12 {
        return fail(format!("sparse H(12) = {sparse_high}, expected 4"));
    }
    Ok(())
}

fn product_line() -> std::result::Result<(), String> {
    let bounds = s_bounds(32).unwrap();
    let h0 = product_tradeoff(5, 0.0).unwrap();
    let h1 = product_tradeoff(5, 1.0).unwrap();
    let slope = h1 - h0;
    if (slope + 1.0 / bounds.product).abs() > 1e-12 {
        return fail(format!("slope {slope} vs -1/s = {}", -1.0 / bounds.product));
    }
    let expect_halfspace = PI * 32.0 * LN_2;
    if (bounds.halfspace - expect_halfspace).abs() > 1e-10 {
        return fail(format!("halfspace bound {}", bounds.halfspace));
    }
    Ok(())
}

pub fn validate() -> Result<()> {
    let checks: Vec<Check> = vec![
        ("dense-constructions", dense_constructions),
        ("shift-period", shift_period),
        ("resolution-bijection", resolution_bijection),
        ("entropy-staircase", entropy_staircase),
        ("fidelity-rate", fidelity_rate),
        ("temporal-ladder", temporal_ladder),
        ("bipartition-search", bipartition_search),
        ("halfspace-fractions", halfspace_fractions),
        ("partition-entropy", partition_entropy_forms),
        ("sphere-knee", sphere_knee),
        ("product-line", product_line),
    ];
    let mut failures = 0;
    for (name, check) in &checks {
        match check() {
            Ok(()) => println!("ok   {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        bail!("{failures} of {} checks failed", checks.len());
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
