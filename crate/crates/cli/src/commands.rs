//! The experiment subcommands: each one computes a curve through the
//! library, then writes a data file plus a gnuplot script next to it.

use crate::config::{PerturbChoice, RunConfig};
use crate::output::{fmt_f64, write_csv, write_json, write_text};
use anyhow::{bail, Result};
use bakerlab::analytic::{
    halfspace_eigenvalues, partition_entropy, product_tradeoff, s_bounds, sphere_tradeoff,
    HalfspaceParams, PartitionMode, SphereModelParams, TradeoffMode,
};
use bakerlab::baker::BakerMap;
use bakerlab::hyper::{s_series, tradeoff_curve, EnsembleMeta, GaConfig, GroupingMethod, SPoint};
use bakerlab::perturb::evolve_histories_with;
use bakerlab::signatures::{entropy_growth_with, fidelity_decay};
use bakerlab::PureState;
use std::path::{Path, PathBuf};

fn artifact(cfg: &RunConfig, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    Ok(cfg.out_dir.join(name))
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn entropy(cfg: &RunConfig) -> Result<()> {
    let map = BakerMap::new(cfg.n_qubits, cfg.map_index)?;
    let spec = cfg.perturbation_spec()?;
    let psi0 = PureState::all_zeros(cfg.n_qubits);
    let series = entropy_growth_with(&psi0, &map, &spec, cfg.t_max, &cfg.evolve_options())?;

    let rows: Vec<Vec<String>> =
        series.iter().map(|(t, v)| vec![t.to_string(), fmt_f64(v)]).collect();
    let csv = artifact(cfg, "entropy.csv")?;
    write_csv(&csv, &cfg.meta_pairs("entropy"), &["t", "H"], &rows)?;
    announce(&csv);

    let gp = artifact(cfg, "entropy.gp")?;
    write_text(
        &gp,
        "set datafile separator \",\"\n\
         set xlabel \"t\"\n\
         set ylabel \"H (bits)\"\n\
         set key left top\n\
         plot \"entropy.csv\" using 1:2 with linespoints title \"H(t)\"\n",
    )?;
    announce(&gp);
    Ok(())
}

pub fn fidelity(cfg: &RunConfig) -> Result<()> {
    let map = BakerMap::new(cfg.n_qubits, cfg.map_index)?;
    let spec = cfg.perturbation_spec()?;
    let psi0 = PureState::all_zeros(cfg.n_qubits);
    let series = fidelity_decay(&psi0, &map, &spec, cfg.t_max)?;

    let rows: Vec<Vec<String>> =
        series.iter().map(|(t, v)| vec![t.to_string(), fmt_f64(v)]).collect();
    let csv = artifact(cfg, "fidelity.csv")?;
    write_csv(&csv, &cfg.meta_pairs("fidelity"), &["t", "F"], &rows)?;
    announce(&csv);

    let gp = artifact(cfg, "fidelity.gp")?;
    write_text(
        &gp,
        "set datafile separator \",\"\n\
         set xlabel \"t\"\n\
         set ylabel \"F\"\n\
         set logscale y\n\
         set key left bottom\n\
         plot \"fidelity.csv\" using 1:2 with linespoints title \"F(t)\"\n",
    )?;
    announce(&gp);
    Ok(())
}

fn ensemble_meta(cfg: &RunConfig, steps: usize) -> EnsembleMeta {
    EnsembleMeta {
        n_qubits: cfg.n_qubits,
        map_index: cfg.map_index,
        steps,
        perturbation: cfg.pert.to_string(),
        alpha: match cfg.pert {
            PerturbChoice::Rotation => Some(cfg.alpha),
            PerturbChoice::XFlip => None,
        },
    }
}

fn method_name(m: GroupingMethod) -> &'static str {
    match m {
        GroupingMethod::Temporal => "temporal",
        GroupingMethod::Genetic => "genetic",
        GroupingMethod::Exhaustive => "exhaustive",
    }
}

pub fn tradeoff(cfg: &RunConfig) -> Result<()> {
    let map = BakerMap::new(cfg.n_qubits, cfg.map_index)?;
    let spec = cfg.perturbation_spec()?;
    let psi0 = PureState::all_zeros(cfg.n_qubits);
    let ens = evolve_histories_with(&psi0, &map, &spec, cfg.t_max, &cfg.evolve_options())?;

    let mut curve = tradeoff_curve(&ens, &cfg.grouping, &GaConfig::default(), cfg.seed)?;
    curve.ensemble = Some(ensemble_meta(cfg, cfg.t_max));

    let json = artifact(cfg, "tradeoff.json")?;
    write_json(&json, cfg.meta_json("tradeoff"), serde_json::to_value(&curve)?)?;
    announce(&json);

    let mut meta = cfg.meta_pairs("tradeoff");
    meta.push(("H_S".into(), fmt_f64(curve.h_s)));
    if let Some(s) = curve.s {
        meta.push(("s".into(), fmt_f64(s)));
    }
    if let Some(m) = curve.s_method {
        meta.push(("s-method".into(), method_name(m).into()));
    }
    let rows: Vec<Vec<String>> = curve
        .points
        .iter()
        .map(|p| {
            let steps = p.steps.as_ref().map_or(String::new(), |s| {
                s.iter().map(ToString::to_string).collect::<Vec<_>>().join("+")
            });
            vec![method_name(p.method).into(), steps, fmt_f64(p.information), fmt_f64(p.avg_entropy)]
        })
        .collect();
    let csv = artifact(cfg, "tradeoff.csv")?;
    write_csv(&csv, &meta, &["method", "steps", "I", "H"], &rows)?;
    announce(&csv);

    let mut plot_parts = Vec::new();
    for &m in &cfg.grouping {
        let name = method_name(m);
        let style = match m {
            GroupingMethod::Temporal => "with linespoints",
            _ => "with points pt 7 ps 2",
        };
        plot_parts.push(format!(
            "\"tradeoff.csv\" using (strcol(1) eq \"{name}\" ? $3 : 1/0):4 {style} title \"{name}\""
        ));
    }
    let gp = artifact(cfg, "tradeoff.gp")?;
    write_text(
        &gp,
        &format!(
            "set datafile separator \",\"\n\
             set xlabel \"I (bits)\"\n\
             set ylabel \"H (bits)\"\n\
             set key right top\n\
             plot {}\n",
            plot_parts.join(", \\\n     ")
        ),
    )?;
    announce(&gp);
    Ok(())
}

pub fn s_series_cmd(cfg: &RunConfig) -> Result<()> {
    if cfg.t_from < 1 || cfg.t_from > cfg.t_max {
        bail!("t-from = {} must lie in 1..=t ({})", cfg.t_from, cfg.t_max);
    }
    let map = BakerMap::new(cfg.n_qubits, cfg.map_index)?;
    let spec = cfg.perturbation_spec()?;
    let psi0 = PureState::all_zeros(cfg.n_qubits);
    let opts = cfg.evolve_options();

    let mut columns: Vec<(GroupingMethod, Vec<SPoint>)> = Vec::new();
    for &m in &cfg.grouping {
        let ens = evolve_histories_with(&psi0, &map, &spec, 0, &opts)?;
        let pts = s_series(
            ens,
            &map,
            &spec,
            cfg.t_from,
            cfg.t_max,
            m,
            &GaConfig::default(),
            cfg.seed,
            cfg.memory_budget,
        )?;
        columns.push((m, pts));
    }

    let mut header: Vec<String> = vec!["t".into(), "H_S".into()];
    for (m, _) in &columns {
        let name = method_name(*m);
        header.push(format!("H_{name}"));
        header.push(format!("I_{name}"));
        header.push(format!("s_{name}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let count = columns[0].1.len();
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let first = &columns[0].1[i];
        let mut row = vec![first.t.to_string(), fmt_f64(first.h_s)];
        for (_, pts) in &columns {
            row.push(fmt_f64(pts[i].h_at_one_bit));
            row.push(fmt_f64(pts[i].information));
            row.push(fmt_f64(pts[i].s));
        }
        rows.push(row);
    }
    let csv = artifact(cfg, "s_series.csv")?;
    write_csv(&csv, &cfg.meta_pairs("s-series"), &header_refs, &rows)?;
    announce(&csv);

    let mut plot_parts = Vec::new();
    for (idx, (m, _)) in columns.iter().enumerate() {
        let col = 5 + idx * 3;
        plot_parts.push(format!(
            "\"s_series.csv\" using 1:{col} with linespoints title \"s ({})\"",
            method_name(*m)
        ));
    }
    let gp = artifact(cfg, "s_series.gp")?;
    write_text(
        &gp,
        &format!(
            "set datafile separator \",\"\n\
             set xlabel \"t\"\n\
             set ylabel \"s\"\n\
             set key left top\n\
             plot {}\n",
            plot_parts.join(", \\\n     ")
        ),
    )?;
    announce(&gp);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveChoice {
    /// Linear trade-off of an ensemble of product states.
    Product,
    /// Sphere-packing trade-off, exact and sparse branches.
    Spheres,
    /// Half-space partition eigenvalues and entropies over n.
    Halfspace,
}

#[derive(clap::Args, Clone, Debug)]
pub struct AnalyticArgs {
    /// Which baseline curve to emit.
    #[arg(long, value_enum)]
    pub curve: CurveChoice,
    /// Hilbert-space dimension D for spheres/halfspace curves.
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    /// Number of random vectors for the spheres curve.
    #[arg(long, default_value_t = 1 << 16)]
    pub vectors: u64,
}

pub fn analytic(cfg: &RunConfig, args: &AnalyticArgs) -> Result<()> {
    let mut meta = cfg.meta_pairs("analytic");
    let bounds = s_bounds(args.dim.max(2))?;
    match args.curve {
        CurveChoice::Product => {
            meta.push(("curve".into(), "product".into()));
            meta.push(("s-product".into(), fmt_f64(bounds.product)));
            let n = cfg.n_qubits;
            let mut rows = Vec::new();
            let steps = n * 20;
            for i in 0..=steps {
                let info = i as f64 * n as f64 / steps as f64;
                rows.push(vec![fmt_f64(info), fmt_f64(product_tradeoff(n, info)?)]);
            }
            let csv = artifact(cfg, "analytic_product.csv")?;
            write_csv(&csv, &meta, &["I", "H"], &rows)?;
            announce(&csv);
            let gp = artifact(cfg, "analytic_product.gp")?;
            write_text(
                &gp,
                "set datafile separator \",\"\n\
                 set xlabel \"I (bits)\"\n\
                 set ylabel \"H (bits)\"\n\
                 plot \"analytic_product.csv\" using 1:2 with lines title \"product ensemble\"\n",
            )?;
            announce(&gp);
        }
        CurveChoice::Spheres => {
            meta.push(("curve".into(), "spheres".into()));
            meta.push(("dim".into(), args.dim.to_string()));
            meta.push(("vectors".into(), args.vectors.to_string()));
            meta.push(("s-spheres".into(), fmt_f64(bounds.spheres)));
            let params = SphereModelParams::new(args.dim, args.vectors, 1.0)?;
            let log_n = (args.vectors as f64).log2();
            let mut rows = Vec::new();
            let steps = ((log_n - 1.0) * 20.0).ceil() as usize;
            for i in 0..=steps {
                let info = 1.0 + (log_n - 1.0) * i as f64 / steps as f64;
                rows.push(vec![
                    fmt_f64(info),
                    fmt_f64(sphere_tradeoff(&params, info, TradeoffMode::Exact)?),
                    fmt_f64(sphere_tradeoff(&params, info, TradeoffMode::Sparse)?),
                ]);
            }
            let csv = artifact(cfg, "analytic_spheres.csv")?;
            write_csv(&csv, &meta, &["I", "H_exact", "H_sparse"], &rows)?;
            announce(&csv);
            let gp = artifact(cfg, "analytic_spheres.gp")?;
            write_text(
                &gp,
                "set datafile separator \",\"\n\
                 set xlabel \"I (bits)\"\n\
                 set ylabel \"H (bits)\"\n\
                 plot \"analytic_spheres.csv\" using 1:2 with lines title \"exact\", \\\n     \
                 \"analytic_spheres.csv\" using 1:3 with lines dashtype 2 title \"sparse\"\n",
            )?;
            announce(&gp);
        }
        CurveChoice::Halfspace => {
            meta.push(("curve".into(), "halfspace".into()));
            meta.push(("dim".into(), args.dim.to_string()));
            meta.push(("s-halfspace".into(), fmt_f64(bounds.halfspace)));
            let mut rows = Vec::new();
            for n in 1..=args.dim / 2 {
                let p = HalfspaceParams::new(n, args.dim)?;
                let e = halfspace_eigenvalues(&p);
                rows.push(vec![
                    n.to_string(),
                    fmt_f64(e.lambda_plus),
                    fmt_f64(e.lambda_minus),
                    fmt_f64(e.lambda_zero),
                    fmt_f64(partition_entropy(&p, PartitionMode::Exact)),
                    fmt_f64(partition_entropy(&p, PartitionMode::Approx)),
                ]);
            }
            let csv = artifact(cfg, "analytic_halfspace.csv")?;
            write_csv(
                &csv,
                &meta,
                &["n", "lambda_plus", "lambda_minus", "lambda_zero", "H_exact", "H_approx"],
                &rows,
            )?;
            announce(&csv);
            let gp = artifact(cfg, "analytic_halfspace.gp")?;
            write_text(
                &gp,
                "set datafile separator \",\"\n\
                 set xlabel \"n\"\n\
                 set ylabel \"H (bits)\"\n\
                 plot \"analytic_halfspace.csv\" using 1:5 with linespoints title \"exact\", \\\n     \
                 \"analytic_halfspace.csv\" using 1:6 with lines dashtype 2 title \"approximation\"\n",
            )?;
            announce(&gp);
        }
    }
    Ok(())
}
