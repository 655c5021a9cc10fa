//! Command implementations: theory sweeps and simulation drivers.

use std::path::Path;

use rayon::prelude::*;

use hdkde::kernels::GammaKernel as GenericGammaKernel;
use hdkde::numeric::stats::moments;
use hdkde::rem::{analyze, simulate, GaussianEnergySampler, GaussianRate, RemSpec};
use hdkde::sim::{
    d_min_statistics, fluctuation_study, EmpiricalKlProtocol, ExperimentConfig,
};
use hdkde::{kl, phase, GammaKernel, SpectralDensity};

use crate::config::{resolved_value, ConfigFile, RemConfig};
use crate::error::CliError;
use crate::output::{fmt, histogram, write_atomic, CsvDoc, RunManifest};

fn kernel(gamma: f64) -> Result<GammaKernel, CliError> {
    GenericGammaKernel::new(gamma).map_err(CliError::Core)
}

fn comment_config(doc: &mut CsvDoc, manifest: &RunManifest) {
    doc.comment(format!("command: {}", manifest.command));
    doc.comment(format!("library_version: {}", manifest.library_version));
    doc.comment(format!("seed: {}", manifest.seed));
    doc.comment(format!(
        "config: {}",
        serde_json::to_string(&manifest.config).expect("config echo")
    ));
}

/// `phase`: one row per α with both transition lines, the optimal
/// bandwidth, and the squared columns matching the usual figure axes.
/// With a fixed bandwidth the sweep additionally classifies (α, h) and
/// appends the per-h columns (regime, m*, D, f).
pub fn cmd_phase(
    alphas: &[f64],
    gamma: f64,
    at_h: Option<f64>,
    spectrum: &SpectralDensity,
    out: &Path,
) -> Result<(), CliError> {
    if alphas.is_empty() {
        return Err(CliError::Usage("phase: need at least one alpha".into()));
    }
    let kernel = kernel(gamma)?;
    let rows: Vec<Result<Vec<String>, CliError>> = alphas
        .par_iter()
        .map(|&alpha| {
            let ctx = || CliError::context(format!("phase sweep failed at alpha = {alpha}"));
            let h_clt = phase::h_clt(alpha, &kernel, spectrum).map_err(ctx())?;
            let h_g = phase::h_g(alpha, &kernel, spectrum).map_err(ctx())?;
            let (h_opt, _) = kl::h_opt(alpha, &kernel, spectrum).map_err(ctx())?;
            let mut fields = vec![
                fmt(alpha),
                fmt(h_clt),
                fmt(h_g),
                fmt(h_opt),
                fmt(h_clt * h_clt),
                fmt(h_g * h_g),
                fmt(h_opt * h_opt),
            ];
            if let Some(h) = at_h {
                let point = phase::classify(alpha, h, &kernel, spectrum).map_err(ctx())?;
                fields.push(point.regime.to_string());
                fields.push(point.m_star.map(fmt).unwrap_or_default());
                fields.push(fmt(point.d_value));
                fields.push(fmt(point.free_entropy));
            }
            Ok(fields)
        })
        .collect();
    let mut columns = vec![
        "alpha", "h_clt", "h_g", "h_opt", "h_clt_sq", "h_g_sq", "h_opt_sq",
    ];
    if at_h.is_some() {
        columns.extend(["regime", "m_star", "d_value", "free_entropy"]);
    }
    let mut doc = CsvDoc::new(&columns);
    doc.comment(format!("phase boundaries, gamma = {gamma}"));
    if let Some(h) = at_h {
        doc.comment(format!("per-h classification at h = {}", fmt(h)));
    }
    for row in rows {
        doc.row(&row?);
    }
    write_atomic(out, &doc.render())
}

/// `kl-curve`: theory KL curves, one column block per kernel exponent.
pub fn cmd_kl_curve(
    alpha: f64,
    h_grid: &[f64],
    gammas: &[f64],
    spectrum: &SpectralDensity,
    out: &Path,
) -> Result<(), CliError> {
    if gammas.is_empty() {
        return Err(CliError::Usage("kl-curve: need at least one gamma".into()));
    }
    if h_grid.is_empty() {
        return Err(CliError::Usage("kl-curve: empty bandwidth grid".into()));
    }
    let kernels: Vec<GammaKernel> = gammas
        .iter()
        .map(|&g| kernel(g))
        .collect::<Result<_, _>>()?;
    let mut columns = vec!["h".to_string()];
    for &g in gammas {
        columns.push(format!("dkl_g{g}"));
        columns.push(format!("phase_g{g}"));
        columns.push(format!("m_used_g{g}"));
    }
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Result<Vec<String>, CliError>> = h_grid
        .par_iter()
        .map(|&h| {
            let mut fields = vec![fmt(h)];
            for k in &kernels {
                let point = kl::dkl(alpha, h, k, spectrum)
                    .map_err(CliError::context(format!("kl-curve failed at h = {h}")))?;
                fields.push(fmt(point.dkl_per_d));
                fields.push(point.phase.to_string());
                fields.push(fmt(point.m_used));
            }
            Ok(fields)
        })
        .collect();
    let mut doc = CsvDoc::new(&column_refs);
    doc.comment(format!("theory KL curves, alpha = {alpha}"));
    for row in rows {
        doc.row(&row?);
    }
    write_atomic(out, &doc.render())
}

pub fn cmd_simulate_fluctuations(
    raw: &ConfigFile,
    experiment: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(
        "simulate --mode fluctuations",
        seed,
        resolved_value(raw, Some(experiment), seed),
    );
    let study = fluctuation_study(experiment)?;

    let mut doc = CsvDoc::new(&[
        "trial",
        "log_rho_over_d",
        "z",
        "g",
        "l_stable",
        "y2",
        "y3",
        "d_min_sq_over_d",
    ]);
    comment_config(&mut doc, &manifest);
    doc.comment(format!("alpha: {}", fmt(study.alpha)));
    doc.comment(format!(
        "annealed_log_over_d: {}",
        fmt(study.annealed_log_over_d)
    ));
    doc.comment(format!(
        "typical_log_over_d: {}",
        fmt(study.typical_log_over_d)
    ));
    for i in 0..study.log_rho_over_d.len() {
        doc.row(&[
            i.to_string(),
            fmt(study.log_rho_over_d[i]),
            fmt(study.z[i]),
            fmt(study.g[i]),
            fmt(study.l_stable[i]),
            fmt(study.y2[i]),
            fmt(study.y3[i]),
            fmt(study.d_min_sq_over_d[i]),
        ]);
    }
    let data_path = out_dir.join("fluctuations.csv");
    write_atomic(&data_path, &doc.render())?;
    manifest.record(&data_path);

    let mut hist = CsvDoc::new(&["bin_left", "bin_right", "count"]);
    comment_config(&mut hist, &manifest);
    hist.comment("histogram of (1/d) ln rho_hat across dataset resamples");
    for (left, right, count) in histogram(&study.log_rho_over_d, 80) {
        hist.row(&[fmt(left), fmt(right), count.to_string()]);
    }
    let hist_path = out_dir.join("histogram.csv");
    write_atomic(&hist_path, &hist.render())?;
    manifest.record(&hist_path);

    if let Some(fit) = &study.tail {
        let mut tail = CsvDoc::new(&["exponent", "ci_half_width", "tail_count", "threshold"]);
        comment_config(&mut tail, &manifest);
        tail.comment("Hill fit on the largest 5% of z-samples, cutoff z >= 3");
        tail.row(&[
            fmt(fit.exponent),
            fmt(fit.ci_half_width),
            fit.tail_count.to_string(),
            fmt(fit.threshold),
        ]);
        let tail_path = out_dir.join("tail_fit.csv");
        write_atomic(&tail_path, &tail.render())?;
        manifest.record(&tail_path);
    }
    manifest.write(out_dir)?;
    Ok(())
}

pub fn cmd_simulate_empirical_kl(
    raw: &ConfigFile,
    experiment: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(
        "simulate --mode empirical-kl",
        seed,
        resolved_value(raw, Some(experiment), seed),
    );
    let h_grid: Vec<f64> = match &raw.h_grid {
        Some(grid) => grid.points(),
        None => vec![experiment.h],
    };
    let gammas = raw.gammas.clone().unwrap_or_else(|| vec![experiment.gamma]);
    if gammas.is_empty() {
        return Err(CliError::Usage("empirical-kl: gammas must not be empty".into()));
    }
    let protocol = EmpiricalKlProtocol::new(experiment)?;
    let mut doc = CsvDoc::new(&["h", "gamma", "dkl_per_d", "std_error"]);
    comment_config(&mut doc, &manifest);
    for &g in &gammas {
        let k = kernel(g)?;
        for &h in &h_grid {
            let est = protocol.estimate(h, &k)?;
            doc.row(&[fmt(h), fmt(g), fmt(est.dkl_per_d), fmt(est.std_error)]);
        }
    }
    let path = out_dir.join("kl_empirical.csv");
    write_atomic(&path, &doc.render())?;
    manifest.record(&path);
    manifest.write(out_dir)?;
    Ok(())
}

pub fn cmd_simulate_dmin(
    raw: &ConfigFile,
    experiment: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(
        "simulate --mode dmin",
        seed,
        resolved_value(raw, Some(experiment), seed),
    );
    let stats = d_min_statistics(experiment)?;
    let mut doc = CsvDoc::new(&["trial", "d_min_sq_over_d"]);
    comment_config(&mut doc, &manifest);
    doc.comment(format!("mean: {}", fmt(stats.mean)));
    doc.comment(format!(
        "reconstruction_gap_mean: {}",
        fmt(stats.reconstruction_gap_mean)
    ));
    for (i, &v) in stats.samples.iter().enumerate() {
        doc.row(&[i.to_string(), fmt(v)]);
    }
    let path = out_dir.join("dmin.csv");
    write_atomic(&path, &doc.render())?;
    manifest.record(&path);
    manifest.write(out_dir)?;
    Ok(())
}

pub fn cmd_rem(
    raw: &ConfigFile,
    rem_config: &RemConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("rem", seed, resolved_value(raw, None, seed));
    let spec = RemSpec::new(GaussianRate, rem_config.alpha, rem_config.d, rem_config.beta);
    let analysis = analyze(&spec)?;
    let samples = simulate(&spec, &GaussianEnergySampler, rem_config.trials, seed)?;
    let log_z = moments(
        &samples
            .trials
            .iter()
            .map(|t| t.log_z_over_d)
            .collect::<Vec<_>>(),
    );

    let mut doc = CsvDoc::new(&["trial", "log_Z_over_d", "eps_min", "Y2", "Y3"]);
    comment_config(&mut doc, &manifest);
    doc.comment(format!(
        "alpha: {} d: {} beta: {} n: {}",
        fmt(rem_config.alpha),
        rem_config.d,
        fmt(rem_config.beta),
        samples.n
    ));
    doc.comment(format!(
        "analysis: eps0 = {}, eps1 = {}, beta_c = {}, m_star = {}, phi = {}, condensed = {}",
        fmt(analysis.eps0),
        fmt(analysis.eps1),
        fmt(analysis.beta_c),
        fmt(analysis.m_star),
        fmt(analysis.phi),
        analysis.condensed
    ));
    doc.comment(format!(
        "simulated: mean log_Z_over_d = {} (se {}), mean entropy density = {}",
        fmt(log_z.mean),
        fmt(log_z.std_error()),
        fmt(moments(
            &samples
                .trials
                .iter()
                .map(|t| t.entropy_density)
                .collect::<Vec<_>>()
        )
        .mean)
    ));
    for t in &samples.trials {
        doc.row(&[
            t.trial.to_string(),
            fmt(t.log_z_over_d),
            fmt(t.eps_min),
            fmt(t.y2),
            fmt(t.y3),
        ]);
    }
    let path = out_dir.join("rem_trials.csv");
    write_atomic(&path, &doc.render())?;
    manifest.record(&path);
    manifest.write(out_dir)?;
    Ok(())
}
