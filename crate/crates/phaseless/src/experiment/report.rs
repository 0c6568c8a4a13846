//! Report persistence: versioned JSON, a per-trial CSV companion, and
//! two-column plot-data files for each aggregate curve.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::campaign::{
    compute_noise_aggregates, compute_nullspace_aggregates, compute_ratio_aggregates,
    compute_uniform_aggregates,
};
use super::{CampaignPayload, CampaignReport, SCHEMA_VERSION};

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn trials_csv(report: &CampaignReport) -> String {
    let mut out = String::new();
    match &report.payload {
        CampaignPayload::Uniform { records, .. } => {
            out.push_str(
                "trial_index,sigma_k_p,sigma_k_2,x_norm2,lhs_pp,lhs_2p,rhs_pp,rhs_2p,\
                 ratio_pp,ratio_2p,satisfied_pp,satisfied_2p,success,residual,objective,\
                 outer_iters,converged,restart_index\n",
            );
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.trial_index,
                    r.sigma_k_p,
                    r.sigma_k_2,
                    r.x_norm2,
                    r.lhs_pp,
                    r.lhs_2p,
                    opt(&r.rhs_pp),
                    opt(&r.rhs_2p),
                    opt(&r.ratio_pp),
                    opt(&r.ratio_2p),
                    opt(&r.satisfied_pp),
                    opt(&r.satisfied_2p),
                    r.success,
                    r.residual,
                    r.objective,
                    r.outer_iters,
                    r.converged,
                    r.restart_index,
                ));
            }
        }
        CampaignPayload::Nonuniform { records, .. } => {
            out.push_str("trial_index,dist2,sigma_k2,ratio,flagged,converged,residual\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.trial_index,
                    r.dist2,
                    r.sigma_k2,
                    opt(&r.ratio),
                    r.flagged,
                    r.converged,
                    r.residual,
                ));
            }
        }
        CampaignPayload::NullspaceProbe { records, .. } => {
            out.push_str("n,n_over_m,null_dim,worst_ratio,mean_ratio,regenerated,skipped\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.n, r.n_over_m, r.null_dim, r.worst_ratio, r.mean_ratio, r.regenerated,
                    r.skipped,
                ));
            }
        }
        CampaignPayload::NoiseSweep { records, .. } => {
            out.push_str("eta_index,eta_rel,eta_abs,trial_index,lhs_2p,residual,converged\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.eta_index,
                    r.eta_rel,
                    r.eta_abs,
                    r.record.trial_index,
                    r.record.lhs_2p,
                    r.record.residual,
                    r.record.converged,
                ));
            }
        }
    }
    out
}

/// `(file suffix, two-column rows)` for the aggregate curve of each campaign.
fn curve_data(report: &CampaignReport) -> (&'static str, Vec<(f64, f64)>) {
    match &report.payload {
        CampaignPayload::Uniform { records, .. } => (
            "lhs2p.txt",
            records
                .iter()
                .map(|r| (r.trial_index as f64, r.lhs_2p))
                .collect(),
        ),
        CampaignPayload::Nonuniform { records, .. } => {
            let mut ratios: Vec<f64> = records.iter().filter_map(|r| r.ratio).collect();
            ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = ratios.len().max(1) as f64;
            (
                "ratio_ecdf.txt",
                ratios
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| ((i + 1) as f64 / n, v))
                    .collect(),
            )
        }
        CampaignPayload::NullspaceProbe { aggregates, .. } => {
            ("trend.txt", aggregates.trend.clone())
        }
        CampaignPayload::NoiseSweep { aggregates, .. } => {
            ("noise_curve.txt", aggregates.medians.clone())
        }
    }
}

/// Write the report JSON plus its CSV and plot-data companions.
///
/// For `path = dir/name.json` this writes `name.json`, `name.trials.csv`,
/// and one `name.<curve>.txt`.
pub fn persist_report(report: &CampaignReport, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::format(format!("report serialization failed: {e}")))?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))?;

    let csv_path = sibling(path, "trials.csv");
    fs::write(&csv_path, trials_csv(report)).map_err(|e| Error::io(&csv_path, e))?;

    let (suffix, rows) = curve_data(report);
    let mut txt = String::new();
    for (x, y) in rows {
        txt.push_str(&format!("{x} {y}\n"));
    }
    let curve_path = sibling(path, suffix);
    fs::write(&curve_path, txt).map_err(|e| Error::io(&curve_path, e))?;
    Ok(())
}

/// Load a report, checking the schema version and verifying that the stored
/// aggregates equal recomputation from the records.
pub fn load_report(path: &Path) -> Result<CampaignReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: CampaignReport = serde_json::from_str(&text)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::format(format!(
            "{}: schema version {} unsupported (expected {})",
            path.display(),
            report.schema_version,
            SCHEMA_VERSION
        )));
    }
    let consistent = match &report.payload {
        CampaignPayload::Uniform {
            records,
            aggregates,
            ..
        } => *aggregates == compute_uniform_aggregates(records),
        CampaignPayload::Nonuniform {
            records,
            aggregates,
            ..
        } => *aggregates == compute_ratio_aggregates(records),
        CampaignPayload::NullspaceProbe {
            records,
            aggregates,
            ..
        } => *aggregates == compute_nullspace_aggregates(records),
        CampaignPayload::NoiseSweep {
            config,
            records,
            aggregates,
        } => *aggregates == compute_noise_aggregates(config, records),
    };
    if !consistent {
        return Err(Error::format(format!(
            "{}: stored aggregates do not match recomputation from records",
            path.display()
        )));
    }
    Ok(report)
}
