//! The four user-facing commands: run, metrics, render and rates.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::CaseConfig;
use crate::ensemble::{
    grid_dir_name, joint_validity, resolve, run_ensemble, snapshot_file_admissible, EnsembleManifest, Progress,
    RunOptions, Status, MANIFEST_FILE,
};
use crate::error::{Error, IoContext, Result};
use crate::metrics::{evaluate_pair_files, fit_rate, MomentAccumulator, Variable};
use crate::render::render_ppm;
use crate::snapshot::{read_snapshot, write_atomic};

pub const METRICS_CSV: &str = "metrics.csv";
pub const RATES_CSV: &str = "rates.csv";
pub const COMPONENTS_CSV: &str = "metrics_components.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub manifest_path: PathBuf,
    pub manifest: EnsembleManifest,
    pub diverged: usize,
}

/// Loads the config and runs (or resumes) its ensemble.
pub fn cmd_run(config_path: &Path, max_jobs: Option<usize>, progress: Option<&(dyn Fn(&Progress) + Sync)>) -> Result<RunSummary> {
    let cfg = CaseConfig::load(config_path)?;
    run_config(&cfg, max_jobs, progress)
}

pub fn run_config(cfg: &CaseConfig, max_jobs: Option<usize>, progress: Option<&(dyn Fn(&Progress) + Sync)>) -> Result<RunSummary> {
    let manifest = run_ensemble(cfg, &RunOptions { max_jobs, progress })?;
    let diverged = manifest.records.iter().flat_map(|r| &r.grids).filter(|g| g.status == Status::Diverged).count();
    Ok(RunSummary { manifest_path: cfg.run.output_dir.join(MANIFEST_FILE), manifest, diverged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub time: f64,
    pub pair: String,
    #[serde(rename = "M_star")]
    pub m_star: usize,
    #[serde(rename = "W1")]
    pub w1: f64,
    #[serde(rename = "E_strong")]
    pub e_strong: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub time: f64,
    #[serde(rename = "r_W1")]
    pub r_w1: f64,
    pub r_strong: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub time: f64,
    pub pair: String,
    pub component: String,
    #[serde(rename = "W1")]
    pub w1: f64,
    #[serde(rename = "E_strong")]
    pub e_strong: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
    pub rates: Vec<RateRow>,
    pub components: Vec<ComponentRow>,
}

pub fn pair_label(coarse: [usize; 2], fine: [usize; 2]) -> String {
    format!("{}->{}", grid_dir_name(coarse), grid_dir_name(fine))
}

/// Coarse `nx` of a pair label.
fn pair_coarse_nx(label: &str) -> Result<usize> {
    label
        .split("->")
        .next()
        .and_then(|c| c.split('x').next())
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::Metric(format!("malformed pair label {label:?}")))
}

/// Rate fit per time over all pairs at that time. The abscissa is the
/// coarse spacing of each pair, taken as `1 / nx_coarse`; a common scale
/// factor does not change the slope. Undefined fits give NaN.
pub fn fit_rates(rows: &[MetricsRow]) -> Result<Vec<RateRow>> {
    let mut times: Vec<f64> = Vec::new();
    for r in rows {
        if !times.iter().any(|t| t.to_bits() == r.time.to_bits()) {
            times.push(r.time);
        }
    }
    let mut out = Vec::new();
    for t in times {
        let mut pts: Vec<(usize, f64, f64)> = Vec::new();
        for r in rows.iter().filter(|r| r.time.to_bits() == t.to_bits()) {
            pts.push((pair_coarse_nx(&r.pair)?, r.w1, r.e_strong));
        }
        if pts.len() < 2 {
            continue;
        }
        pts.sort_by_key(|p| p.0);
        let dxs: Vec<f64> = pts.iter().map(|p| 1.0 / p.0 as f64).collect();
        let w: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let s: Vec<f64> = pts.iter().map(|p| p.2).collect();
        out.push(RateRow {
            time: t,
            r_w1: fit_rate(&w, &dxs).unwrap_or(f64::NAN),
            r_strong: fit_rate(&s, &dxs).unwrap_or(f64::NAN),
        });
    }
    Ok(out)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    write_atomic(path, |w| {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        wr.write_record(header).map_err(std::io::Error::from)?;
        for r in rows {
            wr.serialize(r).map_err(std::io::Error::from)?;
        }
        wr.flush()
    })
}

/// Pair metrics for every consecutive grid pair and snapshot time, then
/// per-time rate fits. CSVs go next to the manifest unless `out_dir` is
/// given.
pub fn cmd_metrics(manifest_path: &Path, out_dir: Option<&Path>) -> Result<MetricsReport> {
    let manifest = EnsembleManifest::load(manifest_path)?;
    let cfg = &manifest.case;
    if manifest.grids.len() < 2 {
        return Err(Error::Metric("need >= 2 grids for Cauchy metrics".into()));
    }
    for w in manifest.grids.windows(2) {
        if w[1] != [2 * w[0][0], 2 * w[0][1]] {
            return Err(Error::Metric(format!("grids {:?} -> {:?} are not a factor-2 refinement", w[0], w[1])));
        }
    }
    let positivity = cfg.run.positivity_admissibility.then_some(cfg.gas);
    // manifest flags, re-checked against the files
    let mut checked: Vec<Vec<bool>> = Vec::new();
    for g in 0..manifest.grids.len() {
        let flags = manifest.flags(g)?;
        let mut v = Vec::with_capacity(flags.len());
        for (r, f) in manifest.records.iter().zip(flags) {
            let mut ok = f == Status::Admissible;
            if ok {
                for rel in &r.grids[g].snapshots {
                    if !snapshot_file_admissible(&resolve(manifest_path, rel), positivity)? {
                        ok = false;
                        break;
                    }
                }
            }
            v.push(ok);
        }
        checked.push(v);
    }
    let mut rows = Vec::new();
    let mut components = Vec::new();
    for (ti, &t) in manifest.snapshot_times.iter().enumerate() {
        for g in 0..manifest.grids.len() - 1 {
            let recorded = joint_validity(&manifest, g, g + 1)?;
            let valid: Vec<usize> = recorded.valid_samples().filter(|&m| checked[g][m] && checked[g + 1][m]).collect();
            let pair = pair_label(manifest.grids[g], manifest.grids[g + 1]);
            if valid.is_empty() {
                return Err(Error::Metric(format!("no jointly valid samples for {pair}")));
            }
            let coarse: Vec<PathBuf> =
                valid.iter().map(|&m| resolve(manifest_path, &manifest.records[m].grids[g].snapshots[ti])).collect();
            let fine: Vec<PathBuf> =
                valid.iter().map(|&m| resolve(manifest_path, &manifest.records[m].grids[g + 1].snapshots[ti])).collect();
            let pm = evaluate_pair_files(&coarse, &fine, cfg.metrics.variable)?;
            rows.push(MetricsRow { time: t, pair: pair.clone(), m_star: pm.m_star, w1: pm.w1, e_strong: pm.e_strong });
            for (k, v) in Variable::COMPONENTS.iter().enumerate() {
                components.push(ComponentRow {
                    time: t,
                    pair: pair.clone(),
                    component: v.name().into(),
                    w1: pm.w1_components[k],
                    e_strong: pm.strong_components[k],
                });
            }
        }
    }
    let rates = fit_rates(&rows)?;
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&dir).io_context(|| format!("creating {}", dir.display()))?;
    write_csv(&dir.join(METRICS_CSV), &rows, &["time", "pair", "M_star", "W1", "E_strong"])?;
    write_csv(&dir.join(RATES_CSV), &rates, &["time", "r_W1", "r_strong"])?;
    write_csv(&dir.join(COMPONENTS_CSV), &components, &["time", "pair", "component", "W1", "E_strong"])?;
    Ok(MetricsReport { rows, rates, components })
}

/// Reads a metrics CSV and writes the per-time rate fits.
pub fn cmd_rates(metrics_csv: &Path, out: &Path) -> Result<Vec<RateRow>> {
    let mut rd = csv::Reader::from_path(metrics_csv)
        .map_err(|e| Error::Metric(format!("reading {}: {e}", metrics_csv.display())))?;
    let headers = rd.headers().map_err(|e| Error::Metric(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["time", "pair", "M_star", "W1", "E_strong"] {
        return Err(Error::Metric(format!("{}: unexpected columns {:?}", metrics_csv.display(), headers)));
    }
    let rows: Vec<MetricsRow> = rd
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Metric(format!("{}: {e}", metrics_csv.display())))?;
    let rates = fit_rates(&rows)?;
    write_csv(out, &rates, &["time", "r_W1", "r_strong"])?;
    Ok(rates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderTarget {
    Sample(usize),
    Mean,
    Std,
}

impl std::str::FromStr for RenderTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(RenderTarget::Mean),
            "std" => Ok(RenderTarget::Std),
            _ => s
                .strip_prefix("sample:")
                .or(Some(s))
                .and_then(|n| n.parse().ok())
                .map(RenderTarget::Sample)
                .ok_or_else(|| Error::InvalidParameter(format!("render target {s:?}: expected mean, std or a sample index"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderRequest {
    pub time_index: usize,
    pub target: RenderTarget,
    /// Grid index in the manifest; the finest by default.
    pub grid: Option<usize>,
    pub variable: Variable,
    pub output: PathBuf,
}

/// Writes a PPM of one sample, the ensemble mean or the ensemble standard
/// deviation at one snapshot time.
pub fn cmd_render(manifest_path: &Path, req: &RenderRequest) -> Result<()> {
    let manifest = EnsembleManifest::load(manifest_path)?;
    let cfg = &manifest.case;
    let g = req.grid.unwrap_or(manifest.grids.len() - 1);
    let grid = manifest.grid(g)?;
    if req.time_index >= manifest.snapshot_times.len() {
        return Err(Error::InvalidParameter(format!(
            "time index {} out of range ({} snapshot times)",
            req.time_index,
            manifest.snapshot_times.len()
        )));
    }
    let comp = match req.variable {
        Variable::All => return Err(Error::InvalidParameter("render needs a single variable".into())),
        v => v.components()[0],
    };
    let path_of = |m: usize| resolve(manifest_path, &manifest.records[m].grids[g].snapshots[req.time_index]);
    let values = match req.target {
        RenderTarget::Sample(m) => {
            let r = manifest
                .records
                .get(m)
                .ok_or_else(|| Error::InvalidParameter(format!("sample {m} not in ensemble of {}", manifest.samples)))?;
            match r.grids[g].status {
                Status::Admissible => {}
                Status::Diverged => {
                    return Err(Error::InvalidParameter(format!("sample {m} diverged on grid {}", r.grids[g].grid)))
                }
                Status::NotRun => return Err(Error::InvalidParameter(format!("sample {m} not run on grid {}", r.grids[g].grid))),
            }
            let s = read_snapshot(&path_of(m))?;
            if s.diverged || !s.is_finite() {
                return Err(Error::InvalidParameter(format!("sample {m} diverged on grid {}", r.grids[g].grid)));
            }
            s.plane(comp)
        }
        RenderTarget::Mean | RenderTarget::Std => {
            let mut acc = MomentAccumulator::new(grid, manifest.snapshot_times[req.time_index]);
            for r in &manifest.records {
                if r.grids[g].status == Status::Admissible {
                    let s = read_snapshot(&path_of(r.m))?;
                    if !s.diverged && s.is_finite() {
                        acc.push(&s)?;
                    }
                }
            }
            let (mean, std) = acc.finish()?;
            if req.target == RenderTarget::Mean { mean.plane(comp) } else { std.plane(comp) }
        }
    };
    let img = render_ppm(&values, grid.nx, grid.ny, cfg.render_floor(), cfg.render.colormap)?;
    write_atomic(&req.output, |w| std::io::Write::write_all(w, &img))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(time: f64, pair: &str, w1: f64, e: f64) -> MetricsRow {
        MetricsRow { time, pair: pair.into(), m_star: 10, w1, e_strong: e }
    }

    #[test]
    fn rates_from_rows() {
        let rows = vec![
            row(0.0, "500x100->1000x200", 0.4, 0.4),
            row(0.0, "1000x200->2000x400", 0.2, 0.4),
            row(0.0, "2000x400->4000x800", 0.1, 0.4),
            row(1.0, "500x100->1000x200", 1.0, 1.0),
        ];
        let r = fit_rates(&rows).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].r_w1 - 1.0).abs() < 1e-14);
        assert!(r[0].r_strong.abs() < 1e-14);
    }

    #[test]
    fn render_targets_parse() {
        assert_eq!("mean".parse::<RenderTarget>().unwrap(), RenderTarget::Mean);
        assert_eq!("std".parse::<RenderTarget>().unwrap(), RenderTarget::Std);
        assert_eq!("7".parse::<RenderTarget>().unwrap(), RenderTarget::Sample(7));
        assert_eq!("sample:3".parse::<RenderTarget>().unwrap(), RenderTarget::Sample(3));
        assert!("median".parse::<RenderTarget>().is_err());
    }
}
