//! Monte Carlo orchestration: one job per (sample, grid), a bounded worker
//! pool, a single manifest writer and resumable runs.
//!
//! Layout under the output directory:
//!
//! ```text
//! manifest.toml
//! 125x25/sample_000000_t00.vlbm
//! 125x25/sample_000000_t01.vlbm
//! ...
//! ```

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::config::CaseConfig;
use crate::error::{Error, IoContext, Result};
use crate::euler::{pressure, GasParams};
use crate::grid::{FieldSnapshot, Grid};
use crate::inlet::{draw_coefficients, ModeCoefficients};
use crate::snapshot::{open_streaming, write_atomic, write_snapshot};
use crate::solver::run_sample;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    NotRun,
    Admissible,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRecord {
    pub grid: String,
    pub status: Status,
    #[serde(default)]
    pub steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<f64>,
    /// Relative to the manifest's directory, one per snapshot time.
    pub snapshots: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub m: usize,
    #[serde(with = "hex_u64")]
    pub seed: u64,
    pub y_coeffs: Vec<f64>,
    pub z_coeffs: Vec<f64>,
    pub grids: Vec<GridRecord>,
}

impl SampleRecord {
    pub fn coefficients(&self) -> ModeCoefficients {
        ModeCoefficients { seed: self.seed, y_coeffs: self.y_coeffs.clone(), z_coeffs: self.z_coeffs.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleManifest {
    pub format_version: u32,
    pub samples: usize,
    pub base_seed: u64,
    pub grids: Vec<[usize; 2]>,
    pub snapshot_times: Vec<f64>,
    /// Case parameters with machine-local settings stripped.
    pub case: CaseConfig,
    pub records: Vec<SampleRecord>,
}

pub fn snapshot_name(m: usize, time_index: usize) -> String {
    format!("sample_{m:06}_t{time_index:02}.vlbm")
}

pub fn grid_dir_name(grid: [usize; 2]) -> String {
    format!("{}x{}", grid[0], grid[1])
}

impl EnsembleManifest {
    /// Fresh manifest with every coefficient drawn and nothing run.
    pub fn new(cfg: &CaseConfig) -> Self {
        let case = cfg.normalized();
        let records = (0..case.run.samples)
            .map(|m| {
                let c = draw_coefficients(case.run.base_seed, m as u64, case.perturbation.modes);
                let grids = case
                    .run
                    .grids
                    .iter()
                    .map(|g| GridRecord {
                        grid: grid_dir_name(*g),
                        status: Status::NotRun,
                        steps: 0,
                        diverged_at: None,
                        snapshots: (0..case.run.snapshot_times.len())
                            .map(|t| format!("{}/{}", grid_dir_name(*g), snapshot_name(m, t)))
                            .collect(),
                    })
                    .collect();
                SampleRecord { m, seed: c.seed, y_coeffs: c.y_coeffs, z_coeffs: c.z_coeffs, grids }
            })
            .collect();
        Self {
            format_version: MANIFEST_VERSION,
            samples: case.run.samples,
            base_seed: case.run.base_seed,
            grids: case.run.grids.clone(),
            snapshot_times: case.run.snapshot_times.clone(),
            case,
            records,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).io_context(|| format!("reading manifest {}", path.display()))?;
        let m: Self = toml::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        if m.format_version != MANIFEST_VERSION {
            return Err(Error::Manifest(format!("unsupported manifest version {}", m.format_version)));
        }
        m.case.validate()?;
        if m.records.len() != m.samples || m.records.iter().any(|r| r.grids.len() != m.grids.len()) {
            return Err(Error::Manifest("record count does not match samples x grids".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Manifest(e.to_string()))?;
        write_atomic(path, |w| std::io::Write::write_all(w, text.as_bytes()))
    }

    pub fn grid(&self, index: usize) -> Result<Grid> {
        if index >= self.grids.len() {
            return Err(Error::Manifest(format!("grid index {index} not in manifest ({} grids)", self.grids.len())));
        }
        self.case.grid(index)
    }

    pub fn flags(&self, grid: usize) -> Result<Vec<Status>> {
        if grid >= self.grids.len() {
            return Err(Error::Manifest(format!("grid index {grid} not in manifest ({} grids)", self.grids.len())));
        }
        Ok(self.records.iter().map(|r| r.grids[grid].status).collect())
    }

    pub fn is_complete(&self) -> bool {
        self.records.iter().all(|r| r.grids.iter().all(|g| g.status != Status::NotRun))
    }
}

/// Full-range seeds as hex strings; TOML integers are signed 64-bit.
mod hex_u64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:#018x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let text = String::deserialize(d)?;
        let digits = text.strip_prefix("0x").ok_or_else(|| serde::de::Error::custom("seed must be 0x-prefixed hex"))?;
        u64::from_str_radix(digits, 16).map_err(serde::de::Error::custom)
    }
}

/// Per-sample validity on a grid pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityMask {
    pub mask: Vec<bool>,
}

impl ValidityMask {
    pub fn from_flags(coarse: &[bool], fine: &[bool]) -> Result<Self> {
        if coarse.len() != fine.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {} flags", coarse.len(), fine.len())));
        }
        Ok(Self { mask: coarse.iter().zip(fine).map(|(a, b)| *a && *b).collect() })
    }

    pub fn m_star(&self) -> usize {
        self.mask.iter().filter(|v| **v).count()
    }

    pub fn valid_samples(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, v)| **v).map(|(m, _)| m)
    }
}

/// Joint admissibility of two grids recorded in the manifest.
pub fn joint_validity(manifest: &EnsembleManifest, coarse: usize, fine: usize) -> Result<ValidityMask> {
    let flags = |g: usize| -> Result<Vec<bool>> {
        let f = manifest.flags(g)?;
        if let Some(m) = f.iter().position(|s| *s == Status::NotRun) {
            return Err(Error::Manifest(format!("grid {} not fully run (sample {m} missing)", grid_dir_name(manifest.grids[g]))));
        }
        Ok(f.iter().map(|s| *s == Status::Admissible).collect())
    };
    ValidityMask::from_flags(&flags(coarse)?, &flags(fine)?)
}

/// True iff every snapshot is unflagged and finite.
pub fn admissibility_flag(snapshots: &[FieldSnapshot]) -> bool {
    snapshots.iter().all(|s| !s.diverged && s.is_finite())
}

/// Streams a snapshot file and re-checks it; with `positivity`, finite
/// states with `rho <= 0` or `p <= 0` also fail.
pub fn snapshot_file_admissible(path: &Path, positivity: Option<GasParams>) -> Result<bool> {
    let mut stream = open_streaming(path)?;
    if stream.header().diverged {
        return Ok(false);
    }
    for u in &mut stream {
        let u = u.io_context(|| format!("reading {}", path.display()))?;
        if !u.is_finite() {
            return Ok(false);
        }
        if let Some(gas) = positivity {
            if !(u.rho > 0.0 && pressure(u, gas) > 0.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Progress {
    pub m: usize,
    pub grid: String,
    pub status: Status,
    pub done: usize,
    pub total: usize,
    pub diverged: usize,
}

#[derive(Default)]
pub struct RunOptions<'a> {
    /// Stop after this many jobs, as if interrupted.
    pub max_jobs: Option<usize>,
    pub progress: Option<&'a (dyn Fn(&Progress) + Sync)>,
}

struct JobResult {
    m: usize,
    grid: usize,
    status: Status,
    steps: u64,
    diverged_at: Option<f64>,
}

/// Runs every pending (sample, grid) job of `cfg`, resuming from the
/// manifest in the output directory when one exists.
pub fn run_ensemble(cfg: &CaseConfig, opts: &RunOptions) -> Result<EnsembleManifest> {
    cfg.validate()?;
    let root = cfg.run.output_dir.clone();
    std::fs::create_dir_all(&root).io_context(|| format!("creating {}", root.display()))?;
    for g in &cfg.run.grids {
        let d = root.join(grid_dir_name(*g));
        std::fs::create_dir_all(&d).io_context(|| format!("creating {}", d.display()))?;
    }
    let manifest_path = root.join(MANIFEST_FILE);
    let mut manifest = if manifest_path.exists() {
        let m = EnsembleManifest::load(&manifest_path)?;
        if m.case != cfg.normalized() {
            return Err(Error::Manifest(format!(
                "{} was written for a different configuration; use a new output directory",
                manifest_path.display()
            )));
        }
        m
    } else {
        let m = EnsembleManifest::new(cfg);
        m.save(&manifest_path)?;
        m
    };

    let mut pending: Vec<(usize, usize)> = Vec::new();
    for r in &manifest.records {
        for (g, gr) in r.grids.iter().enumerate() {
            let files_present = gr.snapshots.iter().all(|p| root.join(p).is_file());
            if gr.status == Status::NotRun || !files_present {
                pending.push((r.m, g));
            }
        }
    }
    if let Some(limit) = opts.max_jobs {
        pending.truncate(limit);
    }
    let total_jobs: usize = manifest.records.len() * manifest.grids.len();
    let mut done = total_jobs - pending.len().min(total_jobs);
    let mut diverged =
        manifest.records.iter().flat_map(|r| &r.grids).filter(|g| g.status == Status::Diverged).count();
    if pending.is_empty() {
        return Ok(manifest);
    }

    let workers = match cfg.run.workers {
        0 => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        n => n,
    }
    .min(pending.len());
    let setup = cfg.setup();
    let grids = cfg.grids()?;
    let times = &cfg.run.snapshot_times;
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<Result<JobResult>>();
    let records = manifest.records.clone();
    let records = &records;
    let mut first_error = None;

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, stop, pending, root, grids, setup) = (&next, &stop, &pending, &root, &grids, &setup);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(m, g)) = pending.get(k) else { break };
                let job = || -> Result<JobResult> {
                    let record = &records[m];
                    let run = run_sample(setup, &record.coefficients(), grids[g], times)?;
                    for (snap, rel) in run.snapshots.iter().zip(&record.grids[g].snapshots) {
                        write_snapshot(snap, &root.join(rel))?;
                    }
                    let status = if run.admissible { Status::Admissible } else { Status::Diverged };
                    Ok(JobResult { m, grid: g, status, steps: run.steps, diverged_at: run.diverged_at })
                };
                let result = job();
                if result.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        // single manifest writer
        for result in rx {
            match result {
                Ok(r) => {
                    let gr = &mut manifest.records[r.m].grids[r.grid];
                    gr.status = r.status;
                    gr.steps = r.steps;
                    gr.diverged_at = r.diverged_at;
                    done += 1;
                    if r.status == Status::Diverged {
                        diverged += 1;
                    }
                    if let Err(e) = manifest.save(&manifest_path) {
                        stop.store(true, Ordering::Relaxed);
                        first_error.get_or_insert(e);
                    }
                    if let Some(p) = opts.progress {
                        let grid = manifest.records[r.m].grids[r.grid].grid.clone();
                        p(&Progress { m: r.m, grid, status: r.status, done, total: total_jobs, diverged });
                    }
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
    });
    match first_error {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

/// Absolute path of a manifest-relative snapshot path.
pub fn resolve(manifest_path: &Path, rel: &str) -> PathBuf {
    manifest_path.parent().unwrap_or(Path::new(".")).join(rel)
}
