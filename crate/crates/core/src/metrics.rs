//! Grid-pair statistics: restriction, strong Cauchy error, 1-point
//! Wasserstein distance, ensemble moments, rate fits and jet-head tracking.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, IoContext, Result};
use crate::euler::ConservedState;
use crate::grid::{FieldSnapshot, Grid};
use crate::snapshot::PlaneReader;

/// Which conserved quantity a metric looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    #[default]
    Rho,
    MomX,
    MomY,
    Energy,
    /// Strong error: one L1 norm summed over the four components.
    /// Wasserstein: sum of the four per-component distances.
    All,
}

impl Variable {
    pub const COMPONENTS: [Variable; 4] = [Variable::Rho, Variable::MomX, Variable::MomY, Variable::Energy];

    pub fn components(self) -> &'static [usize] {
        match self {
            Variable::Rho => &[0],
            Variable::MomX => &[1],
            Variable::MomY => &[2],
            Variable::Energy => &[3],
            Variable::All => &[0, 1, 2, 3],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::Rho => "rho",
            Variable::MomX => "mom_x",
            Variable::MomY => "mom_y",
            Variable::Energy => "energy",
            Variable::All => "all",
        }
    }
}

impl std::str::FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => Variable::Rho,
            "mom_x" => Variable::MomX,
            "mom_y" => Variable::MomY,
            "energy" => Variable::Energy,
            "all" => Variable::All,
            _ => return Err(Error::InvalidParameter(format!("unknown variable {s:?} (rho, mom_x, mom_y, energy, all)"))),
        })
    }
}

/// 2x2 block mean onto the grid with half the cells per axis.
pub fn restrict(fine: &FieldSnapshot) -> Result<FieldSnapshot> {
    let grid = fine.grid.coarsened()?;
    let mut data = Vec::with_capacity(grid.cells());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (fi, fj) = (2 * i, 2 * j);
            let sum = fine.at(fi, fj) + fine.at(fi + 1, fj) + fine.at(fi, fj + 1) + fine.at(fi + 1, fj + 1);
            data.push(sum * 0.25);
        }
    }
    Ok(FieldSnapshot { grid, time: fine.time, sample_seed: fine.sample_seed, diverged: fine.diverged, data })
}

/// Restricts two fine rows of one scalar plane into `out`.
pub fn restrict_rows(lower: &[f64], upper: &[f64], out: &mut [f64]) {
    debug_assert_eq!(lower.len(), 2 * out.len());
    for (i, o) in out.iter_mut().enumerate() {
        *o = 0.25 * (lower[2 * i] + lower[2 * i + 1] + upper[2 * i] + upper[2 * i + 1]);
    }
}

fn check_pair(coarse: &[FieldSnapshot], fine_r: &[FieldSnapshot]) -> Result<Grid> {
    if coarse.is_empty() || coarse.len() != fine_r.len() {
        return Err(Error::Metric(format!("need equal non-empty ensembles, got {} and {}", coarse.len(), fine_r.len())));
    }
    let grid = coarse[0].grid;
    for s in coarse.iter().chain(fine_r) {
        if !s.grid.same_shape(&grid) {
            return Err(Error::DimensionMismatch(format!("grid {} vs {}", s.grid.label(), grid.label())));
        }
    }
    Ok(grid)
}

fn l1(u: ConservedState, comps: &[usize]) -> f64 {
    comps.iter().map(|&k| u.component(k).abs()).sum()
}

/// Mean over samples of `||u_c - R u_f||_1 / ||R u_f||_1`.
pub fn strong_error(coarse: &[FieldSnapshot], fine_restricted: &[FieldSnapshot], var: Variable) -> Result<f64> {
    check_pair(coarse, fine_restricted)?;
    let comps = var.components();
    let mut total = 0.0;
    for (c, f) in coarse.iter().zip(fine_restricted) {
        let mut num = 0.0;
        let mut den = 0.0;
        for (uc, uf) in c.data.iter().zip(&f.data) {
            num += l1(*uc - *uf, comps);
            den += l1(*uf, comps);
        }
        if !(den > 0.0) {
            return Err(Error::Metric("zero reference norm in strong error".into()));
        }
        total += num / den;
    }
    Ok(total / coarse.len() as f64)
}

/// Earth mover's distance between two equal-size empirical 1D measures:
/// mean absolute difference of the order statistics. Sorts in place.
pub fn w1_cell(a: &mut [f64], b: &mut [f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "empirical measures must have equal size");
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let sum: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum();
    sum / a.len() as f64
}

/// Largest ensemble accepted by [`ot_oracle`].
pub const OT_ORACLE_MAX: usize = 8;

/// Minimum over all pairings of the mean absolute difference, by
/// enumeration. Pairs are summed in ascending order of `a`.
pub fn ot_oracle(a: &[f64], b: &[f64]) -> Result<f64> {
    let m = a.len();
    if m != b.len() || m == 0 {
        return Err(Error::Metric("oracle needs two equal non-empty lists".into()));
    }
    if m > OT_ORACLE_MAX {
        return Err(Error::Metric(format!("oracle limited to {OT_ORACLE_MAX} samples, got {m}")));
    }
    let mut a = a.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best = f64::INFINITY;
    // Heap's algorithm
    let mut c = vec![0usize; m];
    let cost = |p: &[usize]| a.iter().zip(p).map(|(x, &j)| (x - b[j]).abs()).sum::<f64>();
    best = best.min(cost(&perm));
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best / m as f64)
}

/// Spatial mean of the per-cell Wasserstein distance between the coarse
/// and restricted-fine marginals.
pub fn wasserstein1(coarse: &[FieldSnapshot], fine_restricted: &[FieldSnapshot], var: Variable) -> Result<f64> {
    let grid = check_pair(coarse, fine_restricted)?;
    let m = coarse.len();
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    let mut total = 0.0;
    for &k in var.components() {
        let mut sum = 0.0;
        for cell in 0..grid.cells() {
            for s in 0..m {
                a[s] = coarse[s].data[cell].component(k);
                b[s] = fine_restricted[s].data[cell].component(k);
            }
            sum += w1_cell(&mut a, &mut b);
        }
        total += sum / grid.cells() as f64;
    }
    Ok(total)
}

/// Both pair metrics for one component set, plus per-component values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub m_star: usize,
    pub w1: f64,
    pub e_strong: f64,
    pub w1_components: [f64; 4],
    pub strong_components: [f64; 4],
}

/// Streams the jointly valid snapshot files of one grid pair row by row,
/// holding one row band per sample. `coarse[m]` and `fine[m]` must be the
/// same sample.
pub fn evaluate_pair_files<P: AsRef<Path>>(coarse: &[P], fine: &[P], var: Variable) -> Result<PairMetrics> {
    let m = coarse.len();
    if m == 0 || fine.len() != m {
        return Err(Error::Metric(format!("need equal non-empty ensembles, got {} and {}", m, fine.len())));
    }
    let mut w1_components = [0.0; 4];
    let mut strong_components = [0.0; 4];
    // per sample and component: numerator and denominator of the strong error
    let mut num = vec![[0.0f64; 4]; m];
    let mut den = vec![[0.0f64; 4]; m];
    for k in 0..4 {
        let mut creaders = Vec::with_capacity(m);
        let mut freaders = Vec::with_capacity(m);
        for (c, f) in coarse.iter().zip(fine) {
            creaders.push(PlaneReader::open(c.as_ref(), k)?);
            freaders.push(PlaneReader::open(f.as_ref(), k)?);
        }
        let ch = *creaders[0].header();
        for (r, f) in creaders.iter().zip(&freaders) {
            let (c, fh) = (r.header(), f.header());
            if c.nx != ch.nx || c.ny != ch.ny || fh.nx != 2 * ch.nx || fh.ny != 2 * ch.ny {
                return Err(Error::DimensionMismatch(format!(
                    "pair {}x{} / {}x{} is not a factor-2 refinement of {}x{}",
                    c.nx, c.ny, fh.nx, fh.ny, ch.nx, ch.ny
                )));
            }
        }
        let nx = ch.nx;
        let mut crow = vec![vec![0.0; nx]; m];
        let mut rrow = vec![vec![0.0; nx]; m];
        let mut f0 = vec![0.0; 2 * nx];
        let mut f1 = vec![0.0; 2 * nx];
        let mut a = vec![0.0; m];
        let mut b = vec![0.0; m];
        let mut w1_sum = 0.0;
        for _ in 0..ch.ny {
            for s in 0..m {
                creaders[s].read_into(&mut crow[s]).io_context(|| format!("reading {}", coarse[s].as_ref().display()))?;
                freaders[s].read_into(&mut f0).io_context(|| format!("reading {}", fine[s].as_ref().display()))?;
                freaders[s].read_into(&mut f1).io_context(|| format!("reading {}", fine[s].as_ref().display()))?;
                restrict_rows(&f0, &f1, &mut rrow[s]);
                for i in 0..nx {
                    num[s][k] += (crow[s][i] - rrow[s][i]).abs();
                    den[s][k] += rrow[s][i].abs();
                }
            }
            for i in 0..nx {
                for s in 0..m {
                    a[s] = crow[s][i];
                    b[s] = rrow[s][i];
                }
                w1_sum += w1_cell(&mut a, &mut b);
            }
        }
        w1_components[k] = w1_sum / (nx * ch.ny) as f64;
    }
    for k in 0..4 {
        strong_components[k] = (0..m).map(|s| num[s][k] / den[s][k]).sum::<f64>() / m as f64;
    }
    let comps = var.components();
    let w1 = comps.iter().map(|&k| w1_components[k]).sum();
    let mut e_strong = 0.0;
    for s in 0..m {
        let n: f64 = comps.iter().map(|&k| num[s][k]).sum();
        let d: f64 = comps.iter().map(|&k| den[s][k]).sum();
        if !(d > 0.0) {
            return Err(Error::Metric(format!("zero reference norm in strong error for {}", fine[s].as_ref().display())));
        }
        e_strong += n / d;
    }
    Ok(PairMetrics { m_star: m, w1, e_strong: e_strong / m as f64, w1_components, strong_components })
}

/// Per-cell, per-component mean and `M-1`-normalized standard deviation.
pub fn ensemble_moments(samples: &[FieldSnapshot]) -> Result<(FieldSnapshot, FieldSnapshot)> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::Metric(format!("standard deviation needs at least 2 samples, got {m}")));
    }
    let grid = samples[0].grid;
    if samples.iter().any(|s| !s.grid.same_shape(&grid)) {
        return Err(Error::DimensionMismatch("ensemble snapshots on different grids".into()));
    }
    let mut acc = MomentAccumulator::new(grid, samples[0].time);
    for s in samples {
        acc.push(s)?;
    }
    acc.finish()
}

/// Two-pass-free moments via Welford updates, one sample at a time.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    grid: Grid,
    time: f64,
    count: usize,
    mean: Vec<[f64; 4]>,
    m2: Vec<[f64; 4]>,
}

impl MomentAccumulator {
    pub fn new(grid: Grid, time: f64) -> Self {
        Self { grid, time, count: 0, mean: vec![[0.0; 4]; grid.cells()], m2: vec![[0.0; 4]; grid.cells()] }
    }

    pub fn push(&mut self, s: &FieldSnapshot) -> Result<()> {
        if !s.grid.same_shape(&self.grid) {
            return Err(Error::DimensionMismatch(format!("grid {} vs {}", s.grid.label(), self.grid.label())));
        }
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), u) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(&s.data) {
            let v = u.to_array();
            for k in 0..4 {
                let d = v[k] - mean[k];
                mean[k] += d / n;
                m2[k] += d * (v[k] - mean[k]);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(FieldSnapshot, FieldSnapshot)> {
        if self.count < 2 {
            return Err(Error::Metric(format!("standard deviation needs at least 2 samples, got {}", self.count)));
        }
        let denom = (self.count - 1) as f64;
        let mean = self.mean.iter().map(|v| ConservedState::from_array(*v)).collect();
        let std = self.m2.iter().map(|v| ConservedState::from_array(v.map(|x| (x.max(0.0) / denom).sqrt()))).collect();
        Ok((
            FieldSnapshot { grid: self.grid, time: self.time, sample_seed: 0, diverged: false, data: mean },
            FieldSnapshot { grid: self.grid, time: self.time, sample_seed: 0, diverged: false, data: std },
        ))
    }
}

/// Least-squares slope `r` of `log(error)` against `log(dx)`, so that
/// `error ~ dx^r` and errors decaying under refinement give `r > 0`.
pub fn fit_rate(errors: &[f64], dxs: &[f64]) -> Result<f64> {
    if errors.len() < 2 || errors.len() != dxs.len() {
        return Err(Error::Metric(format!("need >= 2 matching errors and spacings, got {} and {}", errors.len(), dxs.len())));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::Metric(format!("errors must be positive and finite, got {e}")));
    }
    if dxs.iter().any(|d| !(*d > 0.0)) || dxs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Metric("spacings must be positive and strictly decreasing".into()));
    }
    let n = errors.len() as f64;
    let xs: Vec<f64> = dxs.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    Ok(sxy / sxx)
}

/// Rightmost cell centre in the band `|y| <= r_jet` whose density differs
/// from `rho_amb` by more than `threshold` (relative); 0 when none does.
pub fn jet_head_position(s: &FieldSnapshot, rho_amb: f64, r_jet: f64, threshold: f64) -> f64 {
    let g = s.grid;
    let mut head: f64 = 0.0;
    for j in 0..g.ny {
        if g.y_center(j as isize).abs() > r_jet {
            continue;
        }
        for i in (0..g.nx).rev() {
            let x = g.x_center(i as isize);
            if x <= head {
                break;
            }
            if (s.at(i, j).rho / rho_amb - 1.0).abs() > threshold {
                head = x;
                break;
            }
        }
    }
    head
}
