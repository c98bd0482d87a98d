//! Parameter sweeps: a grid over alpha, delta1, delta2 and mu, one CSV row per point.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use o2hopf_core::normalform::{self, Route};
use o2hopf_core::reduced::{self, BranchKind, ReducedSystem, Stability};
use o2hopf_core::RawParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;
use crate::manifest::{manifest_path, RunManifest};
use crate::params::{apply_beta, BetaSpec};

/// Rows computed between two flushes of the CSV and manifest.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Alpha,
    Delta1,
    Delta2,
    Mu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub axis: Axis,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridAxis {
    /// `name=start:end:count`, e.g. `mu=-0.1:0.1:21`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let bad = || format!("grid axis must look like `mu=-0.1:0.1:21`, got `{s}`");
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let axis = match name.trim() {
            "alpha" => Axis::Alpha,
            "delta1" | "d1" => Axis::Delta1,
            "delta2" | "d2" => Axis::Delta2,
            "mu" => Axis::Mu,
            other => return Err(format!("unknown grid axis `{other}` (alpha, delta1, delta2, mu)")),
        };
        let parts: Vec<&str> = range.split(':').collect();
        let [start, end, count] = parts[..] else { return Err(bad()) };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let end: f64 = end.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !end.is_finite() || (count == 1 && start != end) {
            return Err(bad());
        }
        Ok(Self { axis, start, end, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.start
        } else {
            self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RawParams,
    pub beta: Option<f64>,
    pub mu: f64,
    pub grid: Vec<GridAxis>,
    pub regime_route: Route,
}

impl SweepConfig {
    pub fn len(&self) -> usize {
        self.grid.iter().map(|g| g.count).product()
    }

    /// Grid point `index` in row-major order (last axis fastest).
    pub fn point(&self, mut index: usize) -> (RawParams, BetaSpec) {
        let mut raw = self.base;
        let mut spec = match self.beta {
            Some(b) => BetaSpec::Beta(b),
            None => BetaSpec::Mu(self.mu),
        };
        for g in self.grid.iter().rev() {
            let v = g.value(index % g.count);
            index /= g.count;
            match g.axis {
                Axis::Alpha => raw.alpha = v,
                Axis::Delta1 => raw.delta1 = v,
                Axis::Delta2 => raw.delta2 = v,
                Axis::Mu => spec = BetaSpec::Mu(v),
            }
        }
        (raw, spec)
    }
}

/// One CSV row. Complex values are split into `_re` / `_im` columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub delta1: f64,
    pub delta2: f64,
    pub half_length: f64,
    pub mu: Option<f64>,
    pub admissible: bool,
    pub error_code: String,
    pub beta1: Option<f64>,
    pub omega: Option<f64>,
    pub a_re: Option<f64>,
    pub a_im: Option<f64>,
    pub b_closed_form_re: Option<f64>,
    pub b_closed_form_im: Option<f64>,
    pub c_closed_form_re: Option<f64>,
    pub c_closed_form_im: Option<f64>,
    pub b_direct_re: Option<f64>,
    pub b_direct_im: Option<f64>,
    pub c_direct_re: Option<f64>,
    pub c_direct_im: Option<f64>,
    pub b_projection_re: Option<f64>,
    pub b_projection_im: Option<f64>,
    pub c_projection_re: Option<f64>,
    pub c_projection_im: Option<f64>,
    pub regime_route: String,
    pub re_b: Option<f64>,
    pub re_b_plus_re_c: Option<f64>,
    pub sector: Option<String>,
    /// `-Re a mu / Re b`; the rotating wave exists iff this is positive.
    pub tw_r_squared: Option<f64>,
    pub tw_stable: Option<bool>,
    /// `-Re a mu / (Re b + Re c)`; the standing wave exists iff this is positive.
    pub sw_r_squared: Option<f64>,
    pub sw_stable: Option<bool>,
}

/// Evaluate one parameter set. Failures become row error codes, never panics or aborts.
pub fn evaluate(index: usize, raw: RawParams, spec: BetaSpec, regime_route: Route) -> SweepRow {
    let mut row = SweepRow {
        index,
        alpha: raw.alpha,
        delta1: raw.delta1,
        delta2: raw.delta2,
        half_length: raw.half_length,
        regime_route: regime_route.name().to_string(),
        ..SweepRow::default()
    };
    let params = match apply_beta(raw, spec) {
        Ok(p) => p,
        Err(e) => {
            row.error_code = e.code().to_string();
            return row;
        }
    };
    let onset = params.onset();
    row.beta = Some(params.beta());
    row.mu = Some(onset.mu);
    row.beta1 = Some(onset.beta1);
    row.omega = Some(onset.omega);
    row.admissible = onset.admissible;
    if let Err(e) = fill_coefficients(&mut row, &params, regime_route) {
        row.error_code = e.code().to_string();
    }
    row
}

fn fill_coefficients(row: &mut SweepRow, params: &o2hopf_core::ModelParams, regime_route: Route) -> o2hopf_core::Result<()> {
    params.require_admissible()?;
    let closed = normalform::coeffs(params, Route::ClosedForm)?;
    let direct = normalform::coeffs(params, Route::Direct)?;
    let proj = normalform::coeffs(params, Route::Projection)?;
    row.a_re = Some(proj.a.re);
    row.a_im = Some(proj.a.im);
    (row.b_closed_form_re, row.b_closed_form_im) = (Some(closed.b.re), Some(closed.b.im));
    (row.c_closed_form_re, row.c_closed_form_im) = (Some(closed.c.re), Some(closed.c.im));
    (row.b_direct_re, row.b_direct_im) = (Some(direct.b.re), Some(direct.b.im));
    (row.c_direct_re, row.c_direct_im) = (Some(direct.c.re), Some(direct.c.im));
    (row.b_projection_re, row.b_projection_im) = (Some(proj.b.re), Some(proj.b.im));
    (row.c_projection_re, row.c_projection_im) = (Some(proj.c.re), Some(proj.c.im));

    let nf = match regime_route {
        Route::ClosedForm => closed,
        Route::Direct => direct,
        _ => proj,
    };
    let mu = params.onset().mu;
    let sys = ReducedSystem::from_coeffs(&nf, mu);
    let regime = reduced::classify_regime(&sys);
    row.re_b = Some(nf.b.re);
    row.re_b_plus_re_c = Some(nf.b.re + nf.c.re);
    row.sector = Some(regime.sector);
    row.tw_r_squared = Some(-nf.a.re * mu / nf.b.re);
    row.sw_r_squared = Some(-nf.a.re * mu / (nf.b.re + nf.c.re));
    let found = reduced::branches(&sys);
    let stable = |kind| {
        found
            .iter()
            .find(|b| b.kind == kind && b.stability != Stability::Degenerate)
            .map(|b| b.stability == Stability::Stable)
    };
    row.tw_stable = stable(BranchKind::RotatingWave1);
    row.sw_stable = stable(BranchKind::StandingWave);
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("O2HOPF_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::validation(format!("O2HOPF_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure::runtime(format!("thread pool: {e}")))
}

/// Rows already on disk from an interrupted run with the same configuration.
fn resume_rows(out: &Path, hash: &str) -> Result<Vec<SweepRow>, Failure> {
    let mpath = manifest_path(out);
    if !out.exists() || !mpath.exists() {
        return Ok(Vec::new());
    }
    let m = RunManifest::read(&mpath)?;
    if m.config_hash != hash {
        return Err(Failure::validation(format!(
            "{} was written with a different configuration; remove it or drop --resume",
            out.display()
        )));
    }
    let done = m.completed_rows.unwrap_or(0);
    let mut reader = csv::Reader::from_path(out)?;
    let rows: Vec<SweepRow> = reader.deserialize().take(done).collect::<Result<_, _>>()?;
    Ok(rows)
}

pub struct SweepOutcome {
    pub rows: usize,
    pub resumed: usize,
    pub failed_rows: usize,
}

pub fn run(config: &SweepConfig, out: &Path, resume: bool) -> Result<SweepOutcome, Failure> {
    let config_json = serde_json::to_value(config)?;
    // a sweep has no single parameter set; the grid is covered by the config hash
    let mut manifest = RunManifest::new("sweep", None, &config_json);
    let pool = thread_pool()?;
    let done = if resume { resume_rows(out, &manifest.config_hash)? } else { Vec::new() };
    let resumed = done.len();
    let total = config.len();

    // Rewriting the kept rows drops any partial line left by an interrupted write.
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(out)?));
    writer.write_record(csv_header())?;
    let mut failed_rows = done.iter().filter(|r| !r.error_code.is_empty()).count();
    for r in &done {
        writer.serialize(r)?;
    }
    let mut next = resumed;
    while next < total {
        let end = (next + CHUNK).min(total);
        let rows: Vec<SweepRow> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|i| {
                    let (raw, spec) = config.point(i);
                    evaluate(i, raw, spec, config.regime_route)
                })
                .collect()
        });
        for r in &rows {
            failed_rows += usize::from(!r.error_code.is_empty());
            writer.serialize(r)?;
        }
        writer.flush()?;
        next = end;
        manifest.completed_rows = Some(next);
        manifest.clone().write(&[out.to_path_buf()])?;
    }
    writer.flush()?;
    drop(writer);
    manifest.completed_rows = Some(total);
    manifest.write(&[out.to_path_buf()])?;
    Ok(SweepOutcome {
        rows: total,
        resumed,
        failed_rows,
    })
}

/// Column names, taken from the serde field order of [`SweepRow`].
fn csv_header() -> Vec<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(SweepRow::default()).expect("in-memory write");
    let bytes = w.into_inner().expect("in-memory write");
    let text = String::from_utf8(bytes).expect("utf8");
    text.lines().next().unwrap_or_default().split(',').map(str::to_string).collect()
}

/// Buffered single-row CSV for `coeffs --csv`.
pub fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
