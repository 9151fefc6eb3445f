//! Executes a [`RunConfig`] and writes its artifacts into the output
//! directory:
//!
//! - `solution.csv`: final cell averages, header `i[,j],x[,y],q`
//! - `metadata.txt`: config values plus step count, drift and extrema
//! - `centerline.csv`: row `j = N/2` (the whole line in 1D) with the exact solution
//! - `eta.csv`: per-step hybridization statistics when the limiter is on
//! - `snapshot_<step>.csv`: every `dump_every` steps, if enabled
//!
//! Numbers use 17 significant digits so they round-trip exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fct::LimiterMode;
use crate::grid::CellField;
use crate::problems::exact_solution;
use crate::solver::{solve_problem, RunOutcome, StepInfo};

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub min: f64,
    pub max: f64,
    pub drift: f64,
    pub files: Vec<PathBuf>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes cell averages as CSV.
pub fn write_solution_csv(path: &Path, q: &CellField) -> Result<()> {
    let grid = q.grid();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    let header = if grid.dim() == 1 {
        "i,x,q"
    } else {
        "i,j,x,y,q"
    };
    writeln!(w, "{header}").map_err(io)?;
    for (c, k) in grid.interior_cells() {
        let x = grid.cell_center(c);
        if grid.dim() == 1 {
            writeln!(w, "{},{},{}", c[0], num(x[0]), num(q[k])).map_err(io)?;
        } else {
            writeln!(
                w,
                "{},{},{},{},{}",
                c[0],
                c[1],
                num(x[0]),
                num(x[1]),
                num(q[k])
            )
            .map_err(io)?;
        }
    }
    finish(path, w)
}

/// Writes row `j = N/2` of `q` next to the exact solution.
pub fn write_centerline_csv(path: &Path, q: &CellField, exact: &CellField) -> Result<()> {
    let grid = q.grid();
    let j = if grid.dim() == 1 {
        0
    } else {
        (grid.n() / 2) as isize
    };
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "i,x,q,exact").map_err(io)?;
    for i in 0..grid.n() as isize {
        let c = [i, j];
        writeln!(
            w,
            "{},{},{},{}",
            i,
            num(grid.cell_center(c)[0]),
            num(q.at(c)),
            num(exact.at(c))
        )
        .map_err(io)?;
    }
    finish(path, w)
}

fn write_metadata(path: &Path, config: &RunConfig, report: &RunReport) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    write!(w, "{config}").map_err(io)?;
    let o = &report.outcome;
    writeln!(w, "steps = {}", o.steps).map_err(io)?;
    writeln!(w, "dt = {}", num(o.dt)).map_err(io)?;
    writeln!(w, "time = {}", num(o.time)).map_err(io)?;
    writeln!(w, "initial_sum = {}", num(o.initial.conserved_sum())).map_err(io)?;
    writeln!(w, "final_sum = {}", num(o.solution.conserved_sum())).map_err(io)?;
    writeln!(w, "conservation_drift = {}", num(report.drift)).map_err(io)?;
    writeln!(w, "min = {}", num(report.min)).map_err(io)?;
    writeln!(w, "max = {}", num(report.max)).map_err(io)?;
    finish(path, w)
}

/// Runs `config`, writing every artifact into `config.output`.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let dir = &config.output;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let spec = config.problem()?;
    let settings = config.settings();
    let mut files = Vec::new();

    let eta_path = dir.join("eta.csv");
    let mut eta_out = if config.limiter == LimiterMode::On {
        let mut w = create(&eta_path)?;
        writeln!(w, "step,time,eta_min,eta_mean,frac_below_one")
            .map_err(|e| Error::io(&eta_path, e))?;
        Some(w)
    } else {
        None
    };

    let mut write_err: Option<Error> = None;
    let mut snapshots = Vec::new();
    let observe = |info: &StepInfo, q: &CellField| {
        if write_err.is_some() {
            return;
        }
        if let (Some(w), Some(e)) = (eta_out.as_mut(), info.eta) {
            let line = format!(
                "{},{},{},{},{}",
                info.step,
                num(info.time),
                num(e.min),
                num(e.mean),
                num(e.frac_below_one)
            );
            if let Err(err) = writeln!(w, "{line}") {
                write_err = Some(Error::io(&eta_path, err));
                return;
            }
        }
        if config.dump_every > 0 && info.step.is_multiple_of(config.dump_every) {
            let p = dir.join(format!("snapshot_{:06}.csv", info.step));
            match write_solution_csv(&p, q) {
                Ok(()) => snapshots.push(p),
                Err(err) => write_err = Some(err),
            }
        }
    };
    let outcome = solve_problem(&spec, config.n, &settings, config.t_final, observe)?;
    if let Some(err) = write_err {
        return Err(err);
    }
    if let Some(w) = eta_out {
        finish(&eta_path, w)?;
        files.push(eta_path);
    }
    files.extend(snapshots);

    let report = RunReport {
        min: outcome.solution.interior_min(),
        max: outcome.solution.interior_max(),
        drift: outcome.conservation_drift(),
        files: Vec::new(),
        outcome,
    };

    let solution = dir.join("solution.csv");
    write_solution_csv(&solution, &report.outcome.solution)?;
    files.push(solution);

    let exact = exact_solution(&spec, report.outcome.solution.grid(), report.outcome.time)?;
    let centerline = dir.join("centerline.csv");
    write_centerline_csv(&centerline, &report.outcome.solution, &exact)?;
    files.push(centerline);

    let meta = dir.join("metadata.txt");
    write_metadata(&meta, config, &report)?;
    files.push(meta);

    Ok(RunReport { files, ..report })
}
