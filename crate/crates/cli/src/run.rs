//! Scenario execution and CSV output.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use optomech::estimation::{sweep_phase, sweep_temperature, sweep_time, DerivativeStep, SweepOutcome};
use optomech::oracle::TruncatedOracle;
use optomech::spectral::{dft, find_peaks, Spectrum, TimeSeries};
use optomech::{evolve_series, Error, InitialOpticalState, ModelParams, OpticalState, Result};

use crate::config::{PeriodBasis, RunConfig, Scenario, MAX_GRID};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

struct Output<'a> {
    dir: &'a Path,
    summary: RunSummary,
}

impl Output<'_> {
    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        self.summary.files.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.summary.files.push(path);
        Ok(())
    }

    fn note(&mut self, s: String) {
        log::info!("{s}");
        self.summary.notes.push(s);
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn initial_state(cfg: &RunConfig) -> Result<InitialOpticalState<f64>> {
    InitialOpticalState::two_level(cfg.state, cfg.s).map_err(|e| Error::Config(e.to_string()))
}

fn step(cfg: &RunConfig) -> DerivativeStep<f64> {
    cfg.step.map_or(DerivativeStep::Auto, DerivativeStep::Relative)
}

/// Uniform grid starting at `start_periods` slow periods, `periods` long.
/// With `closed` the end point is included.
pub fn time_grid(cfg: &RunConfig, closed: bool) -> Result<Vec<f64>> {
    let p = &cfg.params;
    let slow = p.slow_period()?;
    let basis = match cfg.period_basis {
        PeriodBasis::Fast => p.fast_period()?,
        PeriodBasis::Slow => slow,
    };
    let dt = basis / cfg.samples_per_period as f64;
    let span = cfg.periods * slow;
    let steps = (span / dt).round();
    if !(steps >= 1.0) {
        return Err(Error::Config("field 'periods' gives an empty time grid".into()));
    }
    if steps > MAX_GRID as f64 {
        return Err(Error::Config(format!(
            "time grid would have {steps:e} samples; lower 'samples_per_period' or set 'period_basis = slow'"
        )));
    }
    let n = steps as usize + usize::from(closed);
    let t0 = cfg.start_periods * slow;
    Ok((0..n).map(|k| t0 + k as f64 * dt).collect())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

const EVOLUTION_HEADER: [&str; 7] = ["t", "r_x", "r_y", "r_z", "purity", "re_a01", "im_a01"];
const FISHER_HEADER: [&str; 9] = ["t", "g2", "step", "qfi", "cfi_photo", "cfi_bhd", "phi", "n_th", "T"];

fn evolution_rows(states: &[OpticalState<f64>]) -> Result<Vec<Vec<String>>> {
    states
        .iter()
        .map(|st| {
            let [x, y, z] = st.bloch()?;
            let a01 = st.get(0, 1);
            Ok(vec![
                num(st.time),
                num(x),
                num(y),
                num(z),
                num(st.purity()),
                num(a01.re),
                num(a01.im),
            ])
        })
        .collect()
}

fn fisher_rows(outcome: &SweepOutcome<f64>) -> Vec<Vec<String>> {
    outcome
        .records
        .iter()
        .map(|r| {
            vec![
                num(r.t),
                num(r.g2),
                num(r.step),
                num(r.qfi),
                num(r.cfi_photodetection),
                opt(r.cfi_bhd),
                num(r.phi),
                num(r.n_th),
                opt(r.temperature),
            ]
        })
        .collect()
}

fn write_fisher(out: &mut Output, outcomes: &[SweepOutcome<f64>]) -> Result<()> {
    let rows: Vec<Vec<String>> = outcomes.iter().flat_map(fisher_rows).collect();
    out.csv("fisher.csv", &FISHER_HEADER, rows)?;
    let failures: Vec<Vec<String>> = outcomes
        .iter()
        .flat_map(|o| &o.failures)
        .map(|f| vec![f.index.to_string(), num(f.coordinate), f.message.clone()])
        .collect();
    if !failures.is_empty() {
        out.note(format!("{} grid points failed; see failures.csv", failures.len()));
        out.csv("failures.csv", &["index", "coordinate", "error"], failures)?;
    }
    Ok(())
}

fn write_spectrum(out: &mut Output, stem: &str, s: &Spectrum, threshold: f64) -> Result<()> {
    out.csv(
        &format!("{stem}.csv"),
        &["frequency", "amplitude"],
        s.frequencies
            .iter()
            .zip(&s.amplitudes)
            .map(|(f, a)| vec![num(*f), num(*a)]),
    )?;
    let peaks = find_peaks(s, threshold);
    out.csv(
        &format!("peaks{}.csv", stem.strip_prefix("spectrum").unwrap_or("")),
        &["frequency", "amplitude", "bin_index"],
        peaks
            .iter()
            .map(|p| vec![num(p.frequency), num(p.amplitude), p.bin.to_string()]),
    )
}

/// Runs the configured scenario, writing CSVs and the manifest into `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(dir)?;
    let mut out = Output {
        dir,
        summary: RunSummary::default(),
    };
    out.text(MANIFEST_FILE, &cfg.manifest())?;
    let p = &cfg.params;
    p.validate_blocks(1)?;
    let sigma0 = initial_state(cfg)?;
    let delta = p.beat_frequency()?;
    out.note(format!(
        "Delta = {delta:e}, delta = {:e}, slow period = {:e}",
        p.fast_frequency()?,
        p.slow_period()?
    ));

    match cfg.scenario {
        Scenario::Bloch | Scenario::RxEvolution | Scenario::Purity => {
            let times = time_grid(cfg, true)?;
            let states = evolve_series(p, &sigma0, &times)?;
            let name = match cfg.scenario {
                Scenario::Bloch => "bloch.csv",
                Scenario::RxEvolution => "rx.csv",
                _ => "purity.csv",
            };
            out.csv(name, &EVOLUTION_HEADER, evolution_rows(&states)?)?;
        }
        Scenario::Spectrum => {
            let times = time_grid(cfg, false)?;
            let states = evolve_series(p, &sigma0, &times)?;
            out.csv("rx.csv", &EVOLUTION_HEADER, evolution_rows(&states)?)?;
            let rx = states
                .iter()
                .map(|s| s.bloch().map(|b| b[0]))
                .collect::<Result<Vec<_>>>()?;
            let series = TimeSeries::from_samples(&times, rx)?;
            let full = dft(&series, cfg.window, cfg.zero_pad)?;
            write_spectrum(&mut out, "spectrum", &full, cfg.peak_threshold)?;
            if cfg.period_basis == PeriodBasis::Fast {
                // one sample per fast period isolates the slow envelope
                let strobe = series.decimate(cfg.samples_per_period)?;
                if strobe.len() >= 2 {
                    let slow = dft(&strobe, cfg.window, cfg.zero_pad)?;
                    write_spectrum(&mut out, "spectrum_slow", &slow, cfg.peak_threshold)?;
                }
            }
            out.note(format!(
                "expected peaks: Delta/2pi = {:e}, delta/2pi = {:e}, bin width {:e}",
                delta / TAU,
                p.fast_frequency()? / TAU,
                full.bin_width
            ));
        }
        Scenario::QfiTime | Scenario::CfiVsQfi => {
            let times = time_grid(cfg, true)?;
            let o = sweep_time(p, &sigma0, &times, cfg.phi, step(cfg));
            write_fisher(&mut out, &[o])?;
        }
        Scenario::PhaseSweep => {
            let t = match cfg.time {
                Some(t) => t,
                None => TAU * (1.0 / delta + 1.0 / p.fast_frequency()?),
            };
            let phis = linspace(0.0, TAU, cfg.phase_points);
            let o = sweep_phase(p, &sigma0, t, &phis, step(cfg));
            if let Some(best) = o.records.iter().filter_map(|r| r.cfi_bhd).reduce(f64::max) {
                let q = o.records[0].qfi;
                out.note(format!(
                    "t = {t:e}: QFI = {q:e}, max CFI over phi = {best:e} (ratio {})",
                    best / q
                ));
            }
            write_fisher(&mut out, &[o])?;
        }
        Scenario::TemperatureSweep => {
            let temps = logspace(cfg.temperature_min, cfg.temperature_max, cfg.temperature_points);
            let slow = p.slow_period()?;
            let outcomes: Vec<_> = cfg
                .recurrences
                .iter()
                .map(|&n| sweep_temperature(p, &sigma0, n as f64 * slow, &temps, cfg.phi, step(cfg)))
                .collect();
            for (n, o) in cfg.recurrences.iter().zip(&outcomes) {
                if let Some(best) = o.records.iter().max_by(|a, b| a.qfi.total_cmp(&b.qfi)) {
                    out.note(format!(
                        "N = {n}: QFI maximal at T = {:?} K",
                        best.temperature.unwrap_or(f64::NAN)
                    ));
                }
            }
            write_fisher(&mut out, &outcomes)?;
        }
        Scenario::OracleCheck => {
            let rows = oracle_rows(p, &sigma0, cfg)?;
            let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
            out.note(format!("max |closed - oracle| = {worst:e}"));
            out.csv(
                "oracle.csv",
                &[
                    "t",
                    "n",
                    "m",
                    "re_closed",
                    "im_closed",
                    "re_oracle",
                    "im_oracle",
                    "abs_error",
                ],
                rows.into_iter().map(|r| r.0),
            )?;
        }
    }
    out.text("plot.py", PLOT_SCRIPT)?;
    Ok(out.summary)
}

fn oracle_rows(
    p: &ModelParams<f64>,
    sigma0: &InitialOpticalState<f64>,
    cfg: &RunConfig,
) -> Result<Vec<(Vec<String>, f64)>> {
    let times = linspace(0.0, cfg.periods * p.slow_period()?, cfg.oracle_points);
    let oracle = TruncatedOracle::new(p, sigma0.dim(), cfg.nmech)?;
    let closed = evolve_series(p, sigma0, &times)?;
    let mut rows = Vec::new();
    for (t, c) in times.iter().zip(&closed) {
        let o = oracle.reduced_state(sigma0, *t)?;
        for n in 0..sigma0.dim() {
            for m in 0..=n {
                let (a, b) = (c.get(n, m), o.get(n, m));
                let err = (a - b).norm();
                rows.push((
                    vec![
                        num(*t),
                        n.to_string(),
                        m.to_string(),
                        num(a.re),
                        num(a.im),
                        num(b.re),
                        num(b.im),
                        num(err),
                    ],
                    err,
                ));
            }
        }
    }
    Ok(rows)
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
# Plots every CSV in this directory: first column against the others.
import csv, glob, os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
    with open(path) as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        continue
    header, data = rows[0], rows[1:]
    def col(i):
        try:
            return [float(r[i]) if r[i] else float("nan") for r in data]
        except ValueError:
            return None
    x = col(0)
    if x is None:
        continue
    fig, ax = plt.subplots()
    for i, name in enumerate(header[1:], start=1):
        y = col(i)
        if y is not None:
            ax.plot(x, y, label=name)
    ax.set_xlabel(header[0])
    ax.legend()
    fig.savefig(path[:-4] + ".png", dpi=120)
    plt.close(fig)
    print("wrote", path[:-4] + ".png", file=sys.stderr)
"#;
