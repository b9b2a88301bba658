//! Suites: named batteries of criteria with their on-disk artifacts.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::config::RunConfig;
use super::criteria::{self, CriterionReport};
use crate::error::{Error, Result};
use crate::flow::write_energy_csv;
use crate::scheme::{write_report, write_trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Calculus,
    Energy,
    Scheme,
    Convergence,
    Reversibility,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Calculus,
        Suite::Energy,
        Suite::Scheme,
        Suite::Convergence,
        Suite::Reversibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Calculus => "calculus",
            Suite::Energy => "energy",
            Suite::Scheme => "scheme",
            Suite::Convergence => "convergence",
            Suite::Reversibility => "reversibility",
        }
    }

    /// Criteria run by this suite; each criterion belongs to one suite.
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Suite::Calculus => &[1, 2, 3, 4, 5, 6],
            Suite::Energy => &[7, 8],
            Suite::Scheme => &[9],
            Suite::Convergence => &[10, 12],
            Suite::Reversibility => &[11],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite '{s}'")))
    }
}

/// One line of `diagnostics.csv`.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsRow {
    pub experiment: String,
    pub metric: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
    pub suite: &'static str,
    pub seed: u64,
    pub n_ax: usize,
}

/// Appends rows to a CSV file, writing the header only when the file is new
/// or empty.
pub struct DiagnosticsLog {
    path: PathBuf,
}

impl DiagnosticsLog {
    pub fn new(path: PathBuf) -> Self {
        Self { path }
    }

    pub fn append(&self, rows: &[DiagnosticsRow]) -> Result<()> {
        let fresh = fs::metadata(&self.path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
        for r in rows {
            w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub reports: Vec<CriterionReport>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }

    /// `criterion/metric` of every failing metric.
    pub fn failures(&self) -> Vec<String> {
        self.reports
            .iter()
            .flat_map(|r| r.failing().into_iter().map(move |m| format!("c{:02}/{m}", r.id)))
            .collect()
    }
}

fn to_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// Runs one criterion and writes its artifacts under `dir`.
pub fn run_criterion(cfg: &RunConfig, id: u32, dir: &Path) -> Result<CriterionReport> {
    Ok(match id {
        1 => criteria::paraproduct_exactness(cfg)?,
        2 => criteria::spectral_localization(cfg)?,
        3 => criteria::change_of_quantization(cfg)?,
        4 => criteria::composition_smoothing(cfg)?,
        5 => criteria::diagonalization(cfg)?,
        6 => criteria::paralinearization(cfg)?,
        7 => {
            let (r, table) = criteria::energy_uniformity(cfg)?;
            write_energy_csv(&dir.join("energy.csv"), &table.probes)?;
            to_json(&dir.join("energy_growth.json"), &table)?;
            r
        }
        8 => criteria::energy_equivalence(cfg)?,
        9 => {
            let (r, run, agreement) = criteria::scheme_correctness(cfg)?;
            write_report(dir, &run.report)?;
            to_json(&dir.join("agreement.json"), &agreement)?;
            let stride = (run.trajectory.len() / 20).max(1);
            write_trajectory(&dir.join("trajectory"), &run.trajectory, stride)?;
            r
        }
        10 => {
            let (r, table) = criteria::galerkin_rate(cfg)?;
            to_json(&dir.join("galerkin.json"), &table)?;
            r
        }
        11 => {
            let (r, rep) = criteria::reversibility(cfg)?;
            to_json(&dir.join("reversibility.json"), &rep)?;
            r
        }
        12 => {
            let (r, tables) = criteria::continuity(cfg)?;
            to_json(&dir.join("continuity.json"), &tables)?;
            r
        }
        _ => return Err(Error::Parameter(format!("no criterion {id}"))),
    })
}

/// Executes a suite, writing `diagnostics.csv`, `summary.json` and the
/// per-criterion artifacts into `out/<suite>/`.
pub fn run_suite(cfg: &RunConfig, suite: Suite, out: &Path) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let dir = out.join(suite.name());
    fs::create_dir_all(&dir)?;
    let log = DiagnosticsLog::new(dir.join("diagnostics.csv"));
    // a new run starts a new log
    fs::write(dir.join("diagnostics.csv"), "")?;
    let mut reports = Vec::new();
    for &id in suite.criteria() {
        let r = run_criterion(cfg, id, &dir)?;
        let rows: Vec<DiagnosticsRow> = r
            .metrics
            .iter()
            .map(|m| DiagnosticsRow {
                experiment: format!("c{:02}_{}", r.id, r.title.replace(' ', "_")),
                metric: m.name.clone(),
                value: m.value,
                limit: m.limit,
                pass: m.pass,
                suite: suite.name(),
                seed: cfg.seed,
                n_ax: cfg.grid.n_ax,
            })
            .collect();
        log.append(&rows)?;
        reports.push(r);
    }
    let outcome = SuiteOutcome { suite, reports };
    to_json(&dir.join("summary.json"), &outcome)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_has_exactly_one_suite() {
        let mut ids: Vec<u32> = Suite::ALL.iter().flat_map(|s| s.criteria().iter().copied()).collect();
        ids.sort_unstable();
        assert_eq!(ids, (1..=12).collect::<Vec<_>>());
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn log_writes_one_header() {
        let dir = tempfile::tempdir().unwrap();
        let log = DiagnosticsLog::new(dir.path().join("d.csv"));
        let row = DiagnosticsRow {
            experiment: "c01".into(),
            metric: "m".into(),
            value: 0.5,
            limit: 1.0,
            pass: true,
            suite: "calculus",
            seed: 3,
            n_ax: 16,
        };
        log.append(std::slice::from_ref(&row)).unwrap();
        log.append(&[row]).unwrap();
        let text = fs::read_to_string(dir.path().join("d.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), "experiment,metric,value,limit,pass,suite,seed,n_ax");
    }
}
