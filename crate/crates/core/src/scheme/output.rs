//! On-disk artifacts of a scheme run.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::iterate::SolveReport;
use crate::error::Result;
use crate::field::FieldFlags;
use crate::field::FourierField;
use crate::flow::Trajectory;

/// Writes `report.json` and `trace.csv` into `dir`.
pub fn write_report(dir: &Path, report: &SolveReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    fs::write(dir.join("trace.csv"), report.trace.to_csv())?;
    Ok(())
}

#[derive(Serialize)]
struct ManifestEntry {
    t: f64,
    file: String,
}

#[derive(Serialize)]
struct Manifest {
    component: &'static str,
    snapshots: Vec<ManifestEntry>,
}

/// Writes every `stride`-th state's `u` component (and the last one) as
/// field snapshots plus a `manifest.json` listing times and files.
pub fn write_trajectory(dir: &Path, traj: &Trajectory, stride: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    let g = traj.grid();
    let n = g.num_modes();
    let stride = stride.max(1);
    let mut snapshots = Vec::new();
    for k in 0..traj.len() {
        if k % stride != 0 && k + 1 != traj.len() {
            continue;
        }
        let file = format!("u_{k:06}.json");
        let u = FourierField::from_coeffs(g, traj.states[k][..n].to_vec(), FieldFlags::COMPLEX)?;
        u.write_snapshot(&dir.join(&file))?;
        snapshots.push(ManifestEntry { t: traj.times[k], file });
    }
    let m = Manifest {
        component: "u",
        snapshots,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}
