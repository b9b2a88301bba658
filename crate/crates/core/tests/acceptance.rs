//! The twelve acceptance criteria on the standard configuration. Each test
//! prints one `PASS`/`FAIL` line to the real stdout (bypassing capture) and
//! asserts the thresholds stated below, independently of the limits the
//! runner attaches to its own metrics.

use std::io::Write;

use paraek::runner::criteria;
use paraek::runner::{CriterionReport, RunConfig};

fn value(r: &CriterionReport, name: &str) -> f64 {
    r.metric(name).unwrap_or_else(|| panic!("criterion {} has no metric {name}", r.id)).value
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Prints the verdict line, then fails the test if any check failed.
fn verdict(id: u32, title: &str, checks: &[(String, bool)]) {
    let ok = checks.iter().all(|c| c.1);
    let detail: Vec<&str> = checks.iter().map(|c| c.0.as_str()).collect();
    let line = format!(
        "{} criterion {id:>2} {title}: {}\n",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "{line}");
}

fn le(name: &str, v: f64, limit: f64) -> (String, bool) {
    (format!("{name} = {v:.3e} (<= {limit:e})"), v <= limit)
}

fn is(name: &str, ok: bool) -> (String, bool) {
    (format!("{name} = {ok}"), ok)
}

fn cfg() -> RunConfig {
    RunConfig::standard()
}

#[test]
fn criterion_01_paraproduct_exactness() {
    let r = criteria::paraproduct_exactness(&cfg()).unwrap();
    verdict(1, "paraproduct exactness", &[le("relative defect", value(&r, "relative_defect"), 1e-12)]);
}

#[test]
fn criterion_02_spectral_localization() {
    let r = criteria::spectral_localization(&cfg()).unwrap();
    let leak = value(&r, "off_band_leakage");
    let constants = value(&r, "constant_image_defect");
    verdict(
        2,
        "spectral localization",
        &[
            (format!("off-band leakage = {leak:e} (== 0)"), leak == 0.0),
            (format!("constant image defect = {constants:e} (== 0)"), constants == 0.0),
        ],
    );
}

#[test]
fn criterion_03_change_of_quantization() {
    let r = criteria::change_of_quantization(&cfg()).unwrap();
    verdict(3, "change of quantization", &[le("max entry difference", value(&r, "max_entry_difference"), 1e-12)]);
}

#[test]
fn criterion_04_composition_smoothing() {
    let c = cfg();
    assert_eq!(c.studies.composition_n_ax, 512);
    let r = criteria::composition_smoothing(&c).unwrap();
    verdict(4, "composition smoothing", &[le("LP slope", value(&r, "lp_slope"), 2.3)]);
}

#[test]
fn criterion_05_diagonalization() {
    let r = criteria::diagonalization(&cfg()).unwrap();
    let qhd = value(&r, "qhd_lambda_deviation");
    verdict(
        5,
        "diagonalization",
        &[
            le("conjugation residual", value(&r, "conjugation_residual"), 1e-12),
            le("det F residual", value(&r, "determinant_residual"), 1e-12),
            le("lambda bound excess", value(&r, "lambda_bound_excess"), 0.0),
            (format!("QHD lambda deviation = {qhd:e} (== 0)"), qhd == 0.0),
        ],
    );
}

#[test]
fn criterion_06_paralinearization() {
    let r = criteria::paralinearization(&cfg()).unwrap();
    verdict(6, "paralinearization identity", &[le("relative defect", value(&r, "relative_defect"), 1e-12)]);
}

#[test]
fn criterion_07_energy_uniformity() {
    let (_, table) = criteria::energy_uniformity(&cfg()).unwrap();
    let eps: Vec<f64> = table.rows.iter().map(|r| r.eps).collect();
    assert_eq!(eps, vec![1e-1, 1e-2, 1e-3]);
    let cauchy: Vec<f64> = table.rows.iter().map(|r| r.cauchy).collect();
    verdict(
        7,
        "energy epsilon-independence",
        &[
            le("growth ratio spread", table.spread(), 3.0),
            is(
                &format!("Cauchy differences [{}] decreasing", sci(&cauchy)),
                cauchy.windows(2).all(|w| w[1] < w[0]),
            ),
        ],
    );
}

#[test]
fn criterion_08_energy_equivalence() {
    let c = cfg();
    let res = &c.studies.equivalence_n_ax;
    assert_eq!(res.len(), 2);
    let k0 = criteria::fitted_equivalence_constant(&c, res[0]).unwrap();
    let k1 = criteria::fitted_equivalence_constant(&c, res[1]).unwrap();
    let change = (k1 - k0).abs() / k0;
    verdict(
        8,
        "modified-energy equivalence",
        &[
            is(&format!("fitted constants {k0:.4} / {k1:.4} finite"), k0.is_finite() && k1.is_finite() && k0 >= 1.0),
            le("relative constant change", change, 0.5),
        ],
    );
}

#[test]
fn criterion_09_scheme() {
    let c = cfg();
    assert_eq!(c.grid.n_ax, 128);
    let (_, run, agreement) = criteria::scheme_correctness(&c).unwrap();
    let rep = &run.report;
    // ratios d_n / d_{n-1}, checked from n = 3 on
    let q = rep.contraction_factors.iter().copied().fold(0.0, f64::max);
    verdict(
        9,
        "scheme contraction and correctness",
        &[
            is("converged", rep.converged),
            le("max contraction factor", q, 0.6),
            le("distance to reference", agreement.distance, 1e-6),
            le("scheme mass defect", rep.mass_defect, 1e-12),
            le("reference mass defect", agreement.reference_mass_defect, 1e-12),
        ],
    );
}

#[test]
fn criterion_10_galerkin_rate() {
    let (_, table) = criteria::galerkin_rate(&cfg()).unwrap();
    verdict(
        10,
        "Galerkin rate",
        &[le(
            &format!("|slope {:.3} - predicted {:.3}|", table.slope, table.predicted()),
            (table.slope - table.predicted()).abs(),
            0.5,
        )],
    );
}

#[test]
fn criterion_11_reversibility() {
    let c = cfg();
    let (_, rep) = criteria::reversibility(&c).unwrap();
    verdict(11, "reversibility", &[le("defect", rep.defect, 50.0 * c.scheme.tol_ref)]);
}

#[test]
fn criterion_12_continuity() {
    let c = cfg();
    let (_, tables) = criteria::continuity(&c).unwrap();
    let mut checks = Vec::new();
    for t in &tables {
        let mut h: Vec<f64> = t.rows.iter().map(|r| r.h).collect();
        h.sort_by(|a, b| b.total_cmp(a));
        assert!(h.first().unwrap() / h.last().unwrap() >= 99.0, "needs three decades of h");
        let errs: Vec<f64> = t.rows.iter().map(|r| r.error).collect();
        checks.push(is(&format!("errors [{}] strictly decreasing", sci(&errs)), t.strictly_decreasing()));
    }
    verdict(12, "flow-map continuity", &checks);
}
