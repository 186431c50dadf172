//! The subcommands. Each returns its artifacts as `(file name, contents)`
//! pairs so that `report` can reuse them.

use std::f64::consts::PI;

use esf_core::cascade::sample_phi_m;
use esf_core::digits::digit_set;
use esf_core::format::{json_number, sig17};
use esf_core::matana::{certify_isotropy, invariance_residual, orthogonal_part, validate_dilation};
use esf_core::properties::{run_all, CheckStatus, PropertyConfig};
use esf_core::spectral::{SpectralOptions, SpectralProfile};
use esf_core::trigpoly::refinement_coefficients;
use esf_core::{DilationMatrix, IntMatrix, PropertyReport};
use serde_json::json;

use crate::config::JobConfig;
use crate::output::json_text;
use crate::CliError;

pub type Artifact = (String, String);

fn dilation(cfg: &JobConfig) -> Result<DilationMatrix, CliError> {
    let m = IntMatrix::from_rows(&cfg.matrix)?;
    Ok(validate_dilation(&m)?)
}

fn profile(cfg: &JobConfig) -> Result<SpectralProfile, CliError> {
    let a = dilation(cfg)?;
    let options = SpectralOptions { tol: cfg.tol, grid_n: cfg.grid_n, ..SpectralOptions::default() };
    Ok(SpectralProfile::with_options(&a, cfg.m, options)?)
}

fn rows_json(m: &nalgebra::DMatrix<f64>) -> serde_json::Value {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| json_number(m[(i, j)])).collect::<Vec<_>>())
        .collect()
}

/// Isotropy certificate, `Q²`, `U` and both digit sets. A non-isotropic
/// matrix still yields the certificate, followed by exit code 3.
pub fn analyze(cfg: &JobConfig) -> Result<(serde_json::Value, Option<CliError>), CliError> {
    let a = dilation(cfg)?;
    let cert = certify_isotropy(&a);
    let mut out = json!({
        "matrix": a.matrix(),
        "dim": a.dim(),
        "q": a.q(),
        "isotropic": cert.isotropic,
        "digits_A": digit_set(a.matrix()).to_json(),
        "digits_AT": digit_set(a.transpose().matrix()).to_json(),
    });
    let Some(q2) = cert.witness.clone() else {
        let reason = cert.failure_reason.map(|r| r.to_string()).unwrap_or_default();
        out["failure_reason"] = json!(reason);
        return Ok((out, Some(CliError::NotIsotropic(reason))));
    };
    let u = orthogonal_part(&a, &q2)?;
    out["Q2"] = rows_json(q2.matrix());
    out["Q2_degenerate"] = json!(q2.degenerate);
    out["invariance_residual"] = json_number(invariance_residual(&a, &q2));
    out["U"] = rows_json(&u.u);
    out["orthogonality_defect"] = json_number(u.orthogonality_defect());
    Ok((out, None))
}

/// `m₀`, its `m`-th power and the refinement coefficients of `φᵐ`.
pub fn mask(cfg: &JobConfig) -> Result<(serde_json::Value, String), CliError> {
    let p = profile(cfg)?;
    let a = p.matrix();
    let mm = p.mask_of_order();
    let c = refinement_coefficients(&mm, a.q())?;
    let text = format!("m0(xi) = {}\nm0(xi)^{} = {}\n", p.mask().cosine_form(), cfg.m, mm.cosine_form());
    let out = json!({
        "matrix": a.matrix(),
        "m": cfg.m,
        "mask": p.mask().to_json(),
        "cosine_form": p.mask().cosine_form(),
        "mask_m": mm.to_json(),
        "mask_m_cosine_form": mm.cosine_form(),
        "refinement_coefficients": c,
    });
    Ok((out, text))
}

/// Rows `ξ, μ(ξ), φ̂ᵐ(ξ)` on a tensor grid of `[−2π, 2π]ᵈ`, at most about
/// 65536 rows.
fn spectrum_csv(p: &SpectralProfile, grid_n: usize) -> String {
    let d = p.dim();
    let cap = (65536f64.powf(1.0 / d as f64)).floor() as usize;
    let n = grid_n.min(cap).max(2);
    let mut out = format!("# A={}, m={}, d={}\n", p.matrix().matrix(), p.order(), d);
    let cols: Vec<String> = (1..=d).map(|i| format!("xi_{i}")).collect();
    out.push_str(&format!("{},mu,phi_hat\n", cols.join(",")));
    let h = 4.0 * PI / (n - 1) as f64;
    for idx in 0..n.pow(d as u32) {
        let mut rest = idx;
        let mut xi = vec![0.0; d];
        for c in (0..d).rev() {
            xi[c] = -2.0 * PI + h * (rest % n) as f64;
            rest /= n;
        }
        for x in &xi {
            out.push_str(&sig17(*x));
            out.push(',');
        }
        out.push_str(&sig17(p.mu(&xi)));
        out.push(',');
        out.push_str(&sig17(p.phi_hat(&xi)));
        out.push('\n');
    }
    out
}

pub fn spectrum(cfg: &JobConfig) -> Result<(serde_json::Value, String), CliError> {
    let p = profile(cfg)?;
    let mut out = p.spectrum_json();
    out["matrix"] = json!(p.matrix().matrix());
    out["m"] = json!(cfg.m);
    Ok((out, spectrum_csv(&p, cfg.grid_n)))
}

/// Lattice values of `φᵐ` at level `J` as CSV.
pub fn eval(cfg: &JobConfig) -> Result<String, CliError> {
    let p = profile(cfg)?;
    let grid = sample_phi_m(p.matrix(), p.mask(), cfg.m, cfg.level)?;
    Ok(grid.to_csv())
}

pub fn verify(cfg: &JobConfig) -> Result<PropertyReport, CliError> {
    let p = profile(cfg)?;
    let pc = PropertyConfig { level: cfg.level, grid_n: cfg.grid_n, seed: cfg.seed, ..PropertyConfig::default() };
    Ok(run_all(&p, &pc))
}

/// One line per check on stderr, with runtimes.
pub fn summarize(report: &PropertyReport) {
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "skip",
        };
        eprintln!("{tag:4} {:30} {:>12.4e} (tol {:.1e}, {:.1} ms) {}", c.name, c.residual, c.tolerance, c.runtime_ms, c.detail);
    }
}

pub fn report_outcome(report: &PropertyReport) -> Result<(), CliError> {
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> =
            report.checks.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name.as_str()).collect();
        Err(CliError::Failed(failed.join(", ")))
    }
}

/// Every stage in sequence. Cascade failures are recorded in the property
/// report rather than aborting.
pub fn report(cfg: &JobConfig, with_timing: bool) -> Result<(Vec<Artifact>, PropertyReport), CliError> {
    let (analysis, problem) = analyze(cfg)?;
    if let Some(e) = problem {
        return Err(e);
    }
    let (mask_json, mask_text) = mask(cfg)?;
    let (spec_json, spec_csv) = spectrum(cfg)?;
    let mut artifacts = vec![
        ("analyze.json".to_string(), json_text(&analysis)),
        ("mask.json".to_string(), json_text(&mask_json)),
        ("mask.txt".to_string(), mask_text),
        ("spectrum.json".to_string(), json_text(&spec_json)),
        ("spectrum.csv".to_string(), spec_csv),
    ];
    if let Ok(csv) = eval(cfg) {
        artifacts.push(("phi.csv".to_string(), csv));
    }
    let rep = verify(cfg)?;
    artifacts.push(("report.json".to_string(), json_text(&rep.to_json(with_timing))));
    Ok((artifacts, rep))
}
