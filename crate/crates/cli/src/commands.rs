use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{ensure_dir, num, opt, write_file, write_sidecar, Csv};
use rayon::prelude::*;
use serde::Serialize;
use thermal_decoherence::constants::{coefficient_catalog, table, table_hash};
use thermal_decoherence::decoherence::{regime_classify, s_exact, s_reduced, s_regime};
use thermal_decoherence::interference::{
    s12_closed, s12_first_principles, screen_pattern_with_exponent, TwoPacketConfig, S12_TOL,
};
use thermal_decoherence::units::{to_dimensionless, DimensionlessPoint, PhysicalConfig};
use thermal_decoherence::validation::{run_validation, ValidateOptions};
use thermal_decoherence::wigner::{gaussian_wigner, momentum_damping_evolve, wigner_transform, DensitySlice};
use thermal_decoherence::Vec3;

pub const SWEEP_HEADER: &str = "tau_hat,y_hat,v,alpha,S_exact,S_reduced,S_regime,regime,abs_err";
pub const VISIBILITY_HEADER: &str = "tau_hat,dv,S12_closed,S12_first_principles,visibility";
pub const SCREEN_HEADER: &str = "x,density,rho1,rho2,cross";
pub const WIGNER_HEADER: &str = "k,W0,Wt";

/// Grid points in lexicographic order of the axis indices.
fn sweep_points(cfg: &RunConfig) -> Result<Vec<DimensionlessPoint>, CliError> {
    let sw = &cfg.sweep;
    let phys = &cfg.physical;
    let physical_axes = sw.temperature.is_some() || sw.time.is_some() || sw.separation.is_some();
    if physical_axes {
        let temps = sw.temperature.as_ref().map(|g| g.values()).unwrap_or(vec![phys.temperature]);
        let times = sw.time.as_ref().map(|g| g.values()).unwrap_or(vec![phys.time]);
        let dir = [phys.separation, phys.momentum, Vec3::Z]
            .into_iter()
            .find(|v| v.norm() > 0.0)
            .unwrap_or(Vec3::Z)
            .unit_or_zero();
        let seps = sw.separation.as_ref().map(|g| g.values()).unwrap_or(vec![phys.separation.norm()]);
        let mut out = Vec::with_capacity(temps.len() * times.len() * seps.len());
        for &temperature in &temps {
            for &time in &times {
                for &sep in &seps {
                    let p = PhysicalConfig {
                        temperature,
                        time,
                        separation: dir * sep,
                        ..*phys
                    };
                    out.push(to_dimensionless(&p)?);
                }
            }
        }
        return Ok(out);
    }
    let base = to_dimensionless(phys)?;
    let default_axis = || vec![0.1, 1.0, 10.0];
    let (taus, ys) = match (&sw.tau_hat, &sw.y_hat) {
        (None, None) => (default_axis(), default_axis()),
        (t, y) => (
            t.as_ref().map(|g| g.values()).unwrap_or(vec![base.tau_hat]),
            y.as_ref().map(|g| g.values()).unwrap_or(vec![base.y_hat]),
        ),
    };
    let v = sw.v.unwrap_or(base.v);
    let alpha = sw.alpha.unwrap_or(base.alpha_eff);
    let cos = sw.cos_py.unwrap_or(1.0);
    let mut out = Vec::with_capacity(taus.len() * ys.len());
    for &t in &taus {
        for &y in &ys {
            out.push(DimensionlessPoint::new(alpha, v, t, y, cos)?);
        }
    }
    Ok(out)
}

struct SweepRow {
    pt: DimensionlessPoint,
    exact: Option<f64>,
    reduced: Option<f64>,
    regime: Option<f64>,
    label: &'static str,
    err: Option<f64>,
}

fn sweep_row(cfg: &RunConfig, pt: DimensionlessPoint) -> Result<SweepRow, CliError> {
    let m = cfg.method;
    let exact = if m.exact() { Some(s_exact(&pt, cfg.tol)?) } else { None };
    // the reduced form assumes ŷ ∥ p
    let aligned = pt.cos_py.abs() == 1.0 || pt.y_hat == 0.0;
    let reduced = if m.reduced() && aligned { Some(s_reduced(&pt, cfg.tol)?) } else { None };
    let regime = if m.regime() { s_regime(&pt) } else { None };
    let err = [&exact, &reduced]
        .into_iter()
        .flatten()
        .map(|r| r.error_estimate)
        .reduce(f64::max);
    Ok(SweepRow {
        pt,
        exact: exact.map(|r| r.s_value),
        reduced: reduced.map(|r| r.s_value),
        regime: regime.map(|r| r.s_value),
        label: regime_classify(pt.tau_hat, pt.y_hat).name(),
        err,
    })
}

#[derive(Serialize)]
struct SweepSummary {
    rows: usize,
    max_abs_err: f64,
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let points = sweep_points(cfg)?;
    let rows: Vec<SweepRow> = points
        .into_par_iter()
        .map(|pt| sweep_row(cfg, pt))
        .collect::<Result<_, _>>()?;
    let mut csv = Csv::new(SWEEP_HEADER);
    for r in &rows {
        csv.row([
            num(r.pt.tau_hat),
            num(r.pt.y_hat),
            num(r.pt.v),
            num(r.pt.alpha_eff),
            opt(r.exact),
            opt(r.reduced),
            opt(r.regime),
            r.label.to_string(),
            opt(r.err),
        ]);
    }
    ensure_dir(&cfg.out)?;
    let path = cfg.out.join("sweep.csv");
    csv.write(&path)?;
    let summary = SweepSummary {
        rows: rows.len(),
        max_abs_err: rows.iter().filter_map(|r| r.err).fold(0.0, f64::max),
    };
    write_sidecar(cfg, "sweep", &["sweep.csv".to_string()], summary)?;
    println!("sweep: {} rows -> {}", rows.len(), path.display());
    Ok(())
}

fn packets(cfg: &RunConfig, tau_hat: f64, dv: f64, grid: Vec<f64>) -> TwoPacketConfig {
    let vis = &cfg.visibility;
    TwoPacketConfig {
        v1: Vec3::new(0.0, 0.0, 0.5 * dv),
        v2: Vec3::new(0.0, 0.0, -0.5 * dv),
        packet_width: vis.packet_width,
        screen_axis: Vec3::Z,
        screen_grid: grid,
        alpha_eff: vis.alpha.unwrap_or_else(|| cfg.alpha_eff()),
        tau_hat,
        phase_scale: vis.phase_scale.unwrap_or_else(|| cfg.phase_scale()),
        amplitudes: [1.0, 1.0],
    }
}

#[derive(Serialize)]
struct VisibilitySummary {
    rows: usize,
    screen: Option<ScreenSummary>,
}

#[derive(Serialize)]
struct ScreenSummary {
    s12: f64,
    predicted_visibility: f64,
    /// Fringe contrast, or the reason it is undefined.
    fringe_visibility: Result<f64, String>,
    overlap: f64,
}

pub fn visibility(cfg: &RunConfig) -> Result<(), CliError> {
    let vis = &cfg.visibility;
    let mut pairs = Vec::new();
    for &t in &vis.tau_hat.values() {
        for &dv in &vis.dv.values() {
            pairs.push((t, dv));
        }
    }
    let rows: Vec<(f64, f64, f64, f64)> = pairs
        .into_par_iter()
        .map(|(t, dv)| {
            let pc = packets(cfg, t, dv, vec![0.0, 1.0]);
            let fp = s12_first_principles(&pc, S12_TOL)?;
            Ok((t, dv, s12_closed(t, dv.abs(), pc.alpha_eff), fp))
        })
        .collect::<Result<_, CliError>>()?;
    let mut csv = Csv::new(VISIBILITY_HEADER);
    for &(t, dv, cl, fp) in &rows {
        csv.row([num(t), num(dv), num(cl), num(fp), num((-fp).exp())]);
    }
    ensure_dir(&cfg.out)?;
    csv.write(&cfg.out.join("visibility.csv"))?;
    let mut outputs = vec!["visibility.csv".to_string()];
    let screen = match &vis.screen {
        None => None,
        Some(sc) => {
            let pc = packets(cfg, sc.tau_hat, sc.dv, sc.x.values());
            let s12 = s12_first_principles(&pc, S12_TOL)?;
            let pat = screen_pattern_with_exponent(&pc, s12)?;
            let mut csv = Csv::new(SCREEN_HEADER);
            for i in 0..pat.positions.len() {
                csv.row([
                    num(pat.positions[i]),
                    num(pat.density[i]),
                    num(pat.rho1[i]),
                    num(pat.rho2[i]),
                    num(pat.cross[i]),
                ]);
            }
            csv.write(&cfg.out.join("screen.csv"))?;
            outputs.push("screen.csv".to_string());
            Some(ScreenSummary {
                s12,
                predicted_visibility: pat.visibility,
                fringe_visibility: pat.fringe_visibility().map_err(|e| e.to_string()),
                overlap: pat.overlap,
            })
        }
    };
    write_sidecar(cfg, "visibility", &outputs, VisibilitySummary { rows: rows.len(), screen })?;
    println!("visibility: {} rows -> {}", rows.len(), cfg.out.join("visibility.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct WignerSummary {
    gaussian_residual: f64,
    integral_w0: f64,
    integral_wt: f64,
    nyquist_limit: f64,
}

pub fn wigner(cfg: &RunConfig) -> Result<(), CliError> {
    let w = &cfg.wigner;
    let slice = DensitySlice::gaussian(w.a, w.p, w.half_width, w.n)?;
    let k = w.k.values();
    let w0 = wigner_transform(&slice, &k)?;
    let wt = momentum_damping_evolve(&w0, w.b, w.t)?;
    let residual = k
        .iter()
        .zip(&w0.values)
        .map(|(&k, &v)| (v - gaussian_wigner(w.a, w.p, k)).abs())
        .fold(0.0, f64::max);
    let mut csv = Csv::new(WIGNER_HEADER);
    for i in 0..k.len() {
        csv.row([num(k[i]), num(w0.values[i]), num(wt.values[i])]);
    }
    ensure_dir(&cfg.out)?;
    csv.write(&cfg.out.join("wigner.csv"))?;
    let summary = WignerSummary {
        gaussian_residual: residual,
        integral_w0: w0.integral(),
        integral_wt: wt.integral(),
        nyquist_limit: std::f64::consts::PI / slice.max_spacing(),
    };
    write_sidecar(cfg, "wigner", &["wigner.csv".to_string()], summary)?;
    println!("gaussian_residual={}", num(residual));
    Ok(())
}

pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let opts = ValidateOptions {
        seed: cfg.seed,
        tol: cfg.tol,
        quick: cfg.quick,
    };
    let report = run_validation(&opts);
    ensure_dir(&cfg.out)?;
    let path = cfg.out.join("validate.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(&path, &(text + "\n"))?;
    for r in &report.required {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag}  {}  |diff| {} allowed {}", r.quantity, num(r.abs_diff), num(r.allowed));
    }
    for a in &report.adjudications {
        println!("INFO  {}  measured {} supports {}", a.quantity, num(a.measured), a.supported);
    }
    for d in &report.known_deviations {
        println!("DEVIATION  {}  rel {}", d.quantity, num(d.rel_diff));
    }
    println!("report -> {}", path.display());
    if let Some(msg) = report.aborted {
        return Err(CliError::ValidationAborted {
            message: msg,
            budget: report.budget_exhausted,
        });
    }
    let failed = report.required.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed(failed));
    }
    Ok(())
}

pub fn constants() -> Result<(), CliError> {
    println!("name,expression,value,context");
    for c in coefficient_catalog() {
        println!("{},{},{},\"{}\"", c.name, c.expression, num(c.value), c.context);
    }
    println!();
    for (name, value) in table() {
        println!("{name}={}", num(value));
    }
    println!("table_hash={}", table_hash());
    Ok(())
}
