//! `solve`, `reconstruct` and `pipeline`.

use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use g2cyclic::frenet::{curve_checks, export_curve, geodesic_h32_check, path_dependence, reconstruct, slice_defect, structure_defects};
use g2cyclic::solver::*;

use crate::config::RunConfig;
use crate::summary::{Check, Outcome};

fn solve_into(problem: &SolverProblem, out: &mut Outcome) -> Result<Solution> {
    let t = Instant::now();
    let sol = newton_solve(problem).context("solving")?;
    out.note(format!("solve: {}x{} grid, {} Newton steps, {:.2} s", problem.nx, problem.ny, sol.report.iterations, t.elapsed().as_secs_f64()));
    out.note(format!("slot constant: {}", sol.report.slot_constant));
    export_metric(problem, &sol, out.create("metric.csv")?)?;
    serde_json::to_writer_pretty(out.create("solve_report.json")?, &sol.report)?;

    let r = &sol.report;
    let tol = problem.tol;
    out.check(Check::holds("solver converged", r.converged));
    out.check(Check::at_most("scalar residual", r.final_residual, tol));
    out.check(Check::at_most("full 7x7 residual", r.full_matrix_residual, 10.0 * tol));
    out.check(Check::at_most("dependent diagonal slots", r.dependent_slot_residual, 10.0 * tol));

    match problem.boundary {
        BoundaryMode::ConstantOracle => {
            let (u1, u3) = constant_oracle(&problem.b, &problem.dd, problem.phase).expect("validated");
            let dev = sol.metric.u1.iter().map(|v| (v - u1).abs()).chain(sol.metric.u3.iter().map(|v| (v - u3).abs())).fold(0.0, f64::max);
            out.check(Check::at_most("deviation from constant balance", dev, 1e-10));
            out.put("oracle", &(u1, u3))?;
        }
        BoundaryMode::Manufactured => {
            let e = manufactured_error(&sol.metric);
            out.note(format!("manufactured-solution error: {e:.3e} (second order in h)"));
            out.put("manufactured_error", &e)?;
        }
        BoundaryMode::Fuchsian => {
            let e = sol.metric.distance(&fuchsian_exact(problem));
            out.note(format!("distance to the hyperbolic disk metric: {e:.3e} (second order in h)"));
            out.put("fuchsian_error", &e)?;
        }
        BoundaryMode::Dirichlet { .. } => {}
    }
    out.put("solve", &sol.report)?;
    Ok(sol)
}

fn reconstruct_into(cfg: &RunConfig, problem: &SolverProblem, metric: &MetricGrid, out: &mut Outcome) -> Result<()> {
    let c = &cfg.file.checks;
    let q_tol = c.q_tol.unwrap_or(1e-5);
    let defect_tol = c.defect_tol.unwrap_or(1e-4);
    let t = Instant::now();
    let (conn, curve) = reconstruct(problem, metric).context("reconstructing the curve")?;
    let ch = curve_checks(problem, &conn, &curve, &cfg.check_options()).context("curve checks")?;
    export_curve(&curve, Some(&ch), out.create("curve.csv")?)?;
    out.note(format!("reconstruct: {} samples checked, {:.2} s", ch.samples, t.elapsed().as_secs_f64()));

    let (dq, dx) = structure_defects(&conn);
    out.check(Check::at_most("connection preserves q", dq, 1e-10));
    out.check(Check::at_most("connection derives x", dx, 1e-10));
    out.check(Check::at_most("q(f) + 1", curve.q_defect, q_tol));
    out.check(Check::at_most("imaginary residue", curve.imag_residue, q_tol));
    out.check(Check::new("tangent plane is positive", ch.min_tangent_positivity > 0.0, format!("{:.3e}", ch.min_tangent_positivity), "> 0"));
    out.check(Check::at_most("J-tangency defect", ch.tangency_defect, defect_tol));
    out.check(Check::at_most("mean curvature defect", ch.mean_curvature_defect, defect_tol));
    out.check(Check::at_most("conformality defect", ch.conformal_defect, defect_tol));
    out.check(Check::equals("II negative-definite failures", ch.ii_negdef_failures, 0));
    out.check(Check::at_most("II J-compatibility", ch.ii_j_defect, defect_tol));
    out.check(Check::at_most("III'' = -(i/2) X x nu", ch.iii_defect, defect_tol));
    out.check(Check::at_most("III(., II(., .)) symmetric", ch.iii_symmetry_defect, defect_tol));
    out.check(Check::at_most("S2 / II duality", ch.s2_duality_defect, defect_tol));
    out.check(Check::at_most("S3 / III duality", ch.s3_duality_defect, defect_tol));
    out.note(format!("plaquette defect {:.3e} (C = {:.3e}), path dependence {:.3e}", ch.plaquette_defect, ch.plaquette_constant, path_dependence(&conn)));
    if !ch.ii_degenerate.is_empty() {
        out.note(format!("II degenerates at {} sample(s): {:?}", ch.ii_degenerate.len(), ch.ii_degenerate));
    }
    if problem.b.is_zero() {
        out.check(Check::at_most("curve inside Im(H') slice", slice_defect(&curve), q_tol));
    }

    if c.geodesic.unwrap_or(true) {
        let geo = geodesic_h32_check(&curve, c.geodesic_rel_tol.unwrap_or(1e-7));
        let found = geo.positive_line.is_some();
        out.note(if found {
            format!("parallel positive line: found (null dimension {}, max pairing {:.3e})", geo.null_dimension, geo.max_pairing)
        } else {
            format!("parallel positive line: none (null dimension {})", geo.null_dimension)
        });
        if found {
            out.check(Check::at_most("curve orthogonal to parallel line", geo.max_pairing, defect_tol));
        }
        if let Some(expect) = c.expect_parallel_line {
            out.check(Check::equals("parallel positive line found", found, expect));
        }
        out.put("geodesic", &geo)?;
    }
    serde_json::to_writer_pretty(out.create("checks.json")?, &ch)?;
    out.put("curve_checks", &ch)?;
    Ok(())
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let problem = cfg.problem()?;
    let mut out = Outcome::new("solve", &cfg.out)?;
    out.put("problem_hash", &problem.hash())?;
    solve_into(&problem, &mut out)?;
    Ok(out)
}

fn header_hash(path: &Path) -> Result<Option<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().take_while(|l| l.starts_with('#')).find_map(|l| l.strip_prefix("# problem_hash=")).map(str::to_string))
}

pub fn reconstruct_cmd(cfg: &RunConfig, metric: Option<&Path>) -> Result<Outcome> {
    let problem = cfg.problem()?;
    let Some(path) = metric.or(cfg.file.reconstruct.metric.as_deref()) else { bail!("reconstruct: give --metric (or [reconstruct] metric)") };
    let hash = header_hash(path)?;
    if hash.as_deref() != Some(problem.hash().as_str()) {
        bail!(
            "{} was solved for problem {}, but the configuration describes problem {}",
            path.display(),
            hash.as_deref().unwrap_or("(none)"),
            problem.hash()
        );
    }
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (metric, converged) = import_metric(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    if metric.grid != problem.grid() {
        bail!("{}: grid does not match the configured problem", path.display());
    }
    let mut out = Outcome::new("reconstruct", &cfg.out)?;
    out.put("problem_hash", &problem.hash())?;
    out.check(Check::holds("input metric converged", converged));
    reconstruct_into(cfg, &problem, &metric, &mut out)?;
    Ok(out)
}

pub fn pipeline(cfg: &RunConfig) -> Result<Outcome> {
    let problem = cfg.problem()?;
    let mut out = Outcome::new("pipeline", &cfg.out)?;
    out.put("problem_hash", &problem.hash())?;
    let sol = solve_into(&problem, &mut out)?;
    if !sol.report.converged {
        out.note("solve did not converge; reconstruction skipped");
        return Ok(out);
    }
    reconstruct_into(cfg, &problem, &sol.metric, &mut out)?;
    Ok(out)
}
