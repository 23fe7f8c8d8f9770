use g2cyclic::octonion::{f_cross, fidx, FBasisVector};
use g2cyclic::solver::{newton_solve, BoundaryMode, Poly, SolverProblem};
use g2cyclic::stability::{classify, classify_by_enumeration, moduli_description, HiggsDatum};
use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn fterm(v: &FBasisVector) -> String {
    let terms: Vec<String> = (-3..=3)
        .filter(|&k| !v.0[fidx(k)].is_zero())
        .map(|k| format!("({}) f{k}", v.0[fidx(k)]))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// `f_a × f_b` as exact text, for `a, b` in -3..=3.
pub fn cross_text(a: i32, b: i32) -> Result<String, String> {
    if !(-3..=3).contains(&a) || !(-3..=3).contains(&b) {
        return Err("indices must lie in -3..=3".into());
    }
    Ok(fterm(&f_cross(a, b)))
}

/// Verdict, enumeration cross-check and moduli data as JSON.
pub fn stability_json(genus: i32, d: i32, beta: bool, delta: bool) -> Result<String, String> {
    let x = HiggsDatum::new(genus.into(), d.into(), beta, delta);
    let v = classify(&x).map_err(|e| e.to_string())?;
    let e = classify_by_enumeration(&x).map_err(|e| e.to_string())?;
    let m = moduli_description(genus.into(), d.into()).ok();
    Ok(json!({
        "verdict": v.verdict.to_string(),
        "enumeration": e.to_string(),
        "witness": v.witness.map(|w| format!("{} (degree {})", w.subbundle, w.degree)),
        "totally_geodesic": v.totally_geodesic,
        "dimension": m.as_ref().map(|m| m.total_dim),
        "components": m.as_ref().map(|m| m.components),
        "euler_class": m.as_ref().map(|m| m.euler_class),
    })
    .to_string())
}

/// Solves on the unit square centred at 0 with `b = b0 + b1 z`, `dd = d0`
/// and zero Dirichlet data. Returns JSON with the `u1`, `u3` grids row by row.
pub fn solve_json(n: usize, b0: f64, b1: f64, d0: f64) -> Result<String, String> {
    let problem = SolverProblem {
        nx: n,
        ny: n,
        b: Poly(vec![Complex64::new(b0, 0.0), Complex64::new(b1, 0.0)]),
        dd: Poly::constant(Complex64::new(d0, 0.0)),
        boundary: BoundaryMode::Dirichlet { u1: 0.0, u3: 0.0 },
        tol: 1e-9,
        ..SolverProblem::default()
    };
    let s = newton_solve(&problem).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "converged": s.report.converged,
        "iterations": s.report.iterations,
        "residual": s.report.final_residual,
        "full_matrix_residual": s.report.full_matrix_residual,
        "u1": s.metric.u1,
        "u3": s.metric.u3,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn cross(a: i32, b: i32) -> Result<String, JsError> {
    cross_text(a, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn stability(genus: i32, d: i32, beta: bool, delta: bool) -> Result<String, JsError> {
    stability_json(genus, d, beta, delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve(n: usize, b0: f64, b1: f64, d0: f64) -> Result<String, JsError> {
    solve_json(n, b0, b1, d0).map_err(|e| JsError::new(&e))
}
