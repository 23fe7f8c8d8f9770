//! Flat connection `D = ∇_h + Φ + Φ*` on a solved chart, its parallel
//! transport, the associated curve in the quadric `q = -1` of `Im(O')`, and
//! finite-difference checks of the curve's Frenet structure.
//!
//! Transport solves `dW = W A` from the grid centre with RK4 along the middle
//! row and then along each column. The curve is the image of `s_0`:
//! `w_a(z) = √H_a(z0) W_{a0}(z)` in the f-basis, mapped to real coordinates.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::octonion::{f_change, f_cross, f_gram, ImOctonion, Q_SIGNS};
use crate::solver::{
    adjoint, assemble_residual, constant_oracle, higgs_matrix, CMat7, Coefficients, Grid, MetricGrid, SolverError,
    SolverProblem,
};

pub type V7 = [f64; 7];

#[derive(Debug, Error)]
pub enum FrenetError {
    #[error("metric residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualAboveTolerance { residual: f64, tol: f64 },
    #[error("problem carries an injected source; its metric is not harmonic")]
    HasSource,
    #[error("grid too small for the finite-difference checks ({0} points per side)")]
    GridTooSmall(usize),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Connection matrices `A_x`, `A_y` in the holomorphic chart frame.
#[derive(Debug, Clone)]
pub struct FlatConnection {
    pub grid: Grid,
    pub ax: Vec<CMat7>,
    pub ay: Vec<CMat7>,
    /// Metric weights at the base point `z0` (the grid centre).
    pub base_weights: [f64; 7],
}

// Fourth-order first derivative of a scalar grid field, one-sided near the edges.
fn diff(g: &Grid, f: &[f64], i: usize, j: usize, along_x: bool) -> f64 {
    let (n, k, step, h) = if along_x { (g.nx, i, 1isize, g.hx()) } else { (g.ny, j, g.nx as isize, g.hy()) };
    let p = g.idx(i, j) as isize;
    let at = |o: isize| f[(p + o * step) as usize];
    let v = if k >= 2 && k + 2 < n {
        -at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)
    } else if k == 0 {
        -25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)
    } else if k == 1 {
        -3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3)
    } else if k == n - 2 {
        3.0 * at(1) + 10.0 * at(0) - 18.0 * at(-1) + 6.0 * at(-2) - at(-3)
    } else {
        25.0 * at(0) - 48.0 * at(-1) + 36.0 * at(-2) - 16.0 * at(-3) + 3.0 * at(-4)
    };
    v / (12.0 * h)
}

pub fn flat_connection(problem: &SolverProblem, metric: &MetricGrid) -> Result<FlatConnection, FrenetError> {
    problem.validate()?;
    if Coefficients::new(problem).has_source() {
        return Err(FrenetError::HasSource);
    }
    let rep = assemble_residual(problem, metric)?;
    if !(rep.scalar <= problem.tol) {
        return Err(FrenetError::ResidualAboveTolerance { residual: rep.scalar, tol: problem.tol });
    }
    Ok(connection_unchecked(problem, metric))
}

/// Assembles the connection without checking that the metric is harmonic.
pub fn connection_unchecked(problem: &SolverProblem, metric: &MetricGrid) -> FlatConnection {
    let g = metric.grid;
    let logs: Vec<Vec<f64>> = (0..7).map(|k| (0..g.len()).map(|p| metric.log_weights(p)[k]).collect()).collect();
    let mut ax = Vec::with_capacity(g.len());
    let mut ay = Vec::with_capacity(g.len());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.idx(i, j);
            let z = g.z(i, j);
            let phi = higgs_matrix(problem.phase, problem.b.eval(z), problem.dd.eval(z));
            let star = adjoint(&phi, &metric.weights(p));
            let mut az = phi;
            for k in 0..7 {
                let dx = diff(&g, &logs[k], i, j, true);
                let dy = diff(&g, &logs[k], i, j, false);
                az[(k, k)] += Complex64::new(0.5 * dx, -0.5 * dy);
            }
            let iu = Complex64::new(0.0, 1.0);
            ax.push(az + star);
            ay.push((az - star) * iu);
        }
    }
    let (i0, j0) = base_point(&g);
    FlatConnection { grid: g, ax, ay, base_weights: metric.weights(g.idx(i0, j0)) }
}

fn rk4(w: &CMat7, a0: &CMat7, am: &CMat7, a1: &CMat7, h: f64) -> CMat7 {
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5 * h, 0.0);
    let k1 = w * a0;
    let k2 = (w + k1 * half) * am;
    let k3 = (w + k2 * half) * am;
    let k4 = (w + k3 * hc) * a1;
    w + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0)
}

// Midpoint value between samples k and k+1 of a line of length n.
fn midpoint(get: impl Fn(usize) -> CMat7, k: usize, n: usize) -> CMat7 {
    let c = |x: f64| Complex64::new(x, 0.0);
    if k >= 1 && k + 2 < n {
        (get(k) * c(9.0) + get(k + 1) * c(9.0) - get(k - 1) - get(k + 2)) * c(1.0 / 16.0)
    } else if k == 0 {
        (get(0) * c(5.0) + get(1) * c(15.0) - get(2) * c(5.0) + get(3)) * c(1.0 / 16.0)
    } else {
        (get(k + 1) * c(5.0) + get(k) * c(15.0) - get(k - 1) * c(5.0) + get(k - 2)) * c(1.0 / 16.0)
    }
}

/// Grid index of the transport base point.
pub fn base_point(g: &Grid) -> (usize, usize) {
    (g.nx / 2, g.ny / 2)
}

// One RK4 step along x between columns i and i+1 of row j; `forward` goes i → i+1.
fn step_x(c: &FlatConnection, w: &CMat7, i: usize, j: usize, forward: bool) -> CMat7 {
    let g = &c.grid;
    let am = midpoint(|k| c.ax[g.idx(k, j)], i, g.nx);
    let (a0, a1) = (&c.ax[g.idx(i, j)], &c.ax[g.idx(i + 1, j)]);
    if forward {
        rk4(w, a0, &am, a1, g.hx())
    } else {
        rk4(w, a1, &am, a0, -g.hx())
    }
}

fn step_y(c: &FlatConnection, w: &CMat7, i: usize, j: usize, forward: bool) -> CMat7 {
    let g = &c.grid;
    let am = midpoint(|k| c.ay[g.idx(i, k)], j, g.ny);
    let (a0, a1) = (&c.ay[g.idx(i, j)], &c.ay[g.idx(i, j + 1)]);
    if forward {
        rk4(w, a0, &am, a1, g.hy())
    } else {
        rk4(w, a1, &am, a0, -g.hy())
    }
}

/// Transport matrices `W(z)` with `W(z0) = I`: along the middle row, then
/// outwards along each column.
pub fn transport(c: &FlatConnection) -> Vec<CMat7> {
    transport_ordered(c, true)
}

fn transport_ordered(c: &FlatConnection, rows_first: bool) -> Vec<CMat7> {
    let g = &c.grid;
    let (i0, j0) = base_point(g);
    let mut w = vec![CMat7::identity(); g.len()];
    let sx = |w: &mut Vec<CMat7>, j: usize| {
        for i in i0..g.nx - 1 {
            w[g.idx(i + 1, j)] = step_x(c, &w[g.idx(i, j)], i, j, true);
        }
        for i in (0..i0).rev() {
            w[g.idx(i, j)] = step_x(c, &w[g.idx(i + 1, j)], i, j, false);
        }
    };
    let sy = |w: &mut Vec<CMat7>, i: usize| {
        for j in j0..g.ny - 1 {
            w[g.idx(i, j + 1)] = step_y(c, &w[g.idx(i, j)], i, j, true);
        }
        for j in (0..j0).rev() {
            w[g.idx(i, j)] = step_y(c, &w[g.idx(i, j + 1)], i, j, false);
        }
    };
    if rows_first {
        sx(&mut w, j0);
        for i in 0..g.nx {
            sy(&mut w, i);
        }
    } else {
        sy(&mut w, i0);
        for j in 0..g.ny {
            sx(&mut w, j);
        }
    }
    w
}

/// Largest entry difference between row-first and column-first transport.
pub fn path_dependence(c: &FlatConnection) -> f64 {
    let a = transport_ordered(c, true);
    let b = transport_ordered(c, false);
    a.iter().zip(&b).map(|(x, y)| (x - y).iter().map(|v| v.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
}

fn fq_complex() -> &'static CMat7 {
    static Q: OnceLock<CMat7> = OnceLock::new();
    Q.get_or_init(|| {
        let m = f_gram().to_complex();
        CMat7::from_fn(|r, c| m[(r, c)])
    })
}

fn fcross_complex() -> &'static [[[Complex64; 7]; 7]; 7] {
    static X: OnceLock<[[[Complex64; 7]; 7]; 7]> = OnceLock::new();
    X.get_or_init(|| {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let v = f_cross(a as i32 - 3, b as i32 - 3);
                std::array::from_fn(|k| v.0[k].to_complex())
            })
        })
    })
}

fn fcross(u: &[Complex64; 7], v: &[Complex64; 7]) -> [Complex64; 7] {
    let t = fcross_complex();
    let mut out = [Complex64::new(0.0, 0.0); 7];
    for a in 0..7 {
        for b in 0..7 {
            let s = u[a] * v[b];
            if s.norm() != 0.0 {
                for k in 0..7 {
                    out[k] += s * t[a][b][k];
                }
            }
        }
    }
    out
}

/// Largest `|AᵀQ + QA|` and largest derivation defect
/// `|A(s×t) - As×t - s×At|` over the basis, across both directions and all
/// grid points. Both vanish for a connection preserving `q` and `×`.
pub fn structure_defects(c: &FlatConnection) -> (f64, f64) {
    let q = fq_complex();
    let (mut dq, mut dx): (f64, f64) = (0.0, 0.0);
    let e = |k: usize| -> [Complex64; 7] { std::array::from_fn(|r| Complex64::new(if r == k { 1.0 } else { 0.0 }, 0.0)) };
    let apply = |m: &CMat7, v: &[Complex64; 7]| -> [Complex64; 7] { std::array::from_fn(|r| (0..7).map(|k| m[(r, k)] * v[k]).sum()) };
    for m in c.ax.iter().chain(&c.ay) {
        let r = m.transpose() * q + q * m;
        dq = dq.max(r.iter().map(|v| v.norm()).fold(0.0, f64::max));
        for a in 0..7 {
            for b in a + 1..7 {
                let lhs = apply(m, &fcross(&e(a), &e(b)));
                let r1 = fcross(&apply(m, &e(a)), &e(b));
                let r2 = fcross(&e(a), &apply(m, &e(b)));
                for k in 0..7 {
                    dx = dx.max((lhs[k] - r1[k] - r2[k]).norm());
                }
            }
        }
    }
    (dq, dx)
}

/// Holonomy defect of every grid cell (row-major over the `(nx-1) × (ny-1)`
/// cells), each edge one RK4 step.
pub fn plaquette_field(c: &FlatConnection) -> Vec<f64> {
    let g = &c.grid;
    let id = CMat7::identity();
    let mut out = Vec::with_capacity((g.nx - 1) * (g.ny - 1));
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let a = step_x(c, &id, i, j, true) * step_y(c, &id, i + 1, j, true);
            let b = step_y(c, &id, i, j, true) * step_x(c, &id, i, j + 1, true);
            out.push((a - b).iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    out
}

pub fn plaquette_defect(c: &FlatConnection) -> f64 {
    plaquette_field(c).into_iter().fold(0.0, f64::max)
}

/// Worst cell defect over cells at least `edge_fraction` of the side away
/// from the boundary.
pub fn interior_plaquette_defect(c: &FlatConnection, edge_fraction: f64) -> f64 {
    let g = &c.grid;
    let field = plaquette_field(c);
    let (mx, my) = edge_margins(g, edge_fraction, 0);
    let mut worst: f64 = 0.0;
    for j in my..g.ny - 1 - my {
        for i in mx..g.nx - 1 - mx {
            worst = worst.max(field[j * (g.nx - 1) + i]);
        }
    }
    worst
}

fn edge_margins(g: &Grid, fraction: f64, min: usize) -> (usize, usize) {
    let m = |n: usize| min.max((fraction * (n - 1) as f64).ceil() as usize);
    (m(g.nx), m(g.ny))
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub grid: Grid,
    /// Real coordinates in the basis `j, δ, ε, ℓ, jℓ, δℓ, εℓ`.
    pub points: Vec<V7>,
    pub imag_residue: f64,
    /// `max |q(f) + 1|`.
    pub q_defect: f64,
}

fn f_complex() -> &'static [[Complex64; 7]; 7] {
    static F: OnceLock<[[Complex64; 7]; 7]> = OnceLock::new();
    F.get_or_init(|| {
        let m = f_change().to_complex();
        std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]))
    })
}

pub fn curve_from_transport(c: &FlatConnection, w: &[CMat7]) -> Curve {
    let f = f_complex();
    let mut points = Vec::with_capacity(w.len());
    let (mut im, mut qd): (f64, f64) = (0.0, 0.0);
    for wm in w {
        let coords: [Complex64; 7] = std::array::from_fn(|a| wm[(a, 3)] * c.base_weights[a].sqrt());
        let mut r = [0.0; 7];
        for (row, out) in f.iter().zip(r.iter_mut()) {
            let v: Complex64 = row.iter().zip(&coords).map(|(x, y)| x * y).sum();
            im = im.max(v.im.abs());
            *out = v.re;
        }
        qd = qd.max((qf(&r, &r) + 1.0).abs());
        points.push(r);
    }
    Curve { grid: c.grid, points, imag_residue: im, q_defect: qd }
}

/// Largest `|f|` component outside `span{j, δ, ε}`.
pub fn slice_defect(curve: &Curve) -> f64 {
    curve.points.iter().flat_map(|p| p[3..].iter()).fold(0.0, |m, x| m.max(x.abs()))
}

/// Connection, transport and curve in one call.
pub fn reconstruct(problem: &SolverProblem, metric: &MetricGrid) -> Result<(FlatConnection, Curve), FrenetError> {
    let conn = flat_connection(problem, metric)?;
    let w = transport(&conn);
    let curve = curve_from_transport(&conn, &w);
    Ok((conn, curve))
}

pub fn qf(a: &V7, b: &V7) -> f64 {
    (0..7).map(|k| Q_SIGNS[k] as f64 * a[k] * b[k]).sum()
}

fn cross_table() -> &'static [[V7; 7]; 7] {
    static T: OnceLock<[[V7; 7]; 7]> = OnceLock::new();
    T.get_or_init(|| {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let z = ImOctonion::basis(a).cross(&ImOctonion::basis(b));
                std::array::from_fn(|k| z.0[k].to_complex().re)
            })
        })
    })
}

/// Cross product `a × b` in real coordinates.
pub fn cross(a: &V7, b: &V7) -> V7 {
    let t = cross_table();
    let mut out = [0.0; 7];
    for (p, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (q, y) in b.iter().enumerate() {
            let s = x * y;
            if s != 0.0 {
                for k in 0..7 {
                    out[k] += s * t[p][q][k];
                }
            }
        }
    }
    out
}

fn norm(a: &V7) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &V7, b: &V7) -> V7 {
    std::array::from_fn(|k| a[k] - b[k])
}

fn add(a: &V7, b: &V7) -> V7 {
    std::array::from_fn(|k| a[k] + b[k])
}

fn scale(a: &V7, s: f64) -> V7 {
    a.map(|x| x * s)
}

/// q-orthogonal projection onto the span of `basis` (q nondegenerate on it).
fn project(basis: &[V7], v: &V7) -> V7 {
    let n = basis.len();
    let gm = DMatrix::from_fn(n, n, |a, b| qf(&basis[a], &basis[b]));
    let rhs = DMatrix::from_fn(n, 1, |a, _| qf(&basis[a], v));
    let Some(c) = gm.lu().solve(&rhs) else {
        return [f64::NAN; 7];
    };
    let mut out = [0.0; 7];
    for (a, b) in basis.iter().enumerate() {
        out = add(&out, &scale(b, c[a]));
    }
    out
}

fn off(basis: &[V7], v: &V7) -> V7 {
    sub(v, &project(basis, v))
}

// Fourth-order central differences of a vector field.
fn d1(g: &Grid, f: &[V7], i: usize, j: usize, along_x: bool) -> V7 {
    let (s, h) = if along_x { (1isize, g.hx()) } else { (g.nx as isize, g.hy()) };
    let p = g.idx(i, j) as isize;
    let at = |o: isize| &f[(p + o * s) as usize];
    std::array::from_fn(|k| (-at(2)[k] + 8.0 * at(1)[k] - 8.0 * at(-1)[k] + at(-2)[k]) / (12.0 * h))
}

fn d2(g: &Grid, f: &[V7], i: usize, j: usize, along_x: bool) -> V7 {
    let (s, h) = if along_x { (1isize, g.hx()) } else { (g.nx as isize, g.hy()) };
    let p = g.idx(i, j) as isize;
    let at = |o: isize| &f[(p + o * s) as usize];
    std::array::from_fn(|k| (-at(2)[k] + 16.0 * at(1)[k] - 30.0 * at(0)[k] + 16.0 * at(-1)[k] - at(-2)[k]) / (12.0 * h * h))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckOptions {
    /// II must be negative-definite of rank 2 where `|b| >` this fraction of `max |b|`.
    pub b_fraction: f64,
    /// Samples closer to the boundary than this fraction of the side (and
    /// never closer than six cells) are skipped.
    pub edge_fraction: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { b_fraction: 0.05, edge_fraction: 0.125 }
    }
}

/// Finite-difference checks of a reconstructed curve. Defects are relative
/// (dimensionless) and maximised over the sample points away from the
/// boundary, see [`CheckOptions::edge_fraction`].
#[derive(Debug, Clone, Serialize)]
pub struct CurveChecks {
    pub samples: usize,
    pub step: f64,
    pub q_defect: f64,
    pub imag_residue: f64,
    /// Worst cell holonomy defect over the checked region.
    pub plaquette_defect: f64,
    /// `plaquette_defect / h²`.
    pub plaquette_constant: f64,
    /// `q_defect / h²`.
    pub q_constant: f64,
    /// ε in `f_y = ε f × f_x`.
    pub tangency_sign: i8,
    pub tangency_defect: f64,
    pub mean_curvature_defect: f64,
    pub conformal_defect: f64,
    /// Smallest `q(f_x, f_x) / |f_x|²`; positive means a positive tangent plane.
    pub min_tangent_positivity: f64,
    pub ii_checked: usize,
    pub ii_negdef_failures: usize,
    /// Points where the normalised Gram matrix of II is not negative-definite.
    pub ii_degenerate: Vec<(f64, f64)>,
    pub ii_threshold: f64,
    /// Defect of `II(∂x, ∂y) = ε f × II(∂x, ∂x)`.
    pub ii_j_defect: f64,
    /// Defect of `III''(X, ν) = -(i/2) X × ν` on `ν ∈ N'`.
    pub iii_defect: f64,
    pub iii_symmetry_defect: f64,
    pub s2_duality_defect: f64,
    pub s3_duality_defect: f64,
    /// Per-sample tangency and mean-curvature defects (NaN where unchecked).
    #[serde(skip)]
    pub pointwise: Vec<(f64, f64)>,
}

fn sym2_eigs(a: f64, b: f64, c: f64) -> (f64, f64) {
    let m = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (m - r, m + r)
}

pub fn curve_checks(problem: &SolverProblem, conn: &FlatConnection, curve: &Curve, opts: &CheckOptions) -> Result<CurveChecks, FrenetError> {
    let g = curve.grid;
    let margin = 6;
    if g.nx < 2 * margin + 3 || g.ny < 2 * margin + 3 {
        return Err(FrenetError::GridTooSmall(g.nx.min(g.ny)));
    }
    let f = &curve.points;
    let zero = [0.0; 7];
    let mut fx = vec![zero; g.len()];
    let mut fy = vec![zero; g.len()];
    let mut n1 = vec![zero; g.len()];
    let mut n2 = vec![zero; g.len()];
    let mut m1 = vec![zero; g.len()];
    let mut lap = vec![zero; g.len()];
    for j in 2..g.ny - 2 {
        for i in 2..g.nx - 2 {
            let p = g.idx(i, j);
            fx[p] = d1(&g, f, i, j, true);
            fy[p] = d1(&g, f, i, j, false);
            lap[p] = add(&d2(&g, f, i, j, true), &d2(&g, f, i, j, false));
        }
    }
    for j in 2..g.ny - 2 {
        for i in 2..g.nx - 2 {
            let p = g.idx(i, j);
            let fxx = d2(&g, f, i, j, true);
            let fxy = if (4..g.nx - 4).contains(&i) { d1(&g, &fy, i, j, true) } else { zero };
            let frame = [f[p], fx[p], fy[p]];
            n1[p] = off(&frame, &fxx);
            n2[p] = off(&frame, &fxy);
            m1[p] = cross(&f[p], &n1[p]);
        }
    }
    let mut b1 = vec![zero; g.len()];
    for j in 4..g.ny - 4 {
        for i in 4..g.nx - 4 {
            let p = g.idx(i, j);
            let span = [f[p], fx[p], fy[p], n1[p], n2[p]];
            b1[p] = off(&span, &d1(&g, &n1, i, j, true));
        }
    }

    let bmax = (0..g.len()).map(|p| problem.b.eval(g.z(p % g.nx, p / g.nx)).norm()).fold(0.0, f64::max);
    let h = g.hx().max(g.hy());
    let plaq = interior_plaquette_defect(conn, opts.edge_fraction);
    let ii_threshold = (10.0 * plaq).max(1e-12);
    let p0 = g.idx(g.nx / 2, g.ny / 2);
    let eps = if qf(&fy[p0], &cross(&f[p0], &fx[p0])) >= 0.0 { 1.0 } else { -1.0 };
    let mut c = CurveChecks {
        samples: 0,
        step: h,
        q_defect: curve.q_defect,
        imag_residue: curve.imag_residue,
        plaquette_defect: plaq,
        plaquette_constant: plaq / (h * h),
        q_constant: curve.q_defect / (h * h),
        tangency_sign: eps as i8,
        tangency_defect: 0.0,
        mean_curvature_defect: 0.0,
        conformal_defect: 0.0,
        min_tangent_positivity: f64::INFINITY,
        ii_checked: 0,
        ii_negdef_failures: 0,
        ii_degenerate: Vec::new(),
        ii_threshold,
        ii_j_defect: 0.0,
        iii_defect: 0.0,
        iii_symmetry_defect: 0.0,
        s2_duality_defect: 0.0,
        s3_duality_defect: 0.0,
        pointwise: vec![(f64::NAN, f64::NAN); g.len()],
    };
    let (mx, my) = edge_margins(&g, opts.edge_fraction, margin);
    for j in my..g.ny - my {
        for i in mx..g.nx - mx {
            let p = g.idx(i, j);
            let (fp, x, y) = (&f[p], &fx[p], &fy[p]);
            let nx2 = qf(x, x);
            let ex = norm(x);
            c.samples += 1;
            let td = norm(&sub(y, &scale(&cross(fp, x), eps))) / ex;
            let along = scale(fp, qf(&lap[p], fp) / qf(fp, fp));
            let md = norm(&sub(&lap[p], &along)) / (ex * ex);
            c.tangency_defect = c.tangency_defect.max(td);
            c.mean_curvature_defect = c.mean_curvature_defect.max(md);
            c.pointwise[p] = (td, md);
            let conf = ((nx2 - qf(y, y)).abs() + 2.0 * qf(x, y).abs()) / nx2.abs();
            c.conformal_defect = c.conformal_defect.max(conf);
            c.min_tangent_positivity = c.min_tangent_positivity.min(nx2 / (ex * ex));

            let (a, bb, cc) = (qf(&n1[p], &n1[p]), qf(&n1[p], &n2[p]), qf(&n2[p], &n2[p]));
            let (_, lmax) = sym2_eigs(a / (nx2 * nx2), bb / (nx2 * nx2), cc / (nx2 * nx2));
            let bz = problem.b.eval(g.z(i, j)).norm();
            let negdef = lmax < -ii_threshold;
            if !negdef {
                c.ii_degenerate.push((g.x(i), g.y(j)));
            }
            if bz > opts.b_fraction * bmax {
                c.ii_checked += 1;
                if !negdef {
                    c.ii_negdef_failures += 1;
                }
                let n1n = norm(&n1[p]);
                c.ii_j_defect = c.ii_j_defect.max(norm(&sub(&n2[p], &scale(&m1[p], eps))) / n1n);

                // III'' on ν = n1 - i f×n1.
                let span = [*fp, *x, *y, n1[p], n2[p]];
                let pp = b1[p];
                let qq = off(&span, &d1(&g, &m1, i, j, true));
                let lhs_re = scale(&add(&pp, &cross(fp, &qq)), 0.5);
                let lhs_im = scale(&sub(&cross(fp, &pp), &qq), 0.5);
                let rhs_re = scale(&cross(x, &m1[p]), -0.5);
                let rhs_im = scale(&cross(x, &n1[p]), -0.5);
                let d = norm(&sub(&lhs_re, &rhs_re)) + norm(&sub(&lhs_im, &rhs_im));
                c.iii_defect = c.iii_defect.max(d / (ex * n1n));

                let sy = off(&span, &d1(&g, &n1, i, j, false));
                let sx = off(&span, &d1(&g, &n2, i, j, true));
                c.iii_symmetry_defect = c.iii_symmetry_defect.max(norm(&sub(&sy, &sx)) / (ex * n1n));

                let dn = d1(&g, &n1, i, j, true);
                let s2 = (qf(&n1[p], &n1[p]) + qf(x, &dn)).abs() / (n1n * n1n);
                c.s2_duality_defect = c.s2_duality_defect.max(s2);
                let db = d1(&g, &b1, i, j, true);
                let bn = norm(&pp).max(1e-300);
                let s3 = (qf(&pp, &pp) + qf(&n1[p], &db)).abs() / (bn * bn + n1n * norm(&db)).max(1e-300);
                c.s3_duality_defect = c.s3_duality_defect.max(s3);
            }
        }
    }
    Ok(c)
}

/// Writes `x,y,f1..f7,qf,tangency,mean_curvature`.
pub fn export_curve<W: std::io::Write>(curve: &Curve, checks: Option<&CurveChecks>, mut out: W) -> std::io::Result<()> {
    let g = curve.grid;
    let mut s = String::from("x,y,f1,f2,f3,f4,f5,f6,f7,qf,tangency,mean_curvature\n");
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.idx(i, j);
            let f = &curve.points[p];
            let (t, m) = checks.map(|c| c.pointwise[p]).unwrap_or((f64::NAN, f64::NAN));
            let cells: Vec<String> = f.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("{},{},{},{},{},{}\n", g.x(i), g.y(j), cells.join(","), qf(f, f), t, m));
        }
    }
    out.write_all(s.as_bytes())
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicReport {
    /// Dimension of the q-orthogonal complement of the curve's linear span.
    pub null_dimension: usize,
    pub singular_values: Vec<f64>,
    /// A positive vector orthogonal to the whole curve, if one exists.
    pub positive_line: Option<V7>,
    /// `max |q(f, v)|` over samples, for the unit line found.
    pub max_pairing: f64,
}

/// Searches for a constant (hence parallel) positive vector orthogonal to
/// every point of the curve. Its existence means the curve lies in a copy of
/// the totally geodesic `H^{3,2}`.
pub fn geodesic_h32_check(curve: &Curve, rel_tol: f64) -> GeodesicReport {
    let stride = (curve.points.len() / 4096).max(1);
    let rows: Vec<&V7> = curve.points.iter().step_by(stride).collect();
    let m = DMatrix::from_fn(rows.len(), 7, |r, k| Q_SIGNS[k] as f64 * rows[r][k]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let null: Vec<V7> = (0..sv.len())
        .filter(|&k| sv[k] <= rel_tol * smax)
        .map(|k| std::array::from_fn(|c| vt[(k, c)]))
        .collect();
    let mut positive_line = None;
    if !null.is_empty() {
        let n = null.len();
        let gm = DMatrix::from_fn(n, n, |a, b| qf(&null[a], &null[b]));
        let eig = SymmetricEigen::new(gm);
        let (kbest, lbest) = eig.eigenvalues.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (k, &l)| if l > acc.1 { (k, l) } else { acc });
        if lbest > 0.0 {
            let mut v = [0.0; 7];
            for (a, b) in null.iter().enumerate() {
                v = add(&v, &scale(b, eig.eigenvectors[(a, kbest)]));
            }
            let s = norm(&v);
            positive_line = Some(scale(&v, 1.0 / s));
        }
    }
    let max_pairing = positive_line
        .map(|v| curve.points.iter().map(|p| qf(p, &v).abs()).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let mut sorted = sv.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    GeodesicReport { null_dimension: null.len(), singular_values: sorted, positive_line, max_pairing }
}

/// For constant `b`, `dd` with constant-oracle metric: the parallel line
/// `dd e^{-u3} ŝ_{-3} - c ŝ_3` (`c = -i/√2`) in real coordinates, rescaled to be real.
pub fn predicted_parallel_line(problem: &SolverProblem) -> Option<V7> {
    let (_, u3) = constant_oracle(&problem.b, &problem.dd, problem.phase)?;
    let dd = problem.phase * problem.dd.as_constant()?;
    let cc = problem.phase * crate::solver::SLOT_CONSTANT;
    let mut w = [Complex64::new(0.0, 0.0); 7];
    w[0] = dd * (-u3).exp();
    w[6] = -cc;
    let f = f_complex();
    let r: [Complex64; 7] = std::array::from_fn(|k| f[k].iter().zip(&w).map(|(a, b)| a * b).sum());
    let pivot = r.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    let phase = pivot.conj() / pivot.norm();
    let v: V7 = std::array::from_fn(|k| (r[k] * phase).re);
    let s = norm(&v);
    Some(scale(&v, 1.0 / s))
}

/// `|cos|` of the Euclidean angle between two lines.
pub fn line_alignment(a: &V7, b: &V7) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    d.abs() / (norm(a) * norm(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{newton_solve, BoundaryMode, Poly};

    #[test]
    fn cross_is_antisymmetric_and_j_squares_to_minus_one() {
        let f: V7 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!((qf(&f, &f) + 1.0).abs() < 1e-15);
        for k in 1..7 {
            let mut v = [0.0; 7];
            v[k] = 1.0;
            let jj = cross(&f, &cross(&f, &v));
            assert!(norm(&add(&jj, &v)) < 1e-14);
            assert!(norm(&add(&cross(&f, &v), &cross(&v, &f))) < 1e-14);
        }
    }

    #[test]
    fn source_problems_are_refused() {
        let p = SolverProblem {
            nx: 16,
            ny: 16,
            b: Poly(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]),
            boundary: BoundaryMode::Manufactured,
            ..SolverProblem::default()
        };
        let sol = newton_solve(&p).unwrap();
        assert!(matches!(flat_connection(&p, &sol.metric), Err(FrenetError::HasSource)));
    }

    #[test]
    fn constant_curve_is_real_and_on_quadric() {
        let p = SolverProblem { nx: 24, ny: 24, ..SolverProblem::default() };
        let sol = newton_solve(&p).unwrap();
        let (conn, curve) = reconstruct(&p, &sol.metric).unwrap();
        assert!(curve.imag_residue < 1e-10, "{}", curve.imag_residue);
        assert!(curve.q_defect < 1e-6, "{}", curve.q_defect);
        assert!(plaquette_defect(&conn) < 1e-8);
    }
}
