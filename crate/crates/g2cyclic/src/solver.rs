//! Chart-level solver for the Hitchin equation of the cyclic Higgs bundle.
//!
//! In the holomorphic chart frame `s_{-3}, …, s_3` the harmonic metric is
//! diagonal with weights
//! `H = (e^{-u3}, e^{u1-u3}, e^{-u1}, 1, e^{u1}, e^{u3-u1}, e^{u3})`, and the
//! Higgs field is `ζ · g1(1, b(z), dd(z))`. The matrix equation
//! `-(1/4) Δ log H + [Φ, Φ*] = 0`, with `Φ* = H⁻¹ Φ† H`, reduces to
//!
//! ```text
//! Δu1 = 4 (w1 e^{u1} - wb e^{u3 - 2u1})
//! Δu3 = 4 (wc e^{u1} - wd e^{u1 - 2u3})
//! ```
//!
//! with `w1 = |ζ|²`, `wc = |ζ c|² = w1/2`, `wb = |ζ b|²`, `wd = |ζ dd|²`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::g1_realize_complex;

pub type CMat7 = SMatrix<Complex64, 7, 7>;

/// `-i/√2`, the constant in the `f_{-3} → f_{-2}` and `f_2 → f_3` slots.
pub const SLOT_CONSTANT: Complex64 = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);

/// `log H_k = U1[k] u1 + U3[k] u3` for `k = -3..3`.
pub const U1_COEF: [f64; 7] = [0.0, 1.0, -1.0, 0.0, 1.0, -1.0, 0.0];
pub const U3_COEF: [f64; 7] = [-1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0];

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("non-finite metric weight at grid point ({i}, {j}): u1 = {u1}, u3 = {u3}")]
    NonPositiveWeight { i: usize, j: usize, u1: f64, u3: f64 },
    #[error("Newton Jacobian is singular (pivot {pivot:e} at row {row})")]
    SingularJacobian { row: usize, pivot: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("malformed metric file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Polynomial `c0 + c1 z + c2 z² + …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Self(vec![c])
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.norm() == 0.0)
    }

    /// Constant value if all higher coefficients vanish.
    pub fn as_constant(&self) -> Option<Complex64> {
        if self.0.iter().skip(1).all(|c| c.norm() == 0.0) {
            Some(self.0.first().copied().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// Constant Dirichlet data.
    Dirichlet { u1: f64, u3: f64 },
    /// Dirichlet data equal to the algebraic constant solution (b, dd constant).
    ConstantOracle,
    /// Built-in manufactured fields with an injected source.
    Manufactured,
    /// Hyperbolic disk chart with b = dd = 0: `u1 = log(2/w1) - 2 log(1-|z|²)`, `u3 = u1/2`.
    Fuchsian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    /// u1 from the scalar equation `Δu1 = 4 w1 e^{u1}`, u3 by boundary interpolation.
    Fuchsian,
    /// Both fields by transfinite interpolation of the boundary data.
    Interpolate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverProblem {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub b: Poly,
    pub dd: Poly,
    /// Global phase ζ multiplying the Higgs field.
    pub phase: Complex64,
    pub boundary: BoundaryMode,
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest line-search step before giving up on descent.
    pub min_step: f64,
    pub init: InitMode,
    /// b ≡ 0 is allowed only when this is set.
    pub totally_geodesic: bool,
    pub parallel: bool,
}

impl Default for SolverProblem {
    fn default() -> Self {
        Self {
            x_range: (-0.5, 0.5),
            y_range: (-0.5, 0.5),
            nx: 32,
            ny: 32,
            b: Poly::constant(Complex64::new(1.0, 0.0)),
            dd: Poly::constant(Complex64::new(0.5, 0.0)),
            phase: Complex64::new(1.0, 0.0),
            boundary: BoundaryMode::ConstantOracle,
            tol: 1e-10,
            max_iter: 50,
            min_step: 1.0 / 1024.0,
            init: InitMode::Fuchsian,
            totally_geodesic: false,
            parallel: false,
        }
    }
}

impl SolverProblem {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |s: &str| Err(SolverError::InvalidProblem(s.to_string()));
        if self.nx < 8 || self.ny < 8 {
            return bad("grid sizes must be at least 8");
        }
        if !(self.tol > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.x_range.0 < self.x_range.1 && self.y_range.0 < self.y_range.1) {
            return bad("empty domain");
        }
        if self.phase.norm() == 0.0 {
            return bad("phase must be nonzero");
        }
        if self.b.is_zero() && !self.totally_geodesic && self.boundary != BoundaryMode::Fuchsian {
            return bad("b vanishes identically; declare totally_geodesic mode");
        }
        match self.boundary {
            BoundaryMode::ConstantOracle => {
                if constant_oracle(&self.b, &self.dd, self.phase).is_none() {
                    return bad("constant oracle needs constant nonzero b and dd");
                }
            }
            BoundaryMode::Fuchsian => {
                if !self.b.is_zero() || !self.dd.is_zero() {
                    return bad("Fuchsian chart needs b = dd = 0");
                }
                let corners = [
                    (self.x_range.0, self.y_range.0),
                    (self.x_range.0, self.y_range.1),
                    (self.x_range.1, self.y_range.0),
                    (self.x_range.1, self.y_range.1),
                ];
                if corners.iter().any(|(x, y)| x * x + y * y >= 1.0) {
                    return bad("Fuchsian chart must lie inside the unit disk");
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.x_range, self.y_range, self.nx, self.ny)
    }

    /// Stable 64-bit FNV-1a digest of the problem description. The
    /// execution mode is not part of the problem.
    pub fn hash(&self) -> String {
        let canonical = Self { parallel: false, ..self.clone() };
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in format!("{canonical:?}").bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Grid {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Self {
        Self { nx, ny, x0: x.0, x1: x.1, y0: y.0, y1: y.1 }
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx - 1 {
            self.x1
        } else {
            self.x0 + i as f64 * self.hx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny - 1 {
            self.y1
        } else {
            self.y0 + j as f64 * self.hy()
        }
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }
}

/// Logarithms of the two independent metric weights on a grid. The other
/// five weights are derived, so the pairing `h_{-a} = h_a⁻¹`, `h_0 = 1` and
/// `h_2 = h_3 h_1⁻¹` hold by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricGrid {
    pub grid: Grid,
    pub u1: Vec<f64>,
    pub u3: Vec<f64>,
}

impl MetricGrid {
    pub fn log_weights(&self, p: usize) -> [f64; 7] {
        let (a, c) = (self.u1[p], self.u3[p]);
        std::array::from_fn(|k| U1_COEF[k] * a + U3_COEF[k] * c)
    }

    pub fn weights(&self, p: usize) -> [f64; 7] {
        self.log_weights(p).map(f64::exp)
    }

    /// Sup-norm distance between two metrics on the same grid.
    pub fn distance(&self, o: &MetricGrid) -> f64 {
        self.u1
            .iter()
            .zip(&o.u1)
            .chain(self.u3.iter().zip(&o.u3))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Constant solution `(u1, u3)` for constant nonzero b and dd.
pub fn constant_oracle(b: &Poly, dd: &Poly, phase: Complex64) -> Option<(f64, f64)> {
    let (b, d) = (b.as_constant()?, dd.as_constant()?);
    if b.norm() == 0.0 || d.norm() == 0.0 {
        return None;
    }
    let w1 = phase.norm_sqr();
    let wc = (phase * SLOT_CONSTANT).norm_sqr();
    let wb = (phase * b).norm_sqr();
    let wd = (phase * d).norm_sqr();
    let u3 = 0.5 * (wd / wc).ln();
    let u1 = ((wb / w1).ln() + u3) / 3.0;
    Some((u1, u3))
}

/// `u1` of the hyperbolic disk metric for the given `w1 = |ζ|²`.
pub fn fuchsian_u1(z: Complex64, w1: f64) -> f64 {
    (2.0 / w1).ln() - 2.0 * (1.0 - z.norm_sqr()).ln()
}

/// Built-in manufactured fields and their Laplacians.
pub mod manufactured {
    use std::f64::consts::PI;

    pub fn u1(x: f64, y: f64) -> f64 {
        0.3 * (PI * x).sin() * (0.5 * PI * y).cos() + 0.2 * x * y + 0.1
    }

    pub fn u3(x: f64, y: f64) -> f64 {
        0.25 * (0.5 * PI * x).cos() * (PI * y).sin() + 0.1 * (x * x - y * y) - 0.2
    }

    pub fn lap_u1(x: f64, y: f64) -> f64 {
        -0.3 * 1.25 * PI * PI * (PI * x).sin() * (0.5 * PI * y).cos()
    }

    pub fn lap_u3(x: f64, y: f64) -> f64 {
        -0.25 * 1.25 * PI * PI * (0.5 * PI * x).cos() * (PI * y).sin()
    }
}

/// Pointwise coefficients of the reduced system.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub w1: f64,
    pub wc: f64,
    pub wb: Vec<f64>,
    pub wd: Vec<f64>,
    pub s1: Vec<f64>,
    pub s3: Vec<f64>,
}

fn nonlinearity(c: &Coefficients, p: usize, u1: f64, u3: f64) -> (f64, f64) {
    let e1 = u1.exp();
    let n1 = 4.0 * (c.w1 * e1 - c.wb[p] * (u3 - 2.0 * u1).exp());
    let n3 = 4.0 * (c.wc * e1 - c.wd[p] * (u1 - 2.0 * u3).exp());
    (n1, n3)
}

// d(n1, n3)/d(u1, u3)
fn nonlinearity_jac(c: &Coefficients, p: usize, u1: f64, u3: f64) -> [[f64; 2]; 2] {
    let e1 = u1.exp();
    let eb = c.wb[p] * (u3 - 2.0 * u1).exp();
    let ed = c.wd[p] * (u1 - 2.0 * u3).exp();
    [[4.0 * (c.w1 * e1 + 2.0 * eb), -4.0 * eb], [4.0 * (c.wc * e1 - ed), 8.0 * ed]]
}

impl Coefficients {
    pub fn new(problem: &SolverProblem) -> Self {
        let g = problem.grid();
        let zeta = problem.phase;
        let mut wb = Vec::with_capacity(g.len());
        let mut wd = Vec::with_capacity(g.len());
        for j in 0..g.ny {
            for i in 0..g.nx {
                let z = g.z(i, j);
                wb.push((zeta * problem.b.eval(z)).norm_sqr());
                wd.push((zeta * problem.dd.eval(z)).norm_sqr());
            }
        }
        let mut c = Self {
            w1: zeta.norm_sqr(),
            wc: (zeta * SLOT_CONSTANT).norm_sqr(),
            wb,
            wd,
            s1: vec![0.0; g.len()],
            s3: vec![0.0; g.len()],
        };
        if problem.boundary == BoundaryMode::Manufactured {
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let (x, y) = (g.x(i), g.y(j));
                    let p = g.idx(i, j);
                    let (n1, n3) = nonlinearity(&c, p, manufactured::u1(x, y), manufactured::u3(x, y));
                    c.s1[p] = manufactured::lap_u1(x, y) - n1;
                    c.s3[p] = manufactured::lap_u3(x, y) - n3;
                }
            }
        }
        c
    }

    pub fn has_source(&self) -> bool {
        self.s1.iter().chain(&self.s3).any(|s| *s != 0.0)
    }
}

fn laplacian(g: &Grid, u: &[f64], i: usize, j: usize) -> f64 {
    let (hx2, hy2) = (g.hx() * g.hx(), g.hy() * g.hy());
    let p = g.idx(i, j);
    (u[p - 1] - 2.0 * u[p] + u[p + 1]) / hx2 + (u[p - g.nx] - 2.0 * u[p] + u[p + g.nx]) / hy2
}

/// Scalar residual fields `F = Δ_h u - N(u) - S` (zero on the boundary).
#[derive(Debug, Clone)]
pub struct ScalarResidual {
    pub r1: Vec<f64>,
    pub r3: Vec<f64>,
}

impl ScalarResidual {
    pub fn sup(&self) -> f64 {
        let mut m: f64 = 0.0;
        for v in self.r1.iter().chain(&self.r3) {
            if !v.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(v.abs());
        }
        m
    }

    pub fn pointwise(&self, p: usize) -> f64 {
        self.r1[p].abs().max(self.r3[p].abs())
    }
}

fn residual_row(g: &Grid, c: &Coefficients, m: &MetricGrid, j: usize, r1: &mut [f64], r3: &mut [f64]) {
    if j == 0 || j == g.ny - 1 {
        return;
    }
    for i in 1..g.nx - 1 {
        let p = g.idx(i, j);
        let (n1, n3) = nonlinearity(c, p, m.u1[p], m.u3[p]);
        r1[i] = laplacian(g, &m.u1, i, j) - n1 - c.s1[p];
        r3[i] = laplacian(g, &m.u3, i, j) - n3 - c.s3[p];
    }
}

pub fn scalar_residual(c: &Coefficients, m: &MetricGrid, parallel: bool) -> ScalarResidual {
    let g = &m.grid;
    let mut r1 = vec![0.0; g.len()];
    let mut r3 = vec![0.0; g.len()];
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        r1.par_chunks_mut(g.nx)
            .zip(r3.par_chunks_mut(g.nx))
            .enumerate()
            .for_each(|(j, (a, b))| residual_row(g, c, m, j, a, b));
        return ScalarResidual { r1, r3 };
    }
    let _ = parallel;
    for (j, (a, b)) in r1.chunks_mut(g.nx).zip(r3.chunks_mut(g.nx)).enumerate() {
        residual_row(g, c, m, j, a, b);
    }
    ScalarResidual { r1, r3 }
}

/// Higgs field matrix `ζ g1(1, b, dd)` in the chart frame.
pub fn higgs_matrix(phase: Complex64, b: Complex64, dd: Complex64) -> CMat7 {
    let m = g1_realize_complex(phase, phase * b, phase * dd);
    CMat7::from_fn(|i, j| m[i][j])
}

/// `Φ* = H⁻¹ Φ† H` for diagonal `H`.
pub fn adjoint(phi: &CMat7, h: &[f64; 7]) -> CMat7 {
    CMat7::from_fn(|i, j| phi[(j, i)].conj() * h[j] / h[i])
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// Sup-norm of the scalar residuals on interior points.
    pub scalar: f64,
    /// Sup-norm of the full 7×7 residual `-(1/4)Δ log H + [Φ,Φ*]` (source removed).
    pub full_matrix: f64,
    /// Largest entry of the full residual outside the `L_1`, `L_3` diagonal slots.
    pub dependent_slots: f64,
}

/// Residuals of a metric: the scalar reduction and, assembled independently
/// from the seven weights and the Higgs matrix, the full matrix equation.
pub fn assemble_residual(problem: &SolverProblem, metric: &MetricGrid) -> Result<ResidualReport, SolverError> {
    let g = problem.grid();
    if g != metric.grid || metric.u1.len() != g.len() || metric.u3.len() != g.len() {
        return Err(SolverError::GridMismatch(format!("problem grid {}x{}, metric grid {}x{}", g.nx, g.ny, metric.grid.nx, metric.grid.ny)));
    }
    check_finite(metric)?;
    let c = Coefficients::new(problem);
    let scalar = scalar_residual(&c, metric, problem.parallel).sup();
    let logs: Vec<[f64; 7]> = (0..g.len()).map(|p| metric.log_weights(p)).collect();
    let (mut full, mut dep): (f64, f64) = (0.0, 0.0);
    let (hx2, hy2) = (g.hx() * g.hx(), g.hy() * g.hy());
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let p = g.idx(i, j);
            let z = g.z(i, j);
            let h = metric.weights(p);
            let phi = higgs_matrix(problem.phase, problem.b.eval(z), problem.dd.eval(z));
            let star = adjoint(&phi, &h);
            let mut r = phi * star - star * phi;
            for k in 0..7 {
                let lap = (logs[p - 1][k] - 2.0 * logs[p][k] + logs[p + 1][k]) / hx2
                    + (logs[p - g.nx][k] - 2.0 * logs[p][k] + logs[p + g.nx][k]) / hy2;
                let src = U1_COEF[k] * c.s1[p] + U3_COEF[k] * c.s3[p];
                r[(k, k)] += Complex64::new(-0.25 * lap + 0.25 * src, 0.0);
            }
            for a in 0..7 {
                for b in 0..7 {
                    let v = r[(a, b)].norm();
                    full = full.max(v);
                    if !(a == b && (a == 4 || a == 6)) {
                        dep = dep.max(v);
                    }
                }
            }
        }
    }
    Ok(ResidualReport { scalar, full_matrix: full, dependent_slots: dep })
}

fn check_finite(m: &MetricGrid) -> Result<(), SolverError> {
    for j in 0..m.grid.ny {
        for i in 0..m.grid.nx {
            let p = m.grid.idx(i, j);
            if m.log_weights(p).iter().any(|l| !l.exp().is_finite() || l.exp() <= 0.0) {
                return Err(SolverError::NonPositiveWeight { i, j, u1: m.u1[p], u3: m.u3[p] });
            }
        }
    }
    Ok(())
}

/// Banded matrix with row-major band storage.
struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    fn w(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(j + self.kl >= i && j <= i + self.ku);
        let w = self.w();
        &mut self.data[i * w + j + self.kl - i]
    }

    /// In-place LU without pivoting.
    fn factor(&mut self) -> Result<(), SolverError> {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.w());
        let mut scale: f64 = 0.0;
        for v in &self.data {
            scale = scale.max(v.abs());
        }
        for k in 0..n {
            let piv = self.data[k * w + kl];
            if !piv.is_finite() || piv.abs() <= 1e-14 * scale {
                return Err(SolverError::SingularJacobian { row: k, pivot: piv });
            }
            let jmax = (k + ku).min(n - 1);
            let (head, tail) = self.data.split_at_mut((k + 1) * w);
            let krow = &head[k * w..];
            for i in k + 1..=(k + kl).min(n - 1) {
                let row = &mut tail[(i - k - 1) * w..(i - k) * w];
                let lik = row[k + kl - i] / piv;
                row[k + kl - i] = lik;
                if lik == 0.0 {
                    continue;
                }
                let dst = &mut row[k + 1 + kl - i..=jmax + kl - i];
                let src = &krow[kl + 1..=jmax + kl - k];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= lik * s;
                }
            }
        }
        Ok(())
    }

    fn solve(&self, rhs: &mut [f64]) {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.w());
        for i in 0..n {
            let mut s = rhs[i];
            for j in i.saturating_sub(kl)..i {
                s -= self.data[i * w + j + kl - i] * rhs[j];
            }
            rhs[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in i + 1..=(i + ku).min(n - 1) {
                s -= self.data[i * w + j + kl - i] * rhs[j];
            }
            rhs[i] = s / self.data[i * w + kl];
        }
    }
}

/// Convergence record of a Newton solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub step_history: Vec<f64>,
    pub final_residual: f64,
    pub full_matrix_residual: f64,
    pub dependent_slot_residual: f64,
    pub tolerance: f64,
    pub grid: (usize, usize),
    pub slot_constant: String,
    pub problem_hash: String,
}

pub struct Solution {
    pub metric: MetricGrid,
    pub report: SolveReport,
}

fn boundary_values(problem: &SolverProblem, g: &Grid, i: usize, j: usize) -> (f64, f64) {
    match problem.boundary {
        BoundaryMode::Dirichlet { u1, u3 } => (u1, u3),
        BoundaryMode::ConstantOracle => constant_oracle(&problem.b, &problem.dd, problem.phase).expect("validated"),
        BoundaryMode::Manufactured => (manufactured::u1(g.x(i), g.y(j)), manufactured::u3(g.x(i), g.y(j))),
        BoundaryMode::Fuchsian => {
            let u1 = fuchsian_u1(g.z(i, j), problem.phase.norm_sqr());
            (u1, 0.5 * u1)
        }
    }
}

fn coons(g: &Grid, u: &mut [f64]) {
    let (nx, ny) = (g.nx, g.ny);
    let at = |u: &[f64], i: usize, j: usize| u[j * nx + i];
    let (c00, c10, c01, c11) = (at(u, 0, 0), at(u, nx - 1, 0), at(u, 0, ny - 1), at(u, nx - 1, ny - 1));
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let s = i as f64 / (nx - 1) as f64;
            let t = j as f64 / (ny - 1) as f64;
            let v = (1.0 - s) * at(u, 0, j) + s * at(u, nx - 1, j) + (1.0 - t) * at(u, i, 0) + t * at(u, i, ny - 1)
                - ((1.0 - s) * (1.0 - t) * c00 + s * (1.0 - t) * c10 + (1.0 - s) * t * c01 + s * t * c11);
            u[j * nx + i] = v;
        }
    }
}

fn interior_index(g: &Grid, i: usize, j: usize) -> usize {
    (j - 1) * (g.nx - 2) + (i - 1)
}

/// Newton solve of the scalar problem `Δu = 4 w1 e^u` with the boundary of `u` fixed.
fn fuchsian_init(g: &Grid, w1: f64, u: &mut [f64]) -> Result<(), SolverError> {
    let m = g.nx - 2;
    let n = m * (g.ny - 2);
    let (hx2, hy2) = (g.hx() * g.hx(), g.hy() * g.hy());
    for _ in 0..30 {
        let mut rhs = vec![0.0; n];
        let mut jac = BandMatrix::new(n, m, m);
        let mut worst: f64 = 0.0;
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                let p = g.idx(i, j);
                let q = interior_index(g, i, j);
                let e = 4.0 * w1 * u[p].exp();
                let f = laplacian(g, u, i, j) - e;
                worst = worst.max(f.abs());
                rhs[q] = -f;
                *jac.at(q, q) = -2.0 / hx2 - 2.0 / hy2 - e;
                if i > 1 {
                    *jac.at(q, q - 1) = 1.0 / hx2;
                }
                if i < g.nx - 2 {
                    *jac.at(q, q + 1) = 1.0 / hx2;
                }
                if j > 1 {
                    *jac.at(q, q - m) = 1.0 / hy2;
                }
                if j < g.ny - 2 {
                    *jac.at(q, q + m) = 1.0 / hy2;
                }
            }
        }
        if !worst.is_finite() {
            return Err(SolverError::InvalidProblem("Fuchsian initialization diverged".into()));
        }
        if worst < 1e-9 {
            break;
        }
        jac.factor()?;
        jac.solve(&mut rhs);
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                u[g.idx(i, j)] += rhs[interior_index(g, i, j)];
            }
        }
    }
    Ok(())
}

/// Initial iterate: boundary data plus the configured interior fill.
pub fn initial_metric(problem: &SolverProblem) -> Result<MetricGrid, SolverError> {
    let g = problem.grid();
    let mut u1 = vec![0.0; g.len()];
    let mut u3 = vec![0.0; g.len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            if g.is_boundary(i, j) {
                let (a, b) = boundary_values(problem, &g, i, j);
                u1[g.idx(i, j)] = a;
                u3[g.idx(i, j)] = b;
            }
        }
    }
    coons(&g, &mut u1);
    coons(&g, &mut u3);
    if problem.init == InitMode::Fuchsian {
        fuchsian_init(&g, problem.phase.norm_sqr(), &mut u1)?;
    }
    Ok(MetricGrid { grid: g, u1, u3 })
}

fn assemble_jacobian(c: &Coefficients, m: &MetricGrid) -> BandMatrix {
    let g = &m.grid;
    let mi = g.nx - 2;
    let n = 2 * mi * (g.ny - 2);
    let bw = 2 * mi;
    let mut jac = BandMatrix::new(n, bw, bw);
    let (hx2, hy2) = (g.hx() * g.hx(), g.hy() * g.hy());
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let p = g.idx(i, j);
            let q = interior_index(g, i, j);
            let dn = nonlinearity_jac(c, p, m.u1[p], m.u3[p]);
            for comp in 0..2 {
                let r = 2 * q + comp;
                *jac.at(r, r) = -2.0 / hx2 - 2.0 / hy2 - dn[comp][comp];
                let other = 2 * q + 1 - comp;
                *jac.at(r, other) = -dn[comp][1 - comp];
                if i > 1 {
                    *jac.at(r, r - 2) = 1.0 / hx2;
                }
                if i < g.nx - 2 {
                    *jac.at(r, r + 2) = 1.0 / hx2;
                }
                if j > 1 {
                    *jac.at(r, r - 2 * mi) = 1.0 / hy2;
                }
                if j < g.ny - 2 {
                    *jac.at(r, r + 2 * mi) = 1.0 / hy2;
                }
            }
        }
    }
    jac
}

/// Damped Newton iteration on the reduced system.
pub fn newton_solve(problem: &SolverProblem) -> Result<Solution, SolverError> {
    problem.validate()?;
    let c = Coefficients::new(problem);
    let mut metric = initial_metric(problem)?;
    check_finite(&metric)?;
    newton_from(problem, &c, &mut metric)
}

fn newton_from(problem: &SolverProblem, c: &Coefficients, metric: &mut MetricGrid) -> Result<Solution, SolverError> {
    let g = metric.grid;
    let mut res = scalar_residual(c, metric, problem.parallel);
    let mut r = res.sup();
    if !r.is_finite() {
        check_finite(metric)?;
    }
    let mut history = vec![r];
    let mut steps = Vec::new();
    let mut converged = r <= problem.tol;
    let mut iterations = 0;
    while !converged && iterations < problem.max_iter {
        iterations += 1;
        let mut jac = assemble_jacobian(c, metric);
        jac.factor()?;
        let mut delta = vec![0.0; jac.n];
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                let p = g.idx(i, j);
                let q = interior_index(&g, i, j);
                delta[2 * q] = -res.r1[p];
                delta[2 * q + 1] = -res.r3[p];
            }
        }
        jac.solve(&mut delta);
        let mut t = 1.0;
        let mut accepted = None;
        while t >= problem.min_step {
            let mut trial = metric.clone();
            for j in 1..g.ny - 1 {
                for i in 1..g.nx - 1 {
                    let p = g.idx(i, j);
                    let q = interior_index(&g, i, j);
                    trial.u1[p] += t * delta[2 * q];
                    trial.u3[p] += t * delta[2 * q + 1];
                }
            }
            let tres = scalar_residual(c, &trial, problem.parallel);
            let tr = tres.sup();
            if tr < r {
                accepted = Some((trial, tres, tr));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, tres, tr)) = accepted else {
            break;
        };
        *metric = trial;
        res = tres;
        r = tr;
        history.push(r);
        steps.push(t);
        converged = r <= problem.tol;
    }
    let rep = assemble_residual(problem, metric)?;
    Ok(Solution {
        metric: metric.clone(),
        report: SolveReport {
            converged,
            iterations,
            residual_history: history,
            step_history: steps,
            final_residual: r,
            full_matrix_residual: rep.full_matrix,
            dependent_slot_residual: rep.dependent_slots,
            tolerance: problem.tol,
            grid: (g.nx, g.ny),
            slot_constant: "-i/√2 (squared modulus 1/2)".into(),
            problem_hash: problem.hash(),
        },
    })
}

/// Sup-norm error against the manufactured fields.
pub fn manufactured_error(metric: &MetricGrid) -> f64 {
    let g = &metric.grid;
    let mut e: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.idx(i, j);
            let (x, y) = (g.x(i), g.y(j));
            e = e.max((metric.u1[p] - manufactured::u1(x, y)).abs());
            e = e.max((metric.u3[p] - manufactured::u3(x, y)).abs());
        }
    }
    e
}

/// Writes `x,y,u1,u3,residual` with a commented header.
pub fn export_metric<W: Write>(problem: &SolverProblem, sol: &Solution, mut out: W) -> Result<(), SolverError> {
    let g = sol.metric.grid;
    let c = Coefficients::new(problem);
    let res = scalar_residual(&c, &sol.metric, false);
    let mut s = String::new();
    let _ = writeln!(s, "# g2cyclic metric");
    let _ = writeln!(s, "# problem_hash={}", problem.hash());
    let _ = writeln!(s, "# tol={:e}", problem.tol);
    let _ = writeln!(s, "# converged:{}", sol.report.converged);
    let _ = writeln!(s, "# grid nx={} ny={} x0={} x1={} y0={} y1={}", g.nx, g.ny, g.x0, g.x1, g.y0, g.y1);
    let _ = writeln!(s, "x,y,u1,u3,residual");
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.idx(i, j);
            let _ = writeln!(s, "{},{},{},{},{}", g.x(i), g.y(j), sol.metric.u1[p], sol.metric.u3[p], res.pointwise(p));
        }
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Metric read back from [`export_metric`] output, with its convergence flag.
pub fn import_metric<R: BufRead>(input: R) -> Result<(MetricGrid, bool), SolverError> {
    let perr = |s: &str| SolverError::Parse(s.to_string());
    let mut grid = None;
    let mut converged = None;
    let mut u1 = Vec::new();
    let mut u3 = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# converged:") {
            converged = Some(rest.trim() == "true");
        } else if let Some(rest) = line.strip_prefix("# grid ") {
            let mut kv = std::collections::HashMap::new();
            for tok in rest.split_whitespace() {
                let (k, v) = tok.split_once('=').ok_or_else(|| perr("grid header"))?;
                kv.insert(k, v);
            }
            let num = |k: &str| kv.get(k).ok_or_else(|| perr(k))?.parse::<f64>().map_err(|_| perr(k));
            let int = |k: &str| kv.get(k).ok_or_else(|| perr(k))?.parse::<usize>().map_err(|_| perr(k));
            grid = Some(Grid::new((num("x0")?, num("x1")?), (num("y0")?, num("y1")?), int("nx")?, int("ny")?));
        } else if line.starts_with('#') || line.is_empty() || line.starts_with("x,") {
            continue;
        } else {
            let f: Vec<f64> = line.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| perr(line))?;
            if f.len() < 4 {
                return Err(perr(line));
            }
            u1.push(f[2]);
            u3.push(f[3]);
        }
    }
    let grid = grid.ok_or_else(|| perr("missing grid header"))?;
    if u1.len() != grid.len() {
        return Err(perr("row count does not match grid"));
    }
    Ok((MetricGrid { grid, u1, u3 }, converged.unwrap_or(false)))
}

/// Metric with an exactly known continuum solution, sampled on the grid
/// (the Fuchsian closed form), for comparisons.
pub fn fuchsian_exact(problem: &SolverProblem) -> MetricGrid {
    let g = problem.grid();
    let w1 = problem.phase.norm_sqr();
    let mut u1 = vec![0.0; g.len()];
    let mut u3 = vec![0.0; g.len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = g.idx(i, j);
            u1[p] = fuchsian_u1(g.z(i, j), w1);
            u3[p] = 0.5 * u1[p];
        }
    }
    MetricGrid { grid: g, u1, u3 }
}
