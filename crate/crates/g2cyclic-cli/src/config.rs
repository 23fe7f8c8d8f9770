//! Run configuration: a flat `key = value` file with `[sections]`, merged
//! with command-line overrides.
//!
//! The file is read with a TOML parser, but every section is a flat record:
//! values are numbers, booleans, strings or arrays of numbers. Unknown keys
//! and sections are rejected with their line and column.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use g2cyclic::frenet::CheckOptions;
use g2cyclic::solver::{BoundaryMode, InitMode, Poly, SolverProblem};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub algebra: AlgebraSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub moduli: ModuliSection,
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub reconstruct: ReconstructSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub serial: Option<bool>,
    pub out: Option<PathBuf>,
    pub verbose: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    /// Random pairs per seeded identity sweep.
    pub random_pairs: Option<usize>,
    /// Random pairs for the 7-form identity, which is slower.
    pub volume_pairs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub genus: Option<i64>,
    pub d: Option<i64>,
    pub all_d: Option<bool>,
    pub beta: Option<bool>,
    pub delta: Option<bool>,
    /// CSV with header `g,d,beta,delta`.
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuliSection {
    pub genus_min: Option<i64>,
    pub genus_max: Option<i64>,
    pub d: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub b_re: Option<Vec<f64>>,
    pub b_im: Option<Vec<f64>>,
    pub dd_re: Option<Vec<f64>>,
    pub dd_im: Option<Vec<f64>>,
    /// Argument of the global phase, in radians.
    pub phase: Option<f64>,
    pub boundary: Option<String>,
    pub u1_boundary: Option<f64>,
    pub u3_boundary: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub min_step: Option<f64>,
    pub init: Option<String>,
    pub totally_geodesic: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    pub q_tol: Option<f64>,
    pub defect_tol: Option<f64>,
    pub b_fraction: Option<f64>,
    pub edge_fraction: Option<f64>,
    pub geodesic: Option<bool>,
    pub geodesic_rel_tol: Option<f64>,
    /// Expected outcome of the parallel-line search, if any.
    pub expect_parallel_line: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructSection {
    pub metric: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub serial: bool,
}

#[derive(Debug)]
pub struct RunConfig {
    pub file: ConfigFile,
    pub out: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
    pub serial: bool,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(file: ConfigFile, o: &Overrides) -> Self {
        let out = o.out.clone().or_else(|| file.run.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
        let seed = o.seed.or(file.run.seed).unwrap_or(0);
        let tol = o.tol.or(file.run.tol);
        let serial = o.serial || file.run.serial.unwrap_or(false);
        let verbose = file.run.verbose.unwrap_or(false);
        Self { file, out, seed, tol, serial, verbose }
    }

    pub fn problem(&self) -> Result<SolverProblem> {
        let p = &self.file.problem;
        let d = SolverProblem::default();
        let poly = |name: &str, re: &Option<Vec<f64>>, im: &Option<Vec<f64>>, default: &Poly| -> Result<Poly> {
            match (re, im) {
                (None, None) => Ok(default.clone()),
                (re, im) => {
                    let re = re.clone().unwrap_or_default();
                    let im = im.clone().unwrap_or_default();
                    let n = re.len().max(im.len());
                    if n == 0 {
                        bail!("[problem] {name}: empty coefficient list");
                    }
                    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
                    Ok(Poly((0..n).map(|k| Complex64::new(at(&re, k), at(&im, k))).collect()))
                }
            }
        };
        let boundary = match p.boundary.as_deref().unwrap_or("constant") {
            "constant" => BoundaryMode::ConstantOracle,
            "dirichlet" => BoundaryMode::Dirichlet { u1: p.u1_boundary.unwrap_or(0.0), u3: p.u3_boundary.unwrap_or(0.0) },
            "manufactured" => BoundaryMode::Manufactured,
            "fuchsian" => BoundaryMode::Fuchsian,
            other => bail!("[problem] boundary: unknown mode {other:?} (constant, dirichlet, manufactured, fuchsian)"),
        };
        let init = match p.init.as_deref().unwrap_or("fuchsian") {
            "fuchsian" => InitMode::Fuchsian,
            "interpolate" => InitMode::Interpolate,
            other => bail!("[problem] init: unknown mode {other:?} (fuchsian, interpolate)"),
        };
        let (b_default, dd_default) = if boundary == BoundaryMode::Fuchsian { (Poly::zero(), Poly::zero()) } else { (d.b.clone(), d.dd.clone()) };
        let problem = SolverProblem {
            x_range: (p.x_min.unwrap_or(d.x_range.0), p.x_max.unwrap_or(d.x_range.1)),
            y_range: (p.y_min.unwrap_or(d.y_range.0), p.y_max.unwrap_or(d.y_range.1)),
            nx: p.nx.unwrap_or(d.nx),
            ny: p.ny.or(p.nx).unwrap_or(d.ny),
            b: poly("b", &p.b_re, &p.b_im, &b_default)?,
            dd: poly("dd", &p.dd_re, &p.dd_im, &dd_default)?,
            phase: Complex64::from_polar(1.0, p.phase.unwrap_or(0.0)),
            boundary,
            tol: self.tol.or(p.tol).unwrap_or(d.tol),
            max_iter: p.max_iter.unwrap_or(d.max_iter),
            min_step: p.min_step.unwrap_or(d.min_step),
            init,
            totally_geodesic: p.totally_geodesic.unwrap_or(false),
            parallel: !self.serial && cfg!(feature = "parallel"),
        };
        problem.validate().context("[problem]")?;
        Ok(problem)
    }

    pub fn check_options(&self) -> CheckOptions {
        let d = CheckOptions::default();
        let c = &self.file.checks;
        CheckOptions { b_fraction: c.b_fraction.unwrap_or(d.b_fraction), edge_fraction: c.edge_fraction.unwrap_or(d.edge_fraction) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                let cfg = RunConfig::new(ConfigFile::load(&path).unwrap(), &Overrides::default());
                if cfg.file.problem.boundary.is_some() || cfg.file.problem.nx.is_some() {
                    cfg.problem().unwrap();
                }
            }
        }
    }

    #[test]
    fn overrides_win() {
        let f = ConfigFile::parse("[run]\nseed = 3\ntol = 1e-6\nout = \"a\"\n").unwrap();
        let o = Overrides { out: Some("b".into()), seed: Some(9), tol: None, serial: true };
        let cfg = RunConfig::new(f, &o);
        assert_eq!((cfg.seed, cfg.tol, cfg.serial), (9, Some(1e-6), true));
        assert_eq!(cfg.out, PathBuf::from("b"));
        assert!(!cfg.problem().unwrap().parallel);
    }

    #[test]
    fn polynomial_pairs() {
        let f = ConfigFile::parse("[problem]\nboundary = \"dirichlet\"\nb_re = [1.0, 2.0]\nb_im = [0.5]\n").unwrap();
        let p = RunConfig::new(f, &Overrides::default()).problem().unwrap();
        assert_eq!(p.b, Poly(vec![Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0)]));
    }

    #[test]
    fn nested_tables_are_rejected() {
        assert!(ConfigFile::parse("[problem.inner]\nnx = 3\n").is_err());
        assert!(ConfigFile::parse("[problem]\nnx = \"many\"\n").is_err());
    }
}
