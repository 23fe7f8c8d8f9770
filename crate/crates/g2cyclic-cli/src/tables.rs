//! `stability` and `moduli`: verdict and dimension tables.

use std::path::Path;

use anyhow::{bail, Context, Result};
use g2cyclic::stability::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::summary::{Check, Outcome};

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct BatchRow {
    pub g: i64,
    pub d: i64,
    pub beta: bool,
    pub delta: bool,
}

#[derive(Debug, Serialize)]
struct VerdictRow {
    g: i64,
    d: i64,
    beta: bool,
    delta: bool,
    verdict: Verdict,
    enumeration: Verdict,
    agree: bool,
    witness: String,
    witness_degree: String,
    totally_geodesic: bool,
    extrapolated: bool,
}

#[derive(Debug, Serialize)]
struct DegreeRow {
    g: i64,
    d: i64,
    valid: bool,
    beta_delta: Verdict,
    beta_only: Verdict,
    delta_only: Verdict,
    neither: Verdict,
    agree: bool,
}

fn verdict_row(x: HiggsDatum) -> Result<VerdictRow> {
    let v = classify(&x)?;
    let e = classify_by_enumeration(&x)?;
    Ok(VerdictRow {
        g: x.genus,
        d: x.d,
        beta: x.beta_nonzero,
        delta: x.delta_nonzero,
        verdict: v.verdict,
        enumeration: e,
        agree: v.verdict == e,
        witness: v.witness.as_ref().map(|w| w.subbundle.clone()).unwrap_or_default(),
        witness_degree: v.witness.as_ref().map(|w| w.degree.to_string()).unwrap_or_default(),
        totally_geodesic: v.totally_geodesic,
        extrapolated: v.extrapolated,
    })
}

pub fn read_batch(path: &Path) -> Result<Vec<BatchRow>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path).with_context(|| format!("opening batch file {}", path.display()))?;
    let mut rows = Vec::new();
    for (k, rec) in r.deserialize().enumerate() {
        let row: BatchRow = rec.with_context(|| format!("{}: data row {}", path.display(), k + 1))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Options of the `stability` subcommand after merging flags and config.
#[derive(Debug, Default, Clone)]
pub struct StabilityArgs {
    pub genus: Option<i64>,
    pub d: Option<i64>,
    pub all_d: bool,
    pub beta: Option<bool>,
    pub delta: Option<bool>,
    pub batch: Option<std::path::PathBuf>,
}

impl StabilityArgs {
    pub fn merged(self, cfg: &RunConfig) -> Self {
        let s = &cfg.file.stability;
        Self {
            genus: self.genus.or(s.genus),
            d: self.d.or(s.d),
            all_d: self.all_d || s.all_d.unwrap_or(false),
            beta: self.beta.or(s.beta),
            delta: self.delta.or(s.delta),
            batch: self.batch.or(s.batch.clone()),
        }
    }
}

pub fn stability(cfg: &RunConfig, args: StabilityArgs) -> Result<Outcome> {
    let args = args.merged(cfg);
    let mut out = Outcome::new("stability", &cfg.out)?;
    if let Some(path) = &args.batch {
        let rows = read_batch(path)?;
        let mut w = csv::Writer::from_writer(out.create("verdicts.csv")?);
        let mut agree = 0;
        for r in &rows {
            let v = verdict_row(HiggsDatum::new(r.g, r.d, r.beta, r.delta))?;
            agree += usize::from(v.agree);
            w.serialize(&v)?;
        }
        w.flush()?;
        out.note(format!("batch {}: {} rows", path.display(), rows.len()));
        out.check(Check::equals("closed form agrees with enumeration", agree, rows.len()));
        return Ok(out);
    }

    let Some(g) = args.genus else { bail!("stability: give --genus (or [stability] genus) or --batch") };
    if g < 2 {
        bail!("stability: genus must be at least 2, got {g}");
    }
    let degrees: Vec<i64> = match (args.all_d, args.d) {
        (true, _) => (-1..=6 * g - 5).collect(),
        (false, Some(d)) => vec![d],
        (false, None) => bail!("stability: give --d or --all-d"),
    };
    let flags: Vec<(bool, bool)> = match (args.beta, args.delta) {
        (None, None) => vec![(true, true), (true, false), (false, true), (false, false)],
        (b, dl) => vec![(b.unwrap_or(true), dl.unwrap_or(true))],
    };

    // One row per degree with all four flag combinations side by side.
    let mut table = match flags.len() {
        4 => Some(csv::Writer::from_writer(out.create("stability.csv")?)),
        _ => None,
    };
    let mut detail = csv::Writer::from_writer(out.create("verdicts.csv")?);
    let mut agree = 0;
    let mut total = 0;
    for &d in &degrees {
        let mut vs = Vec::new();
        let mut row_agree = true;
        for &(b, dl) in &flags {
            let v = verdict_row(HiggsDatum::new(g, d, b, dl))?;
            agree += usize::from(v.agree);
            row_agree &= v.agree;
            total += 1;
            vs.push(v.verdict);
            detail.serialize(&v)?;
        }
        if let Some(t) = table.as_mut() {
            t.serialize(DegreeRow {
                g,
                d,
                valid: (0..=6 * g - 6).contains(&d),
                beta_delta: vs[0],
                beta_only: vs[1],
                delta_only: vs[2],
                neither: vs[3],
                agree: row_agree,
            })?;
        }
    }
    if let Some(mut t) = table {
        t.flush()?;
    }
    detail.flush()?;
    out.note(format!("genus {g}, degrees {}..={}", degrees[0], degrees[degrees.len() - 1]));
    out.check(Check::equals("closed form agrees with enumeration", agree, total));
    out.put("rows", &degrees.len())?;
    Ok(out)
}

#[derive(Debug, Serialize)]
struct ModuliRow {
    g: i64,
    d: i64,
    total_dim: i64,
    teichmuller_dim: i64,
    fiber_dim: i64,
    base: String,
    base_dim: i64,
    fiber: String,
    fiber_rank: i64,
    components: u64,
    euler_class: i64,
}

pub fn moduli(cfg: &RunConfig, genus: Option<i64>, d: Option<i64>) -> Result<Outcome> {
    let m = &cfg.file.moduli;
    let (lo, hi) = match genus {
        Some(g) => (g, g),
        None => (m.genus_min.unwrap_or(2), m.genus_max.unwrap_or(10)),
    };
    if lo < 2 || hi < lo {
        bail!("moduli: genus range {lo}..={hi} is empty or below 2");
    }
    let d = d.or(m.d);
    let mut out = Outcome::new("moduli", &cfg.out)?;
    let mut w = csv::Writer::from_writer(out.create("moduli.csv")?);
    let mut ok_dims = true;
    let mut ok_components = true;
    let mut rows = 0;
    for g in lo..=hi {
        let ds: Vec<i64> = match d {
            Some(d) => vec![d],
            None => (0..=6 * g - 6).collect(),
        };
        for d in ds {
            let md = moduli_description(g, d)?;
            let (base, fiber) = match (&md.base, &md.fiber) {
                (BaseSpace::SymmetricProduct { k }, FiberSpace::VectorBundle { rank }) => (format!("Sym^{k}"), format!("vector bundle rank {rank}")),
                (BaseSpace::CoverOfSymmetricProduct { k, order }, FiberSpace::PuncturedConeModSign { n }) => {
                    (format!("{order}-fold cover of Sym^{k}"), format!("(C^{n} minus 0)/+-1"))
                }
                (b, f) => (format!("{b:?}"), format!("{f:?}")),
            };
            ok_dims &= md.total_dim == d + 8 * g - 8 && md.total_dim == md.teichmuller_dim + md.fiber_over_teichmuller_dim;
            if d == 0 {
                ok_components &= md.components == 1u64 << (2 * g);
            }
            w.serialize(ModuliRow {
                g,
                d,
                total_dim: md.total_dim,
                teichmuller_dim: md.teichmuller_dim,
                fiber_dim: md.fiber_over_teichmuller_dim,
                base,
                base_dim: md.base.dim(),
                fiber,
                fiber_rank: md.fiber.dim(),
                components: md.components,
                euler_class: md.euler_class,
            })?;
            rows += 1;
        }
        let h = hitchin_locus_check(g)?;
        out.check(Check::holds(format!("genus {g}: top degree is the Hitchin component"), h.consistent));
    }
    w.flush()?;
    out.check(Check::holds("dimension = d + 8g - 8 = Teichmuller + fibre", ok_dims));
    out.check(Check::holds("2^(2g) components at d = 0", ok_components));
    out.note(format!("genus {lo}..={hi}, {rows} rows"));
    out.put("rows", &rows)?;
    Ok(out)
}
