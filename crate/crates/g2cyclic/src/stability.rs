//! Stability and moduli-dimension arithmetic for cyclic G2' Higgs bundles.
//!
//! The bundle splits as `L_{-3} ⊕ … ⊕ L_3` with `L_{-3} = B`, `L_{-2} = BK⁻¹`,
//! `L_{-1} = K`, `L_0 = O`, `L_1 = K⁻¹`, `L_2 = B⁻¹K`, `L_3 = B⁻¹`, and
//! `d = deg B`. The Higgs field has constant arrows along the chain, `β`
//! on `L_{-2} → L_{-1}` and `L_1 → L_2`, and `δ` on `L_2 → L_{-3}` and
//! `L_3 → L_{-2}`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilityError {
    #[error("genus must be at least 2, got {0}")]
    Genus(i64),
    #[error("degree d = {d} outside [0, {max}] for genus {g}")]
    DegreeOutOfRange { g: i64, d: i64, max: i64 },
    #[error("genus {0} too large: 2^(2g) components do not fit in 64 bits")]
    ComponentOverflow(i64),
}

/// Largest genus whose component count `2^(2g)` fits in a `u64`.
pub const MAX_MODULI_GENUS: i64 = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct HiggsDatum {
    pub genus: i64,
    pub d: i64,
    pub beta_nonzero: bool,
    pub delta_nonzero: bool,
}

impl HiggsDatum {
    pub fn new(genus: i64, d: i64, beta_nonzero: bool, delta_nonzero: bool) -> Self {
        Self { genus, d, beta_nonzero, delta_nonzero }
    }
}

/// Ordered so that `Unstable < NotPolystable < StrictlyPolystable < Stable`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    InvalidDegree,
    Unstable,
    NotPolystable,
    StrictlyPolystable,
    Stable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::InvalidDegree => "InvalidDegree",
            Verdict::Unstable => "Unstable",
            Verdict::NotPolystable => "NotPolystable",
            Verdict::StrictlyPolystable => "StrictlyPolystable",
            Verdict::Stable => "Stable",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub subbundle: String,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// β = 0: the curve data degenerate to the totally geodesic locus.
    pub totally_geodesic: bool,
    /// β = 0 with d ≥ g, where the verdict is obtained by the same
    /// subbundle enumeration rather than stated outright.
    pub extrapolated: bool,
}

/// Degrees of `L_{-3}, …, L_3`.
pub fn degree_vector(g: i64, d: i64) -> [i64; 7] {
    let k = 2 * g - 2;
    [d, d - k, k, 0, -k, k - d, -d]
}

fn witness(name: &str, degree: i64) -> Option<Witness> {
    Some(Witness { subbundle: name.to_string(), degree })
}

/// Closed-form classification.
pub fn classify(x: &HiggsDatum) -> Result<StabilityVerdict, StabilityError> {
    let (g, d) = (x.genus, x.d);
    if g < 2 {
        return Err(StabilityError::Genus(g));
    }
    let tg = !x.beta_nonzero;
    let mk = |verdict, witness| StabilityVerdict { verdict, witness, totally_geodesic: tg, extrapolated: tg && d >= g };
    if d < 0 || d > 6 * g - 6 {
        return Ok(mk(Verdict::InvalidDegree, None));
    }
    let top = 2 * g - 2 - 2 * d; // deg(B⁻¹ ⊕ B⁻¹K)
    let bottom = -top; // deg(B ⊕ BK⁻¹)
    let v = match (x.beta_nonzero, x.delta_nonzero) {
        (true, true) if d == 0 => mk(Verdict::StrictlyPolystable, witness("B⁻¹ ⊂ B ⊕ B⁻¹ (kernel line)", 0)),
        (true, true) => mk(Verdict::Stable, None),
        (true, false) if d < g - 1 => mk(Verdict::Unstable, witness("B⁻¹ ⊕ B⁻¹K", top)),
        (true, false) if d == g - 1 => mk(Verdict::NotPolystable, witness("B⁻¹ ⊕ B⁻¹K", top)),
        (true, false) => mk(Verdict::Stable, None),
        (false, true) if d < g - 1 => mk(Verdict::StrictlyPolystable, witness("K ⊕ O ⊕ K⁻¹", 0)),
        (false, true) if d == g - 1 => mk(Verdict::NotPolystable, witness("B ⊕ BK⁻¹", bottom)),
        (false, true) => mk(Verdict::Unstable, witness("B ⊕ BK⁻¹", bottom)),
        (false, false) if d < g - 1 => mk(Verdict::Unstable, witness("B⁻¹ ⊕ B⁻¹K", top)),
        (false, false) if d == g - 1 => mk(Verdict::StrictlyPolystable, witness("B⁻¹ ⊕ B⁻¹K", 0)),
        (false, false) => mk(Verdict::Unstable, witness("B ⊕ BK⁻¹", bottom)),
    };
    Ok(v)
}

/// Part of an invariant subbundle inside `E1 = L_{-3} ⊕ L_3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum E1Part {
    Zero,
    Lm3,
    L3,
    /// Kernel of `Φ|E1 : E1 → L_{-2} K` (only distinct from `L_3` when δ ≠ 0).
    KerLine,
    /// Saturated image of `L_2` in `E1 ⊗ K` (only distinct from `L_3` when δ ≠ 0).
    ImLine,
    All,
}

impl E1Part {
    fn rank(self) -> usize {
        match self {
            E1Part::Zero => 0,
            E1Part::All => 2,
            _ => 1,
        }
    }

    fn degree(self, deg: &[i64; 7]) -> i64 {
        match self {
            E1Part::Zero => 0,
            E1Part::Lm3 => deg[0],
            E1Part::L3 | E1Part::KerLine | E1Part::ImLine => deg[6],
            E1Part::All => deg[0] + deg[6],
        }
    }

    fn name(self) -> &'static str {
        match self {
            E1Part::Zero => "",
            E1Part::Lm3 => "L-3",
            E1Part::L3 => "L3",
            E1Part::KerLine => "ker",
            E1Part::ImLine => "im",
            E1Part::All => "L-3+L3",
        }
    }

    /// Direction in E1 as `(s_{-3}, s_3)` coefficients up to the factor δ:
    /// `L-3 = (1,0)`, `L3 = (0,1)`, `ker = (-δ, c)`, `im = (δ, c)`.
    /// Two lines are complementary everywhere iff the determinant is a
    /// nonvanishing section.
    fn complementary(self, o: E1Part, delta_vanishes_somewhere: bool) -> bool {
        use E1Part::*;
        match (self, o) {
            (Zero, All) | (All, Zero) => true,
            (Lm3, L3) | (L3, Lm3) => true,
            (Lm3, KerLine) | (KerLine, Lm3) | (Lm3, ImLine) | (ImLine, Lm3) => true,
            (L3, KerLine) | (KerLine, L3) | (L3, ImLine) | (ImLine, L3) | (KerLine, ImLine) | (ImLine, KerLine) => {
                !delta_vanishes_somewhere
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Candidate {
    e1: E1Part,
    /// Bit i set if `L_{i-2}` is included, i = 0..5 for `L_{-2}..L_2`.
    mid: u8,
}

impl Candidate {
    fn has(self, k: i32) -> bool {
        self.mid & (1 << (k + 2)) != 0
    }

    fn rank(self) -> usize {
        self.e1.rank() + self.mid.count_ones() as usize
    }

    fn degree(self, deg: &[i64; 7]) -> i64 {
        let mut s = self.e1.degree(deg);
        for k in -2..=2 {
            if self.has(k) {
                s += deg[(k + 3) as usize];
            }
        }
        s
    }

    fn name(self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.e1 != E1Part::Zero {
            parts.push(self.e1.name().to_string());
        }
        for k in -2..=2 {
            if self.has(k) {
                parts.push(format!("L{k}"));
            }
        }
        parts.join("+")
    }

    fn invariant(self, beta: bool, delta: bool) -> bool {
        let need = |k: i32| self.has(k);
        if self.has(-2) && beta && !need(-1) {
            return false;
        }
        if self.has(-1) && !need(0) {
            return false;
        }
        if self.has(0) && !need(1) {
            return false;
        }
        if self.has(1) && beta && !need(2) {
            return false;
        }
        if self.has(2) {
            let ok = if delta {
                matches!(self.e1, E1Part::ImLine | E1Part::All)
            } else {
                matches!(self.e1, E1Part::L3 | E1Part::All)
            };
            if !ok {
                return false;
            }
        }
        let e1_needs_lm2 = match self.e1 {
            E1Part::Zero | E1Part::KerLine => false,
            E1Part::L3 => delta,
            E1Part::Lm3 | E1Part::ImLine | E1Part::All => true,
        };
        !e1_needs_lm2 || need(-2)
    }
}

fn candidates(delta: bool) -> Vec<Candidate> {
    let mut parts = vec![E1Part::Zero, E1Part::Lm3, E1Part::L3, E1Part::All];
    if delta {
        parts.push(E1Part::KerLine);
        parts.push(E1Part::ImLine);
    }
    let mut out = Vec::new();
    for e1 in parts {
        for mid in 0u8..32 {
            out.push(Candidate { e1, mid });
        }
    }
    out
}

fn realizable(g: i64, d: i64, beta: bool, delta: bool) -> bool {
    (!beta || 6 * g - 6 - d >= 0) && (!delta || d >= 0)
}

/// Verdict of the invariant-subbundle enumeration alone, ignoring whether
/// the degree is admissible.
fn enumerate_verdict(g: i64, d: i64, beta: bool, delta: bool) -> (Verdict, Option<Witness>) {
    let deg = degree_vector(g, d);
    let all = candidates(delta);
    let inv: Vec<Candidate> = all.iter().copied().filter(|c| c.invariant(beta, delta) && c.rank() > 0 && c.rank() < 7).collect();
    let worst = inv.iter().copied().max_by_key(|c| (c.degree(&deg), std::cmp::Reverse(c.rank())));
    let Some(w) = worst else {
        return (Verdict::Stable, None);
    };
    let wd = w.degree(&deg);
    let wit = Some(Witness { subbundle: w.name(), degree: wd });
    if wd < 0 {
        return (Verdict::Stable, None);
    }
    if wd > 0 {
        return (Verdict::Unstable, wit);
    }
    let delta_zero_somewhere = d > 0;
    for v in inv.iter().filter(|c| c.degree(&deg) == 0) {
        let has_complement = inv.iter().any(|c| {
            c.mid & v.mid == 0 && (c.mid | v.mid) == 0b11111 && c.e1.complementary(v.e1, delta_zero_somewhere)
        });
        if !has_complement {
            return (Verdict::NotPolystable, Some(Witness { subbundle: v.name(), degree: 0 }));
        }
    }
    (Verdict::StrictlyPolystable, wit)
}

/// Brute-force oracle: enumerates Φ-invariant subbundles built from the
/// summands of the cyclic splitting (plus the two distinguished lines of
/// `L_{-3} ⊕ L_3` when δ ≠ 0) and reads off the verdict from their degrees.
pub fn classify_by_enumeration(x: &HiggsDatum) -> Result<Verdict, StabilityError> {
    let (g, d) = (x.genus, x.d);
    if g < 2 {
        return Err(StabilityError::Genus(g));
    }
    // Admissible degrees: some realizable datum with β ≠ 0 is polystable.
    let admissible = [true, false].iter().any(|&delta| {
        realizable(g, d, true, delta) && enumerate_verdict(g, d, true, delta).0 >= Verdict::StrictlyPolystable
    });
    if !admissible {
        return Ok(Verdict::InvalidDegree);
    }
    Ok(enumerate_verdict(g, d, x.beta_nonzero, x.delta_nonzero).0)
}

/// Dimension of the space of sections of a line bundle of the given degree,
/// when the degree alone determines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum H0Dim {
    Value(i64),
    Undetermined,
}

/// Riemann–Roch with Serre duality. Degree `2g - 2` is read as the canonical
/// bundle (`g` sections); other bundles of that degree have `g - 1`.
pub fn h0_dim(genus: i64, degree: i64) -> H0Dim {
    if degree > 2 * genus - 2 {
        H0Dim::Value(degree - genus + 1)
    } else if degree < 0 {
        H0Dim::Value(0)
    } else if degree == 2 * genus - 2 {
        H0Dim::Value(genus)
    } else {
        H0Dim::Undetermined
    }
}

/// `h⁰(Kⁿ)` for n ≥ 0.
pub fn h0_canonical_power(genus: i64, n: i64) -> i64 {
    match n {
        0 => 1,
        1 => genus,
        n => (2 * n - 1) * (genus - 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BaseSpace {
    /// `Sym^k(X)`.
    SymmetricProduct { k: i64 },
    /// Covering of `Sym^k(X)` of the given order.
    CoverOfSymmetricProduct { k: i64, order: u64 },
}

impl BaseSpace {
    pub fn dim(&self) -> i64 {
        match self {
            BaseSpace::SymmetricProduct { k } | BaseSpace::CoverOfSymmetricProduct { k, .. } => *k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FiberSpace {
    VectorBundle { rank: i64 },
    /// `(C^n \ {0}) / ±Id`.
    PuncturedConeModSign { n: i64 },
}

impl FiberSpace {
    pub fn dim(&self) -> i64 {
        match self {
            FiberSpace::VectorBundle { rank } => *rank,
            FiberSpace::PuncturedConeModSign { n } => *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuliDescription {
    pub genus: i64,
    pub d: i64,
    pub total_dim: i64,
    pub teichmuller_dim: i64,
    /// Dimension over a fixed Riemann surface.
    pub fiber_over_teichmuller_dim: i64,
    pub base: BaseSpace,
    pub fiber: FiberSpace,
    pub components: u64,
    pub euler_class: i64,
}

pub fn moduli_description(genus: i64, d: i64) -> Result<ModuliDescription, StabilityError> {
    if genus < 2 {
        return Err(StabilityError::Genus(genus));
    }
    if genus > MAX_MODULI_GENUS {
        return Err(StabilityError::ComponentOverflow(genus));
    }
    let max = 6 * genus - 6;
    if !(0..=max).contains(&d) {
        return Err(StabilityError::DegreeOutOfRange { g: genus, d, max });
    }
    let unwrap = |h: H0Dim| match h {
        H0Dim::Value(v) => v,
        H0Dim::Undetermined => unreachable!("degree is in the Riemann-Roch range"),
    };
    let (base, fiber) = if d >= genus {
        // δ ∈ H⁰(B²) over the divisor of β ∈ H⁰(B⁻¹K³).
        (BaseSpace::SymmetricProduct { k: max - d }, FiberSpace::VectorBundle { rank: unwrap(h0_dim(genus, 2 * d)) })
    } else {
        // Divisor of δ plus a square-root choice for B; β up to sign.
        (
            BaseSpace::CoverOfSymmetricProduct { k: 2 * d, order: 1u64 << (2 * genus) },
            FiberSpace::PuncturedConeModSign { n: unwrap(h0_dim(genus, max - d)) },
        )
    };
    let fiber_dim = base.dim() + fiber.dim();
    Ok(ModuliDescription {
        genus,
        d,
        total_dim: d + 8 * genus - 8,
        teichmuller_dim: 3 * genus - 3,
        fiber_over_teichmuller_dim: fiber_dim,
        base,
        fiber,
        components: if d == 0 { 1u64 << (2 * genus) } else { 1 },
        euler_class: genus - 1 - d,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitchinLocusReport {
    pub genus: i64,
    pub d: i64,
    /// `deg(B⁻¹K³)` at d = 6g - 6; zero forces `B = K³` when β ≠ 0.
    pub beta_bundle_degree: i64,
    pub parameter_dim: i64,
    pub teichmuller_dim: i64,
    pub total_dim: i64,
    pub consistent: bool,
}

pub fn hitchin_locus_check(genus: i64) -> Result<HitchinLocusReport, StabilityError> {
    if genus < 2 {
        return Err(StabilityError::Genus(genus));
    }
    let d = 6 * genus - 6;
    let beta_bundle_degree = 3 * (2 * genus - 2) - d;
    let parameter_dim = match h0_dim(genus, 12 * genus - 12) {
        H0Dim::Value(v) => v,
        H0Dim::Undetermined => unreachable!(),
    };
    let m = moduli_description(genus, d)?;
    let teich = 3 * genus - 3;
    Ok(HitchinLocusReport {
        genus,
        d,
        beta_bundle_degree,
        parameter_dim,
        teichmuller_dim: teich,
        total_dim: teich + parameter_dim,
        consistent: beta_bundle_degree == 0
            && parameter_dim == 11 * genus - 11
            && parameter_dim == h0_canonical_power(genus, 6)
            && teich + parameter_dim == m.total_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(g: i64, d: i64, b: bool, dl: bool) -> Verdict {
        classify(&HiggsDatum::new(g, d, b, dl)).unwrap().verdict
    }

    #[test]
    fn examples() {
        assert_eq!(v(2, 4, true, false), Verdict::Stable);
        let r = classify(&HiggsDatum::new(2, 1, true, false)).unwrap();
        assert_eq!(r.verdict, Verdict::NotPolystable);
        assert_eq!(r.witness, Some(Witness { subbundle: "B⁻¹ ⊕ B⁻¹K".into(), degree: 0 }));
        assert_eq!(v(2, 0, true, true), Verdict::StrictlyPolystable);
        assert_eq!(v(2, 7, true, true), Verdict::InvalidDegree);
        assert_eq!(v(2, -1, true, false), Verdict::InvalidDegree);
        assert!(classify(&HiggsDatum::new(1, 0, true, true)).is_err());
    }

    #[test]
    fn oracle_small() {
        for g in 2..=4 {
            for d in -2..=6 * g - 4 {
                for (b, dl) in [(true, true), (true, false), (false, true), (false, false)] {
                    let x = HiggsDatum::new(g, d, b, dl);
                    assert_eq!(classify(&x).unwrap().verdict, classify_by_enumeration(&x).unwrap(), "{x:?}");
                }
            }
        }
    }

    #[test]
    fn riemann_roch() {
        assert_eq!(h0_dim(2, 12), H0Dim::Value(11));
        assert_eq!(h0_dim(3, -1), H0Dim::Value(0));
        assert_eq!(h0_dim(2, 1), H0Dim::Undetermined);
        assert_eq!(h0_canonical_power(2, 6), 11);
    }

    #[test]
    fn moduli_examples() {
        let m = moduli_description(2, 6).unwrap();
        assert_eq!(m.total_dim, 14);
        assert_eq!(m.fiber, FiberSpace::VectorBundle { rank: 11 });
        assert_eq!(m.base, BaseSpace::SymmetricProduct { k: 0 });
        let m = moduli_description(2, 0).unwrap();
        assert_eq!((m.total_dim, m.components), (8, 16));
        let m = moduli_description(3, 2).unwrap();
        assert_eq!(m.fiber, FiberSpace::PuncturedConeModSign { n: 8 });
        assert_eq!(m.base, BaseSpace::CoverOfSymmetricProduct { k: 4, order: 64 });
        assert!(moduli_description(2, 7).is_err());
        let top = moduli_description(MAX_MODULI_GENUS, 0).unwrap();
        assert_eq!(top.components, 1 << 62);
        assert!(matches!(moduli_description(32, 0), Err(StabilityError::ComponentOverflow(32))));
    }

    #[test]
    fn hitchin_locus() {
        let r = hitchin_locus_check(2).unwrap();
        assert_eq!((r.parameter_dim, r.total_dim, r.beta_bundle_degree), (11, 14, 0));
        assert!(r.consistent);
    }
}
