//! Split octonions via Cayley–Dickson doubling, the imaginary part with its
//! form `q`, cross product and 3-form, and the complexified f-basis.
//!
//! Real basis order is `1, j, δ, ε, ℓ, jℓ, δℓ, εℓ` (indices 0..8). Imaginary
//! vectors drop the unit, so `r1..r7 = j, δ, ε, ℓ, jℓ, δℓ, εℓ`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::exact::ExactScalar;
use crate::linalg::{span_rank, ExactMatrix};

pub const SPLIT_NAMES: [&str; 8] = ["1", "j", "δ", "ε", "ℓ", "jℓ", "δℓ", "εℓ"];
pub const QUAT_NAMES: [&str; 8] = ["1", "j", "d", "e", "λ", "jλ", "dλ", "eλ"];

/// Index map from the split-quaternion basis to the quaternion basis.
pub const ISO_INDEX: [usize; 8] = [0, 1, 7, 6, 2, 3, 5, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presentation {
    /// Doubling of the split quaternions (j² = -1, δ² = 1) with ℓ² = 1.
    SplitQuaternion,
    /// Doubling of the Hamilton quaternions with λ² = 1.
    Quaternion,
}

impl Presentation {
    // (a², b², doubling constant)
    fn params(self) -> (i8, i8, i8) {
        match self {
            Presentation::SplitQuaternion => (-1, 1, -1),
            Presentation::Quaternion => (-1, -1, 1),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OctonionError {
    #[error("base point must satisfy q(z) = {expected}, got q(z) = {got}")]
    WrongNorm { expected: i64, got: String },
    #[error("tangent vector is not q-orthogonal to the base point (pairing {0})")]
    NotOrthogonal(String),
}

fn zero_arr<const N: usize>() -> [ExactScalar; N] {
    std::array::from_fn(|_| ExactScalar::zero())
}

// Quaternion-type table on {1, a, b, c}, c = ab: entry (i, j) is (sign, index).
fn quat_table(sa: i8, sb: i8) -> [[(i8, usize); 4]; 4] {
    let sc = -sa * sb;
    let mut t = [[(0i8, 0usize); 4]; 4];
    t[0] = [(1, 0), (1, 1), (1, 2), (1, 3)];
    for k in 1..4 {
        t[k][0] = (1, k);
    }
    t[1][1] = (sa, 0);
    t[2][2] = (sb, 0);
    t[3][3] = (sc, 0);
    t[1][2] = (1, 3);
    t[2][1] = (-1, 3);
    t[1][3] = (sa, 2);
    t[3][1] = (-sa, 2);
    t[2][3] = (-sb, 1);
    t[3][2] = (sb, 1);
    t
}

fn quat_mul(t: &[[(i8, usize); 4]; 4], x: &[ExactScalar], y: &[ExactScalar]) -> [ExactScalar; 4] {
    let mut out = zero_arr::<4>();
    for i in 0..4 {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if y[j].is_zero() {
                continue;
            }
            let (s, k) = t[i][j];
            let p = &x[i] * &y[j];
            if s > 0 {
                out[k] += p;
            } else {
                out[k] -= p;
            }
        }
    }
    out
}

fn quat_conj(x: &[ExactScalar]) -> [ExactScalar; 4] {
    [x[0].clone(), -&x[1], -&x[2], -&x[3]]
}

/// Octonion with 8 coordinates in the basis of its presentation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SplitOctonion(pub [ExactScalar; 8]);

impl SplitOctonion {
    pub fn zero() -> Self {
        Self(zero_arr())
    }

    pub fn basis(k: usize) -> Self {
        let mut z = Self::zero();
        z.0[k] = ExactScalar::one();
        z
    }

    pub fn conj(&self) -> Self {
        let mut z = self.clone();
        for c in z.0.iter_mut().skip(1) {
            *c = -&*c;
        }
        z
    }

    pub fn re(&self) -> &ExactScalar {
        &self.0[0]
    }

    pub fn im(&self) -> ImOctonion {
        ImOctonion(std::array::from_fn(|k| self.0[k + 1].clone()))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|k| &self.0[k] + &o.0[k]))
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self(std::array::from_fn(|k| &self.0[k] * s))
    }

    /// Cayley–Dickson product `(a1,b1)(a2,b2) = (a1a2 + γ b̄2 b1, b2 a1 + b1 ā2)`.
    pub fn mul_in(&self, o: &Self, p: Presentation) -> Self {
        let (sa, sb, gamma) = p.params();
        let t = quat_table(sa, sb);
        let (a1, b1) = self.0.split_at(4);
        let (a2, b2) = o.0.split_at(4);
        let x = quat_mul(&t, a1, a2);
        let y = quat_mul(&t, &quat_conj(b2), b1);
        let u = quat_mul(&t, b2, a1);
        let v = quat_mul(&t, b1, &quat_conj(a2));
        let mut out = zero_arr::<8>();
        for k in 0..4 {
            out[k] = if gamma > 0 { &x[k] + &y[k] } else { &x[k] - &y[k] };
            out[k + 4] = &u[k] + &v[k];
        }
        Self(out)
    }

    /// Product in the split-quaternion presentation.
    pub fn mul(&self, o: &Self) -> Self {
        self.mul_in(o, Presentation::SplitQuaternion)
    }

    /// Product in the quaternion presentation.
    pub fn mul_quat(&self, o: &Self) -> Self {
        self.mul_in(o, Presentation::Quaternion)
    }

    /// Coordinates in the quaternion presentation.
    pub fn to_quaternion_basis(&self) -> Self {
        let mut out = zero_arr::<8>();
        for (k, c) in self.0.iter().enumerate() {
            out[ISO_INDEX[k]] = c.clone();
        }
        Self(out)
    }
}

impl fmt::Debug for SplitOctonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.0, &SPLIT_NAMES))
    }
}

/// 8×8 change-of-basis matrix (columns are images of the split basis).
pub fn basis_iso() -> ExactMatrix {
    ExactMatrix::from_fn(8, 8, |i, j| if ISO_INDEX[j] == i { ExactScalar::one() } else { ExactScalar::zero() })
}

/// Compares `iso(x·y)` with `iso(x)·iso(y)` on all 64 basis pairs and
/// returns the failing pairs.
pub fn iso_intertwining_failures() -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for a in 0..8 {
        for b in 0..8 {
            let x = SplitOctonion::basis(a);
            let y = SplitOctonion::basis(b);
            let lhs = x.mul(&y).to_quaternion_basis();
            let rhs = x.to_quaternion_basis().mul_quat(&y.to_quaternion_basis());
            if lhs != rhs {
                bad.push((a, b));
            }
        }
    }
    bad
}

/// Imaginary octonion in the basis `j, δ, ε, ℓ, jℓ, δℓ, εℓ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ImOctonion(pub [ExactScalar; 7]);

/// Diagonal of q in the real basis.
pub const Q_SIGNS: [i64; 7] = [-1, 1, 1, -1, -1, 1, 1];

impl ImOctonion {
    pub fn zero() -> Self {
        Self(zero_arr())
    }

    /// `r_{k+1}`, i.e. the k-th imaginary basis vector (0-based).
    pub fn basis(k: usize) -> Self {
        let mut z = Self::zero();
        z.0[k] = ExactScalar::one();
        z
    }

    pub fn from_ints(v: [i64; 7]) -> Self {
        Self(std::array::from_fn(|k| ExactScalar::from_int(v[k])))
    }

    pub fn from_vec(v: &[ExactScalar]) -> Self {
        Self(std::array::from_fn(|k| v[k].clone()))
    }

    pub fn to_vec(&self) -> Vec<ExactScalar> {
        self.0.to_vec()
    }

    pub fn to_octonion(&self) -> SplitOctonion {
        SplitOctonion(std::array::from_fn(|k| if k == 0 { ExactScalar::zero() } else { self.0[k - 1].clone() }))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ExactScalar::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|k| &self.0[k] + &o.0[k]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|k| &self.0[k] - &o.0[k]))
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self(std::array::from_fn(|k| &self.0[k] * s))
    }

    pub fn conj_i(&self) -> Self {
        Self(std::array::from_fn(|k| self.0[k].conj_i()))
    }

    /// `⟨z, w⟩ = Re(z·w)`, extended complex-bilinearly.
    pub fn bilinear(&self, o: &Self) -> ExactScalar {
        self.to_octonion().mul(&o.to_octonion()).re().clone()
    }

    pub fn qform(&self) -> ExactScalar {
        self.bilinear(self)
    }

    /// q evaluated through the diagonal signature matrix.
    pub fn qform_diag(&self) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for (k, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                acc += &(c * c) * &ExactScalar::from_int(Q_SIGNS[k]);
            }
        }
        acc
    }

    /// `z × w = Im(z·w)`.
    pub fn cross(&self, o: &Self) -> Self {
        self.to_octonion().mul(&o.to_octonion()).im()
    }

    /// `Ω(z1, z2, z3) = ⟨z1 × z2, z3⟩`.
    pub fn three_form(&self, b: &Self, c: &Self) -> ExactScalar {
        self.cross(b).bilinear(c)
    }
}

impl fmt::Debug for ImOctonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.0, &SPLIT_NAMES[1..]))
    }
}

impl fmt::Display for ImOctonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn render(coeffs: &[ExactScalar], names: &[&str]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| if c.is_one() { n.to_string() } else { format!("({c}){n}") })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Gram matrix of q on `r1..r7`.
pub fn gram() -> ExactMatrix {
    ExactMatrix::from_fn(7, 7, |i, j| ImOctonion::basis(i).bilinear(&ImOctonion::basis(j)))
}

/// Matrix of `w ↦ z × w` in the real basis.
pub fn cross_matrix(z: &ImOctonion) -> ExactMatrix {
    let cols: Vec<Vec<ExactScalar>> = (0..7).map(|k| z.cross(&ImOctonion::basis(k)).to_vec()).collect();
    ExactMatrix::from_columns(&cols)
}

/// Index of `f_k` in 7-vectors: `k + 3`.
pub fn fidx(k: i32) -> usize {
    (k + 3) as usize
}

/// The complex basis `f_{-3}, …, f_3` in real coordinates.
pub fn f_basis() -> [ImOctonion; 7] {
    let h = ExactScalar::inv_sqrt2();
    let ih = &ExactScalar::i() * &h;
    let pair = |re: usize, im: usize, sign: i64| {
        let mut z = ImOctonion::zero();
        z.0[re] = h.clone();
        z.0[im] = &ih * &ExactScalar::from_int(sign);
        z
    };
    [pair(5, 6, 1), pair(3, 4, 1), pair(1, 2, 1), ImOctonion::basis(0), pair(1, 2, -1), pair(3, 4, -1), pair(5, 6, -1)]
}

/// Matrix with columns `f_{-3}..f_3` (real coordinates).
pub fn f_change() -> &'static ExactMatrix {
    static F: OnceLock<ExactMatrix> = OnceLock::new();
    F.get_or_init(|| ExactMatrix::from_columns(&f_basis().iter().map(ImOctonion::to_vec).collect::<Vec<_>>()))
}

pub fn f_change_inv() -> &'static ExactMatrix {
    static FI: OnceLock<ExactMatrix> = OnceLock::new();
    FI.get_or_init(|| f_change().inverse().expect("f-basis is a basis"))
}

/// Coordinates in the f-basis; entry `k + 3` is the `f_k` coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FBasisVector(pub [ExactScalar; 7]);

impl FBasisVector {
    pub fn basis(k: i32) -> Self {
        let mut v = Self(zero_arr());
        v.0[fidx(k)] = ExactScalar::one();
        v
    }

    pub fn from_real(z: &ImOctonion) -> Self {
        let v = f_change_inv().mul_vec(&z.0);
        Self(std::array::from_fn(|k| v[k].clone()))
    }

    pub fn to_real(&self) -> ImOctonion {
        ImOctonion::from_vec(&f_change().mul_vec(&self.0))
    }
}

impl fmt::Debug for FBasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const N: [&str; 7] = ["f-3", "f-2", "f-1", "f0", "f1", "f2", "f3"];
        f.write_str(&render(&self.0, &N))
    }
}

/// Matrix of a real-basis endomorphism in the f-basis.
pub fn to_f_matrix(m: &ExactMatrix) -> ExactMatrix {
    &(f_change_inv() * m) * f_change()
}

pub fn from_f_matrix(m: &ExactMatrix) -> ExactMatrix {
    &(f_change() * m) * f_change_inv()
}

/// Coefficient appearing in the complexified multiplication table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableCoef {
    Zero,
    I,
    MinusI,
    Sqrt2,
    MinusSqrt2,
}

impl TableCoef {
    pub fn value(self) -> ExactScalar {
        match self {
            TableCoef::Zero => ExactScalar::zero(),
            TableCoef::I => ExactScalar::i(),
            TableCoef::MinusI => -ExactScalar::i(),
            TableCoef::Sqrt2 => ExactScalar::sqrt2(),
            TableCoef::MinusSqrt2 => -ExactScalar::sqrt2(),
        }
    }
}

/// Reference table of `f_row × f_col` as (coefficient, k of the target `f_k`).
pub fn reference_f_table() -> [[(TableCoef, i32); 7]; 7] {
    use TableCoef::{MinusI as Mi, MinusSqrt2 as Ms, Sqrt2 as S, Zero as Z, I};
    [
        [(Z, 0), (Z, 0), (Z, 0), (Mi, -3), (Ms, -2), (Ms, -1), (Mi, 0)],
        [(Z, 0), (Z, 0), (Ms, -3), (I, -2), (Z, 0), (Mi, 0), (S, 1)],
        [(Z, 0), (S, -3), (Z, 0), (I, -1), (I, 0), (Z, 0), (S, 2)],
        [(I, -3), (Mi, -2), (Mi, -1), (Z, 0), (I, 1), (I, 2), (Mi, 3)],
        [(S, -2), (Z, 0), (Mi, 0), (Mi, 1), (Z, 0), (S, 3), (Z, 0)],
        [(S, -1), (I, 0), (Z, 0), (Mi, 2), (Ms, 3), (Z, 0), (Z, 0)],
        [(I, 0), (Ms, 1), (Ms, 2), (I, 3), (Z, 0), (Z, 0), (Z, 0)],
    ]
}

#[derive(Debug, Clone)]
pub struct TableEntryCheck {
    pub row: i32,
    pub col: i32,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

/// `f_a × f_b` in f-coordinates.
pub fn f_cross(a: i32, b: i32) -> FBasisVector {
    let fb = f_basis();
    FBasisVector::from_real(&fb[fidx(a)].cross(&fb[fidx(b)]))
}

/// Checks the 42 off-diagonal entries of the reference table, reading it as
/// row × column.
pub fn verify_f_table() -> Vec<TableEntryCheck> {
    let table = reference_f_table();
    let mut out = Vec::with_capacity(42);
    for a in -3..=3 {
        for b in -3..=3 {
            if a == b {
                continue;
            }
            let (coef, target) = table[fidx(a)][fidx(b)];
            let mut expected = FBasisVector(zero_arr());
            if coef != TableCoef::Zero {
                expected.0[fidx(target)] = coef.value();
            }
            let computed = f_cross(a, b);
            out.push(TableEntryCheck {
                row: a,
                col: b,
                expected: format!("{expected:?}"),
                computed: format!("{computed:?}"),
                ok: expected == computed,
            });
        }
    }
    out
}

/// Gram matrix of q in the f-basis.
pub fn f_gram() -> ExactMatrix {
    let f = f_change();
    &(&f.transpose() * &gram()) * f
}

/// Expected antidiagonal `(1, -1, 1, -1, 1, -1, 1)`.
pub fn expected_f_gram() -> ExactMatrix {
    ExactMatrix::from_fn(7, 7, |i, j| if i + j == 6 { ExactScalar::from_int(if i % 2 == 0 { 1 } else { -1 }) } else { ExactScalar::zero() })
}

/// Matrix of `J_{f0} = f0 × ·` in the f-basis.
pub fn j_f0_matrix() -> ExactMatrix {
    to_f_matrix(&cross_matrix(&ImOctonion::basis(0)))
}

pub fn expected_j_f0() -> ExactMatrix {
    let d = [1, -1, -1, 0, 1, 1, -1];
    ExactMatrix::from_fn(7, 7, |i, j| if i == j { &ExactScalar::i() * &ExactScalar::from_int(d[i]) } else { ExactScalar::zero() })
}

/// `((j·δ)·ℓ, j·(δ·ℓ))`.
pub fn nonassociativity_witness() -> (SplitOctonion, SplitOctonion) {
    let (j, d, l) = (SplitOctonion::basis(1), SplitOctonion::basis(2), SplitOctonion::basis(4));
    (j.mul(&d).mul(&l), j.mul(&d.mul(&l)))
}

/// Ω in the determinant convention: coefficients `Ω(r_a, r_b, r_c)` for a < b < c
/// (0-based), nonzero entries only.
pub fn omega_coefficients() -> Vec<([usize; 3], ExactScalar)> {
    let mut out = Vec::new();
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                let v = ImOctonion::basis(a).three_form(&ImOctonion::basis(b), &ImOctonion::basis(c));
                if !v.is_zero() {
                    out.push(([a, b, c], v));
                }
            }
        }
    }
    out
}

/// Exterior form on R⁷ stored as a map from index bitmask to coefficient,
/// in the determinant convention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Form(pub BTreeMap<u8, ExactScalar>);

fn wedge_sign(a: u8, b: u8) -> bool {
    // number of pairs (i in a, j in b) with i > j
    let mut inv = 0u32;
    for i in 0..7 {
        if a & (1 << i) != 0 {
            inv += (b & ((1u8 << i) - 1)).count_ones();
        }
    }
    inv % 2 == 1
}

impl Form {
    pub fn omega() -> Self {
        let mut m = BTreeMap::new();
        for (idx, v) in omega_coefficients() {
            m.insert((1 << idx[0]) | (1 << idx[1]) | (1 << idx[2]), v);
        }
        Self(m)
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut m: BTreeMap<u8, ExactScalar> = BTreeMap::new();
        for (&a, x) in &self.0 {
            for (&b, y) in &o.0 {
                if a & b != 0 {
                    continue;
                }
                let p = x * y;
                let e = m.entry(a | b).or_default();
                if wedge_sign(a, b) {
                    *e -= p;
                } else {
                    *e += p;
                }
            }
        }
        m.retain(|_, v| !v.is_zero());
        Self(m)
    }

    /// Interior product `ι_z`.
    pub fn interior(&self, z: &ImOctonion) -> Self {
        let mut m: BTreeMap<u8, ExactScalar> = BTreeMap::new();
        for (&mask, c) in &self.0 {
            let mut pos = 0;
            for i in 0..7 {
                if mask & (1 << i) == 0 {
                    continue;
                }
                if !z.0[i].is_zero() {
                    let p = c * &z.0[i];
                    let e = m.entry(mask & !(1 << i)).or_default();
                    if pos % 2 == 1 {
                        *e -= p;
                    } else {
                        *e += p;
                    }
                }
                pos += 1;
            }
        }
        m.retain(|_, v| !v.is_zero());
        Self(m)
    }

    pub fn top_coefficient(&self) -> ExactScalar {
        self.0.get(&0x7f).cloned().unwrap_or_default()
    }
}

/// Coefficient of `ι_{z1}Ω ∧ ι_{z2}Ω ∧ Ω` on `r1* ∧ … ∧ r7*`.
pub fn volume_side(z1: &ImOctonion, z2: &ImOctonion) -> ExactScalar {
    let om = Form::omega();
    om.interior(z1).wedge(&om.interior(z2)).wedge(&om).top_coefficient()
}

#[derive(Debug, Clone)]
pub struct VolumeCheck {
    pub pairing: ExactScalar,
    pub wedge: ExactScalar,
    pub holds: bool,
    /// Both sides vanish, so the pair carries no information.
    pub degenerate: bool,
}

/// The global coefficient `vol` fixed from the pair (δ, δ), determinant convention.
pub fn vol_coefficient() -> ExactScalar {
    static V: OnceLock<ExactScalar> = OnceLock::new();
    V.get_or_init(|| {
        let d = ImOctonion::basis(1);
        volume_side(&d, &d).checked_div(&d.qform()).expect("q(δ) = 1")
    })
    .clone()
}

/// `vol` rescaled to the convention where `(e1*∧…∧ek*)(e1,…,ek) = 1/k!`
/// and the wedge carries no binomial factor.
pub fn vol_coefficient_factorial_convention() -> ExactScalar {
    // Function-level wedge differs by (2!2!/4!)(4!3!/7!) = 1/210, coefficient by 7!.
    &vol_coefficient() * &ExactScalar::ratio(5040, 210)
}

pub fn volume_identity_check(z1: &ImOctonion, z2: &ImOctonion) -> VolumeCheck {
    let pairing = z1.bilinear(z2);
    let wedge = volume_side(z1, z2);
    let holds = wedge == &pairing * &vol_coefficient();
    let degenerate = pairing.is_zero() && wedge.is_zero();
    VolumeCheck { pairing, wedge, holds, degenerate }
}

/// `J_z(w) = z × w` for `q(z) = -1` and `w ⟂ z`.
pub fn almost_complex(z: &ImOctonion, w: &ImOctonion) -> Result<ImOctonion, OctonionError> {
    let q = z.qform();
    if q != ExactScalar::from_int(-1) {
        return Err(OctonionError::WrongNorm { expected: -1, got: q.to_string() });
    }
    let p = z.bilinear(w);
    if !p.is_zero() {
        return Err(OctonionError::NotOrthogonal(p.to_string()));
    }
    Ok(z.cross(w))
}

/// Bases of the ±1 eigenspaces of `w ↦ z × w` for `q(z) = +1`.
pub fn para_distributions(z: &ImOctonion) -> Result<(Vec<ImOctonion>, Vec<ImOctonion>), OctonionError> {
    let q = z.qform();
    if !q.is_one() {
        return Err(OctonionError::WrongNorm { expected: 1, got: q.to_string() });
    }
    let c = cross_matrix(z);
    let id = ExactMatrix::identity(7);
    let plus = (&c - &id).nullspace().iter().map(|v| ImOctonion::from_vec(v)).collect();
    let minus = (&c + &id).nullspace().iter().map(|v| ImOctonion::from_vec(v)).collect();
    Ok((plus, minus))
}

/// The three vectors `j-ε, ℓ+δℓ, jℓ+εℓ`.
pub fn d_plus_delta_reference() -> [ImOctonion; 3] {
    [
        ImOctonion::from_ints([1, 0, -1, 0, 0, 0, 0]),
        ImOctonion::from_ints([0, 0, 0, 1, 0, 1, 0]),
        ImOctonion::from_ints([0, 0, 0, 0, 1, 0, 1]),
    ]
}

/// True if two families span the same subspace.
pub fn same_span(a: &[ImOctonion], b: &[ImOctonion]) -> bool {
    let av: Vec<_> = a.iter().map(ImOctonion::to_vec).collect();
    let bv: Vec<_> = b.iter().map(ImOctonion::to_vec).collect();
    let mut all = av.clone();
    all.extend(bv.iter().cloned());
    let r = span_rank(&av);
    r == span_rank(&bv) && r == span_rank(&all)
}
