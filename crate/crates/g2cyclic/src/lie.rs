//! g2' as the derivation algebra of the cross product, its Cartan
//! decomposition and stabilizers, and the root data and Z/6 grading of the
//! complexification in the f-basis.
//!
//! Matrices act on column vectors. In the f-basis the entry `(k, l)` (indices
//! `k + 3`, `l + 3`) is the coefficient of `f_k` in the image of `f_l`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::{random_rational, ExactScalar};
use crate::linalg::{Basis, ExactMatrix};
use crate::octonion::{cross_matrix, f_change, f_change_inv, fidx, gram, ImOctonion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Real,
    FBasis,
}

/// Endomorphism of `Im(O') ⊗ C` together with the basis it is written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    pub matrix: ExactMatrix,
    pub frame: Frame,
}

impl LieElement {
    pub fn real(matrix: ExactMatrix) -> Self {
        Self { matrix, frame: Frame::Real }
    }

    pub fn fbasis(matrix: ExactMatrix) -> Self {
        Self { matrix, frame: Frame::FBasis }
    }

    pub fn to_real(&self) -> Self {
        match self.frame {
            Frame::Real => self.clone(),
            Frame::FBasis => Self::real(&(f_change() * &self.matrix) * f_change_inv()),
        }
    }

    pub fn to_fbasis(&self) -> Self {
        match self.frame {
            Frame::FBasis => self.clone(),
            Frame::Real => Self::fbasis(&(f_change_inv() * &self.matrix) * f_change()),
        }
    }

    pub fn bracket(&self, o: &Self) -> Self {
        let o = if o.frame == self.frame { o.clone() } else { o.to_frame(self.frame) };
        Self { matrix: self.matrix.bracket(&o.matrix), frame: self.frame }
    }

    fn to_frame(&self, f: Frame) -> Self {
        match f {
            Frame::Real => self.to_real(),
            Frame::FBasis => self.to_fbasis(),
        }
    }

    pub fn is_derivation(&self) -> bool {
        is_derivation(&self.to_real().matrix)
    }

    pub fn is_q_skew(&self) -> bool {
        is_q_skew(&self.to_real().matrix)
    }
}

fn flat(m: &ExactMatrix) -> Vec<ExactScalar> {
    m.entries().to_vec()
}

fn unflat(v: &[ExactScalar]) -> ExactMatrix {
    ExactMatrix::from_fn(7, 7, |i, j| v[7 * i + j].clone())
}

/// Derivation defect `X(a×b) - X(a)×b - a×X(b)` on all 21 basis pairs.
pub fn is_derivation(x: &ExactMatrix) -> bool {
    for a in 0..7 {
        for b in a + 1..7 {
            let ea = ImOctonion::basis(a);
            let eb = ImOctonion::basis(b);
            let lhs = x.mul_vec(&ea.cross(&eb).0);
            let xa = ImOctonion::from_vec(&x.column(a));
            let xb = ImOctonion::from_vec(&x.column(b));
            let rhs = xa.cross(&eb).add(&ea.cross(&xb));
            if lhs != rhs.to_vec() {
                return false;
            }
        }
    }
    true
}

/// `Xᵀ G + G X = 0` with G the Gram matrix of q.
pub fn is_q_skew(x: &ExactMatrix) -> bool {
    let g = gram();
    (&(&x.transpose() * &g) + &(&g * x)).is_zero()
}

fn cross_tensor() -> &'static Vec<ExactMatrix> {
    static C: OnceLock<Vec<ExactMatrix>> = OnceLock::new();
    C.get_or_init(|| (0..7).map(|k| cross_matrix(&ImOctonion::basis(k))).collect())
}

/// Kernel of `X ↦ (X(rᵢ×rⱼ) − X(rᵢ)×rⱼ − rᵢ×X(rⱼ))_{i<j}` on 7×7 matrices:
/// a 147×49 rational system.
fn derivation_system() -> ExactMatrix {
    let cm = cross_tensor();
    let mut rows: Vec<Vec<ExactScalar>> = Vec::with_capacity(147);
    for a in 0..7 {
        for b in a + 1..7 {
            let ab = ImOctonion::basis(a).cross(&ImOctonion::basis(b));
            for out in 0..7 {
                // Coefficient of X_{pq} in component `out`.
                let mut row = vec![ExactScalar::zero(); 49];
                // X(a×b)_out = sum_q X_{out,q} (a×b)_q
                for q in 0..7 {
                    if !ab.0[q].is_zero() {
                        row[7 * out + q] += &ab.0[q];
                    }
                }
                // (X(a)×b)_out = sum_p (r_p × r_b)_out X_{p,a}; X(a) = col a.
                for p in 0..7 {
                    let c = &cm[b][(out, p)]; // (b × r_p)_out = -(r_p × b)_out
                    if !c.is_zero() {
                        row[7 * p + a] += c;
                    }
                    let c2 = &cm[a][(out, p)]; // (a × r_p)_out
                    if !c2.is_zero() {
                        row[7 * p + b] -= c2;
                    }
                }
                rows.push(row);
            }
        }
    }
    ExactMatrix::from_rows(&rows)
}

/// Canonical g2' basis (real frame): the reduced echelon basis of the kernel.
pub fn derivation_algebra() -> &'static Vec<ExactMatrix> {
    static D: OnceLock<Vec<ExactMatrix>> = OnceLock::new();
    D.get_or_init(|| {
        let ns = derivation_system().nullspace();
        Basis::spanned_by(&ns).vectors().iter().map(|v| unflat(v)).collect()
    })
}

fn g2_real_basis() -> &'static Basis {
    static B: OnceLock<Basis> = OnceLock::new();
    B.get_or_init(|| Basis::new(derivation_algebra().iter().map(flat).collect()))
}

/// Dimension of the q-skew matrices, i.e. so(4,3).
pub fn so43_dimension() -> usize {
    let g = gram();
    let mut rows = Vec::new();
    for i in 0..7 {
        for j in 0..7 {
            // (XᵀG + GX)_{ij} = X_{ji} G_{jj} + G_{ii} X_{ij}
            let mut row = vec![ExactScalar::zero(); 49];
            row[7 * j + i] += &g[(j, j)];
            row[7 * i + j] += &g[(i, i)];
            rows.push(row);
        }
    }
    ExactMatrix::from_rows(&rows).nullspace().len()
}

/// Coordinates of a real-frame matrix in the canonical g2' basis.
pub fn g2_coords(x: &ExactMatrix) -> Option<Vec<ExactScalar>> {
    g2_real_basis().coords(&flat(x))
}

/// True if all brackets of basis elements stay in the span.
pub fn closure_check() -> bool {
    let d = derivation_algebra();
    d.iter().enumerate().all(|(i, x)| d.iter().skip(i + 1).all(|y| g2_coords(&x.bracket(y)).is_some()))
}

/// Structure constants `[X_a, X_b] = Σ c[a][b][k] X_k` of the canonical basis.
pub fn structure_constants() -> &'static Vec<Vec<Vec<ExactScalar>>> {
    static S: OnceLock<Vec<Vec<Vec<ExactScalar>>>> = OnceLock::new();
    S.get_or_init(|| {
        let d = derivation_algebra();
        let n = d.len();
        let mut out = vec![vec![vec![ExactScalar::zero(); n]; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let c = g2_coords(&d[a].bracket(&d[b])).expect("closed under bracket");
                out[b][a] = c.iter().map(|x| -x).collect();
                out[a][b] = c;
            }
        }
        out
    })
}

/// Jacobi identity on all triples, evaluated on structure constants.
pub fn jacobi_check() -> bool {
    let c = structure_constants();
    let n = c.len();
    let br = |u: &[ExactScalar], v: &[ExactScalar]| -> Vec<ExactScalar> {
        let mut out = vec![ExactScalar::zero(); n];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let s = ua * vb;
                for (k, ck) in c[a][b].iter().enumerate() {
                    if !ck.is_zero() {
                        out[k] += &s * ck;
                    }
                }
            }
        }
        out
    };
    let e = |i: usize| {
        let mut v = vec![ExactScalar::zero(); n];
        v[i] = ExactScalar::one();
        v
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t1 = br(&e(i), &br(&e(j), &e(k)));
                let t2 = br(&e(j), &br(&e(k), &e(i)));
                let t3 = br(&e(k), &br(&e(i), &e(j)));
                if t1.iter().zip(&t2).zip(&t3).any(|((a, b), c)| !(&(a + b) + c).is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

fn ad_matrix(a: usize) -> ExactMatrix {
    let c = structure_constants();
    let n = c.len();
    // column b of ad(X_a) holds the coordinates of [X_a, X_b]
    ExactMatrix::from_fn(n, n, |k, b| c[a][b][k].clone())
}

/// Killing form `tr(ad X ad Y)` on the canonical basis.
pub fn killing_form() -> ExactMatrix {
    let n = derivation_algebra().len();
    let ads: Vec<ExactMatrix> = (0..n).map(ad_matrix).collect();
    let mut k = ExactMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let t = (&ads[a] * &ads[b]).trace();
            k[(b, a)] = t.clone();
            k[(a, b)] = t;
        }
    }
    k
}

/// Reflection fixing `Im(H) = span(j, ℓ, jℓ)` and negating `H = span(δ, ε, δℓ, εℓ)`
/// (the quaternion-presentation splitting).
pub fn splitting_reflection() -> ExactMatrix {
    let d = [1, -1, -1, 1, 1, -1, -1];
    ExactMatrix::from_fn(7, 7, |i, j| if i == j { ExactScalar::from_int(d[i]) } else { ExactScalar::zero() })
}

#[derive(Debug, Clone)]
pub struct CartanDecomposition {
    pub k: Vec<ExactMatrix>,
    pub p: Vec<ExactMatrix>,
    pub relations_hold: bool,
    pub killing_k_signature: (usize, usize, usize),
    pub killing_p_signature: (usize, usize, usize),
}

fn killing_on(vs: &[ExactMatrix]) -> ExactMatrix {
    let coords: Vec<Vec<ExactScalar>> = vs.iter().map(|v| g2_coords(v).expect("in g2'")).collect();
    let k = killing_form();
    ExactMatrix::from_fn(vs.len(), vs.len(), |i, j| {
        let kv = k.mul_vec(&coords[j]);
        let mut acc = ExactScalar::zero();
        for (a, b) in coords[i].iter().zip(&kv) {
            acc += a * b;
        }
        acc
    })
}

/// `k` preserves the splitting `Im(H) ⊕ H`, `p` exchanges its summands.
pub fn cartan_decomposition() -> CartanDecomposition {
    let p_ref = splitting_reflection();
    let half = ExactScalar::ratio(1, 2);
    let mut kv = Vec::new();
    let mut pv = Vec::new();
    for x in derivation_algebra() {
        let c = &(&p_ref * x) * &p_ref;
        kv.push(flat(&(x + &c).scale(&half)));
        pv.push(flat(&(x - &c).scale(&half)));
    }
    let kb = Basis::spanned_by(&kv);
    let pb = Basis::spanned_by(&pv);
    let k: Vec<ExactMatrix> = kb.vectors().iter().map(|v| unflat(v)).collect();
    let p: Vec<ExactMatrix> = pb.vectors().iter().map(|v| unflat(v)).collect();
    let in_k = |m: ExactMatrix| kb.contains(&flat(&m));
    let in_p = |m: ExactMatrix| pb.contains(&flat(&m));
    let mut ok = true;
    for a in &k {
        ok &= k.iter().all(|b| in_k(a.bracket(b)));
        ok &= p.iter().all(|b| in_p(a.bracket(b)));
    }
    for a in &p {
        ok &= p.iter().all(|b| in_k(a.bracket(b)));
    }
    let ks = killing_on(&k).real_signature().expect("real symmetric");
    let ps = killing_on(&p).real_signature().expect("real symmetric");
    CartanDecomposition { k, p, relations_hold: ok, killing_k_signature: ks, killing_p_signature: ps }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("stabilizer of the zero vector requested")]
    ZeroVector,
}

/// Basis (as coefficient vectors in the canonical g2' basis) of `{X : X v = 0}`.
pub fn stabilizer_subalgebra(v: &ImOctonion) -> Result<Vec<ExactMatrix>, LieError> {
    if v.is_zero() {
        return Err(LieError::ZeroVector);
    }
    let d = derivation_algebra();
    let cols: Vec<Vec<ExactScalar>> = d.iter().map(|x| x.mul_vec(&v.0)).collect();
    Ok(combine_kernel(&ExactMatrix::from_columns(&cols)))
}

fn combine_kernel(system: &ExactMatrix) -> Vec<ExactMatrix> {
    let d = derivation_algebra();
    system
        .nullspace()
        .iter()
        .map(|c| {
            let mut m = ExactMatrix::zeros(7, 7);
            for (ci, x) in c.iter().zip(d) {
                if !ci.is_zero() {
                    m = &m + &x.scale(ci);
                }
            }
            m
        })
        .collect()
}

/// Elements preserving `Im(H') ⊕ H'` = `span(j,δ,ε) ⊕ span(ℓ,jℓ,δℓ,εℓ)`.
pub fn splitting_stabilizer() -> Vec<ExactMatrix> {
    let d = derivation_algebra();
    let mut rows = Vec::new();
    for i in 0..7 {
        for j in 0..7 {
            if (i < 3) != (j < 3) {
                rows.push(d.iter().map(|x| x[(i, j)].clone()).collect::<Vec<_>>());
            }
        }
    }
    combine_kernel(&ExactMatrix::from_rows(&rows))
}

/// A root `n α1 + m α2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Root {
    pub n: i32,
    pub m: i32,
}

impl Root {
    pub const fn new(n: i32, m: i32) -> Self {
        Self { n, m }
    }

    pub fn height(self) -> i32 {
        self.n + self.m
    }

    pub fn is_positive(self) -> bool {
        self.n >= 0 && self.m >= 0 && (self.n, self.m) != (0, 0)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.n, -self.m)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.n + o.n, self.m + o.m)
    }

    /// Z/6 grade `-height mod 6`, represented in `-2..=3`.
    pub fn grade(self) -> i32 {
        signed_grade(-self.height())
    }

    /// From the torus weight `p a1 + r a3`, where α1 = -a1 and α2 = 2a1 - a3.
    fn from_weight(p: i32, r: i32) -> Self {
        Self::new(-2 * r - p, -r)
    }

    pub fn label(self) -> String {
        let part = |c: i32, s: &str| match c {
            0 => String::new(),
            1 => s.to_string(),
            -1 => format!("-{s}"),
            c => format!("{c}{s}"),
        };
        match (self.n, self.m) {
            (0, 0) => "0".into(),
            (n, 0) => part(n, "α1"),
            (0, m) => part(m, "α2"),
            (n, m) if n > 0 => format!("{}+{}", part(n, "α1"), part(m, "α2")),
            (n, m) => format!("-({}+{})", part(-n, "α1"), part(-m, "α2")),
        }
    }
}

pub fn signed_grade(k: i32) -> i32 {
    let r = k.rem_euclid(6);
    if r > 3 {
        r - 6
    } else {
        r
    }
}

pub const ETA: Root = Root::new(3, 2);

/// Torus weights `a_k` as `(p, r)` with `a_k = p a1 + r a3`, `k = -3..3`.
pub const TORUS_WEIGHTS: [(i32, i32); 7] = [(0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (0, 1)];

/// Root of the f-basis matrix entry `(k, l)`, if that entry has nonzero weight.
pub fn entry_root(k: i32, l: i32) -> Option<Root> {
    let (pk, rk) = TORUS_WEIGHTS[fidx(k)];
    let (pl, rl) = TORUS_WEIGHTS[fidx(l)];
    let (p, r) = (pk - pl, rk - rl);
    ((p, r) != (0, 0)).then(|| Root::from_weight(p, r))
}

/// Root data of the complexification in the f-basis.
#[derive(Debug, Clone)]
pub struct GradedDecomposition {
    /// Basis of the diagonal Cartan subalgebra.
    pub torus: Vec<ExactMatrix>,
    /// Root vectors, sorted by root.
    pub roots: BTreeMap<Root, ExactMatrix>,
    /// Slot-normalized generators of g1: `(E_{-α1}, E_{-α2}, E_η)`.
    pub g1_slots: [ExactMatrix; 3],
    /// `E_η` (from the bracket chain) divided by the slot-normalized `E_η`.
    pub eta_ratio: ExactScalar,
    /// Diagonal grading element `diag(-3, …, 3)`.
    pub grading_element: ExactMatrix,
    pub simple_roots: Vec<Root>,
}

impl GradedDecomposition {
    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots.keys().copied().filter(|r| r.is_positive()).collect()
    }

    /// Basis of the grade-`k` bucket.
    pub fn bucket(&self, k: i32) -> Vec<ExactMatrix> {
        if signed_grade(k) == 0 {
            return self.torus.clone();
        }
        self.roots.iter().filter(|(r, _)| r.grade() == signed_grade(k)).map(|(_, m)| m.clone()).collect()
    }

    /// Torus basis followed by root vectors in root order.
    pub fn full_basis(&self) -> Vec<ExactMatrix> {
        let mut v = self.torus.clone();
        v.extend(self.roots.values().cloned());
        v
    }

    pub fn root_of(&self, i: usize) -> Root {
        if i < self.torus.len() {
            Root::new(0, 0)
        } else {
            *self.roots.keys().nth(i - self.torus.len()).expect("index in range")
        }
    }
}

/// g2' basis transported to the f-basis.
pub fn g2_fbasis() -> &'static Vec<ExactMatrix> {
    static G: OnceLock<Vec<ExactMatrix>> = OnceLock::new();
    G.get_or_init(|| derivation_algebra().iter().map(|x| &(f_change_inv() * x) * f_change()).collect())
}

fn g2c_basis() -> &'static Basis {
    static B: OnceLock<Basis> = OnceLock::new();
    B.get_or_init(|| Basis::new(g2_fbasis().iter().map(flat).collect()))
}

/// True if an f-basis matrix lies in the complexified g2.
pub fn in_g2c(m: &ExactMatrix) -> bool {
    g2c_basis().contains(&flat(m))
}

/// Elements of the complexification supported on the given f-basis entries.
fn supported_on(allowed: &[(usize, usize)]) -> Vec<ExactMatrix> {
    let g = g2_fbasis();
    let mut rows = Vec::new();
    for i in 0..7 {
        for j in 0..7 {
            if !allowed.contains(&(i, j)) {
                rows.push(g.iter().map(|x| x[(i, j)].clone()).collect::<Vec<_>>());
            }
        }
    }
    let ns = ExactMatrix::from_rows(&rows).nullspace();
    ns.iter()
        .map(|c| {
            let mut m = ExactMatrix::zeros(7, 7);
            for (ci, x) in c.iter().zip(g) {
                if !ci.is_zero() {
                    m = &m + &x.scale(ci);
                }
            }
            m
        })
        .collect()
}

fn normalize_at(m: &ExactMatrix, k: i32, l: i32) -> ExactMatrix {
    let e = &m[(fidx(k), fidx(l))];
    m.scale(&e.inv().expect("normalizing entry is nonzero"))
}

/// Antilinear involution `θ(X)_{k,l} = (-1)^{k+l} conj(X_{-k,-l})`.
pub fn theta(x: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::from_fn(7, 7, |i, j| {
        let v = x[(6 - i, 6 - j)].conj_i();
        if (i + j) % 2 == 1 {
            -v
        } else {
            v
        }
    })
}

/// `σ(X) = P X P` with `P = diag((-1)^k)`; acts as `(-1)^k` on `g_k`.
pub fn sigma(x: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::from_fn(7, 7, |i, j| if (i + j) % 2 == 1 { -&x[(i, j)] } else { x[(i, j)].clone() })
}

/// `λ = σ θ`, entrywise `conj(X_{-k,-l})`.
pub fn lambda(x: &ExactMatrix) -> ExactMatrix {
    sigma(&theta(x))
}

/// Builds the root decomposition. Panics if the computed torus or root
/// spaces do not have the expected shape.
pub fn graded_decomposition() -> &'static GradedDecomposition {
    static G: OnceLock<GradedDecomposition> = OnceLock::new();
    G.get_or_init(build_graded)
}

fn build_graded() -> GradedDecomposition {
    let diag: Vec<(usize, usize)> = (0..7).map(|i| (i, i)).collect();
    let torus = supported_on(&diag);
    assert_eq!(torus.len(), 2, "Cartan subalgebra must be 2-dimensional");
    for t in &torus {
        // a_k in terms of a1 = t(f1), a3 = t(f3)
        let a1 = &t[(fidx(1), fidx(1))];
        let a3 = &t[(fidx(3), fidx(3))];
        for k in -3..=3 {
            let (p, r) = TORUS_WEIGHTS[fidx(k)];
            let expect = &(a1 * &ExactScalar::from_int(p as i64)) + &(a3 * &ExactScalar::from_int(r as i64));
            assert_eq!(t[(fidx(k), fidx(k))], expect, "torus weight table");
        }
    }

    let mut by_root: BTreeMap<Root, Vec<(usize, usize)>> = BTreeMap::new();
    for k in -3..=3 {
        for l in -3..=3 {
            if let Some(r) = entry_root(k, l) {
                by_root.entry(r).or_default().push((fidx(k), fidx(l)));
            }
        }
    }
    let mut raw: BTreeMap<Root, ExactMatrix> = BTreeMap::new();
    for (r, pos) in &by_root {
        let sp = supported_on(pos);
        if sp.len() == 1 {
            raw.insert(*r, sp.into_iter().next().expect("one vector"));
        } else {
            assert!(sp.is_empty(), "root space of {r:?} has dimension {}", sp.len());
        }
    }
    assert_eq!(raw.len(), 12, "expected 12 roots");

    let a1 = Root::new(1, 0);
    let a2 = Root::new(0, 1);
    let e_ma1 = normalize_at(&raw[&a1.neg()], 0, -1);
    let e_ma2 = normalize_at(&raw[&a2.neg()], -1, -2);
    let e_eta_slot = normalize_at(&raw[&ETA], -3, 2);

    let mut roots: BTreeMap<Root, ExactMatrix> = BTreeMap::new();
    roots.insert(Root::new(-1, 0), e_ma1.clone());
    roots.insert(Root::new(0, -1), e_ma2.clone());
    let e11 = e_ma1.bracket(&e_ma2);
    let e21 = e_ma1.bracket(&e11);
    let e31 = e_ma1.bracket(&e21);
    let e32 = e_ma2.bracket(&e31);
    roots.insert(Root::new(-1, -1), e11);
    roots.insert(Root::new(-2, -1), e21);
    roots.insert(Root::new(-3, -1), e31);
    roots.insert(Root::new(-3, -2), e32);
    let negs: Vec<(Root, ExactMatrix)> = roots.iter().map(|(r, m)| (*r, m.clone())).collect();
    for (r, m) in negs {
        roots.insert(r.neg(), -&theta(&m));
    }
    for (r, m) in &roots {
        let expect = &raw[r];
        assert!(
            Basis::new(vec![flat(expect)]).contains(&flat(m)) && !m.is_zero(),
            "root vector for {r:?} left its root space"
        );
    }
    let eta_ratio = &roots[&ETA][(fidx(-3), fidx(2))] / &e_eta_slot[(fidx(-3), fidx(2))];

    let grading_element =
        ExactMatrix::from_fn(7, 7, |i, j| if i == j { ExactScalar::from_int(i as i64 - 3) } else { ExactScalar::zero() });

    let pos: Vec<Root> = roots.keys().copied().filter(|r| r.is_positive()).collect();
    let simple_roots = pos
        .iter()
        .copied()
        .filter(|r| !pos.iter().any(|a| pos.iter().any(|b| a.add(*b) == *r)))
        .collect();

    GradedDecomposition { torus, roots, g1_slots: [e_ma1, e_ma2, e_eta_slot], eta_ratio, grading_element, simple_roots }
}

/// `ad(H) X = μ X` check; returns μ if X is an eigenvector.
pub fn ad_eigenvalue(h: &ExactMatrix, x: &ExactMatrix) -> Option<ExactScalar> {
    let y = h.bracket(x);
    let idx = x.entries().iter().position(|e| !e.is_zero())?;
    let mu = &y.entries()[idx] / &x.entries()[idx];
    (y == x.scale(&mu)).then_some(mu)
}

/// Realization of `(a, b, c) ∈ g_{-α1} ⊕ g_{-α2} ⊕ g_η` in the f-basis.
///
/// `a` sits at `f_{-1}→f_0` and `f_0→f_1`, `-(i/√2) a` at `f_{-3}→f_{-2}` and
/// `f_2→f_3`; `b` at `f_{-2}→f_{-1}` and `f_1→f_2`; `c` at `f_2→f_{-3}` and
/// `f_3→f_{-2}`.
pub fn g1_realize(a: &ExactScalar, b: &ExactScalar, c: &ExactScalar) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(7, 7);
    let ca = &(-&ExactScalar::i() * ExactScalar::inv_sqrt2()) * a;
    m[(fidx(0), fidx(-1))] = a.clone();
    m[(fidx(1), fidx(0))] = a.clone();
    m[(fidx(-2), fidx(-3))] = ca.clone();
    m[(fidx(3), fidx(2))] = ca;
    m[(fidx(-1), fidx(-2))] = b.clone();
    m[(fidx(2), fidx(1))] = b.clone();
    m[(fidx(-3), fidx(2))] = c.clone();
    m[(fidx(-2), fidx(3))] = c.clone();
    m
}

/// Floating-point version of [`g1_realize`].
pub fn g1_realize_complex(a: Complex64, b: Complex64, c: Complex64) -> [[Complex64; 7]; 7] {
    let mut m = [[Complex64::new(0.0, 0.0); 7]; 7];
    let ca = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2) * a;
    m[fidx(0)][fidx(-1)] = a;
    m[fidx(1)][fidx(0)] = a;
    m[fidx(-2)][fidx(-3)] = ca;
    m[fidx(3)][fidx(2)] = ca;
    m[fidx(-1)][fidx(-2)] = b;
    m[fidx(2)][fidx(1)] = b;
    m[fidx(-3)][fidx(2)] = c;
    m[fidx(-2)][fidx(3)] = c;
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicSymmetryReport {
    /// `g⁻¹ Φ g = -Φ` for `g = diag((-1)^k)`, exact.
    pub minus_one_exact: bool,
    /// Worst entry error of `g⁻¹ Φ g - ζ Φ` for the primitive 6th root.
    pub primitive_root_error: f64,
}

/// Conjugation by `g = diag(ζ^{-k})` on a g1 element with generic slots.
pub fn cyclic_symmetry_check(a: &ExactScalar, b: &ExactScalar, c: &ExactScalar) -> CyclicSymmetryReport {
    let phi = g1_realize(a, b, c);
    let minus_one_exact = sigma(&phi) == -&phi;
    let zeta = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let pc = phi.to_complex();
    let mut err: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let (k, l) = (i as i32 - 3, j as i32 - 3);
            let conj = zeta.powi(k - l) * pc[(i, j)];
            err = err.max((conj - zeta * pc[(i, j)]).norm());
        }
    }
    CyclicSymmetryReport { minus_one_exact, primitive_root_error: err }
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityEntry {
    pub acting: String,
    pub source: String,
    pub target: String,
    /// Structure constant κ in `[E_act, E_src] = κ E_tgt`.
    pub constant: String,
    pub nonzero: bool,
    /// Random rational multiples of the acting vector tried.
    pub random_trials: usize,
    pub random_all_nonzero: bool,
}

/// Injectivity of the bracket maps used in the rigidity argument.
pub fn rigidity_bracket_checks(seed: u64) -> Vec<RigidityEntry> {
    let g = graded_decomposition();
    let r = |n, m| Root::new(n, m);
    let cases = [
        (r(-1, 0), r(1, 1), r(0, 1)),
        (r(-1, 0), r(2, 1), r(1, 1)),
        (r(-1, 0), r(3, 1), r(2, 1)),
        (r(-1, 0), r(0, -1), r(-1, -1)),
        (r(0, -1), ETA, r(3, 1)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cases
        .iter()
        .map(|&(act, src, tgt)| {
            let ea = &g.roots[&act];
            let es = &g.roots[&src];
            let et = &g.roots[&tgt];
            let br = ea.bracket(es);
            let coef = Basis::new(vec![flat(et)]).coords(&flat(&br)).map(|c| c[0].clone());
            let constant = coef.clone().unwrap_or_default();
            let mut all = true;
            let trials = 100;
            for _ in 0..trials {
                let mut s = random_rational(&mut rng, 9);
                if s.is_zero() {
                    s = ExactScalar::one();
                }
                all &= !ea.scale(&s).bracket(es).is_zero();
            }
            RigidityEntry {
                acting: act.label(),
                source: src.label(),
                target: tgt.label(),
                constant: constant.to_string(),
                nonzero: coef.is_some() && !constant.is_zero(),
                random_trials: trials,
                random_all_nonzero: all,
            }
        })
        .collect()
}

/// `[g_γ, g_δ] ⊆ g_{γ+δ}` (zero off `Δ ∪ {0}`) for all basis pairs.
pub fn root_bracket_rule_check() -> bool {
    let g = graded_decomposition();
    let basis = g.full_basis();
    let tb = Basis::new(g.torus.iter().map(flat).collect());
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let s = g.root_of(i).add(g.root_of(j));
            let br = basis[i].bracket(&basis[j]);
            let ok = if s == Root::new(0, 0) {
                tb.contains(&flat(&br))
            } else if let Some(m) = g.roots.get(&s) {
                Basis::new(vec![flat(m)]).contains(&flat(&br))
            } else {
                br.is_zero()
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// `[g_i, g_j] ⊆ g_{i+j}` for all grade pairs.
pub fn grading_containment_check() -> bool {
    let g = graded_decomposition();
    let buckets: BTreeMap<i32, Vec<ExactMatrix>> = (-2..=3).map(|k| (k, g.bucket(k))).collect();
    let spans: BTreeMap<i32, Basis> = buckets.iter().map(|(k, v)| (*k, Basis::new(v.iter().map(flat).collect()))).collect();
    for (i, bi) in &buckets {
        for (j, bj) in &buckets {
            let tgt = &spans[&signed_grade(i + j)];
            for x in bi {
                for y in bj {
                    if !tgt.contains(&flat(&x.bracket(y))) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct InvolutionReport {
    pub sigma_squared_identity: bool,
    pub sigma_automorphism: bool,
    pub sigma_grading_sign: bool,
    pub theta_squared_identity: bool,
    pub theta_automorphism: bool,
    pub theta_swaps_grades: bool,
    pub theta_sigma_commute: bool,
    pub fix_lambda_real_dim: usize,
    pub fix_lambda_is_real_g2: bool,
    pub fix_lambda_killing_signature: (usize, usize, usize),
}

/// Real-linear fixed space of λ, as f-basis matrices.
pub fn fix_lambda() -> Vec<ExactMatrix> {
    let g = graded_decomposition();
    let basis = g.full_basis();
    let n = basis.len();
    let coord = Basis::new(basis.iter().map(flat).collect());
    // λ(B_a) = Σ_b L[b][a] B_b, and λ(Σ c_a B_a) = Σ conj(c_a) λ(B_a).
    let l: Vec<Vec<ExactScalar>> = basis.iter().map(|b| coord.coords(&flat(&lambda(b))).expect("λ preserves g2")).collect();
    // Unknowns (x_a, y_a) with c_a = x_a + i y_a; condition L conj(c) - c = 0.
    let mut sys = ExactMatrix::zeros(2 * n, 2 * n);
    for b in 0..n {
        for a in 0..n {
            let lba = &l[a][b];
            let (re, im) = (lba.re_part(), lba.im_part());
            // L conj(c): (re + i im)(x - i y) = re x + im y + i (im x - re y)
            sys[(b, a)] += &re;
            sys[(b, n + a)] += &im;
            sys[(n + b, a)] += &im;
            sys[(n + b, n + a)] -= &re;
        }
        sys[(b, b)] -= &ExactScalar::one();
        sys[(n + b, n + b)] -= &ExactScalar::one();
    }
    sys.nullspace()
        .iter()
        .map(|v| {
            let mut m = ExactMatrix::zeros(7, 7);
            for a in 0..n {
                let c = &v[a] + &(&ExactScalar::i() * &v[n + a]);
                if !c.is_zero() {
                    m = &m + &basis[a].scale(&c);
                }
            }
            m
        })
        .collect()
}

pub fn involutions() -> InvolutionReport {
    let g = graded_decomposition();
    let basis = g.full_basis();
    let mut s2 = true;
    let mut s_aut = true;
    let mut t2 = true;
    let mut t_aut = true;
    let mut commute = true;
    for x in &basis {
        s2 &= sigma(&sigma(x)) == *x;
        t2 &= theta(&theta(x)) == *x;
        commute &= theta(&sigma(x)) == sigma(&theta(x));
        for y in &basis {
            let br = x.bracket(y);
            s_aut &= sigma(&br) == sigma(x).bracket(&sigma(y));
            t_aut &= theta(&br) == theta(x).bracket(&theta(y));
        }
    }
    let mut grade_sign = true;
    let mut swaps = true;
    for k in -2..=3 {
        let neg_span = Basis::new(g.bucket(-k).iter().map(flat).collect());
        for x in g.bucket(k) {
            let s = if k % 2 == 0 { x.clone() } else { -&x };
            grade_sign &= sigma(&x) == s;
            swaps &= neg_span.contains(&flat(&theta(&x)));
        }
    }

    let fix = fix_lambda();
    let real: Vec<ExactMatrix> = fix.iter().map(|m| LieElement::fbasis(m.clone()).to_real().matrix).collect();
    let all_real = real.iter().all(|m| m.entries().iter().all(ExactScalar::is_real));
    let same = {
        let b = Basis::spanned_by(&real.iter().map(flat).collect::<Vec<_>>());
        b.dim() == 14 && derivation_algebra().iter().all(|d| b.contains(&flat(d)))
    };
    let sig = if all_real && same { killing_on(&real).real_signature().unwrap_or((0, 0, 0)) } else { (0, 0, 0) };
    InvolutionReport {
        sigma_squared_identity: s2,
        sigma_automorphism: s_aut,
        sigma_grading_sign: grade_sign,
        theta_squared_identity: t2,
        theta_automorphism: t_aut,
        theta_swaps_grades: swaps,
        theta_sigma_commute: commute,
        fix_lambda_real_dim: fix.len(),
        fix_lambda_is_real_g2: all_real && same && real.iter().all(|m| is_derivation(m)),
        fix_lambda_killing_signature: sig,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(derivation_algebra().len(), 14);
        assert_eq!(so43_dimension(), 21);
        assert!(derivation_algebra().iter().all(is_q_skew));
        assert!(closure_check());
    }

    #[test]
    fn stabilizers() {
        assert_eq!(stabilizer_subalgebra(&ImOctonion::basis(0)).unwrap().len(), 8);
        assert_eq!(stabilizer_subalgebra(&ImOctonion::basis(1)).unwrap().len(), 8);
        assert_eq!(splitting_stabilizer().len(), 6);
        assert_eq!(stabilizer_subalgebra(&ImOctonion::zero()), Err(LieError::ZeroVector));
    }

    #[test]
    fn killing_and_cartan() {
        assert_eq!(killing_form().real_signature(), Some((8, 6, 0)));
        let c = cartan_decomposition();
        assert_eq!((c.k.len(), c.p.len()), (6, 8));
        assert!(c.relations_hold);
        assert_eq!(c.killing_k_signature, (0, 6, 0));
        assert_eq!(c.killing_p_signature, (8, 0, 0));
    }

    #[test]
    fn roots_and_grading() {
        let g = graded_decomposition();
        let pos = g.positive_roots();
        assert_eq!(pos.len(), 6);
        assert_eq!(ETA.height(), 5);
        assert!(pos.contains(&ETA));
        assert_eq!(g.simple_roots, vec![Root::new(0, 1), Root::new(1, 0)]);
        let dims: Vec<usize> = (-2..=3).map(|k| g.bucket(k).len()).collect();
        assert_eq!(dims, vec![2, 3, 2, 3, 2, 2]);
        assert!(root_bracket_rule_check());
        assert!(grading_containment_check());
    }

    #[test]
    fn g1_slots_match_root_vectors() {
        let g = graded_decomposition();
        let (o, z) = (ExactScalar::one(), ExactScalar::zero());
        assert_eq!(g1_realize(&o, &z, &z), g.g1_slots[0]);
        assert_eq!(g1_realize(&z, &o, &z), g.g1_slots[1]);
        assert_eq!(g1_realize(&z, &z, &o), g.g1_slots[2]);
        assert!(g1_realize(&z, &z, &z).is_zero());
        assert_eq!(ad_eigenvalue(&g.grading_element, &g.g1_slots[0]), Some(ExactScalar::one()));
        let phi = g1_realize(&ExactScalar::from_int(2), &ExactScalar::i(), &ExactScalar::ratio(1, 3));
        assert!(in_g2c(&phi));
    }

    #[test]
    fn involutions_hold() {
        let r = involutions();
        assert!(r.sigma_squared_identity && r.sigma_automorphism && r.sigma_grading_sign);
        assert!(r.theta_squared_identity && r.theta_automorphism && r.theta_swaps_grades);
        assert!(r.theta_sigma_commute);
        assert_eq!(r.fix_lambda_real_dim, 14);
        assert!(r.fix_lambda_is_real_g2);
        assert_eq!(r.fix_lambda_killing_signature, (8, 6, 0));
    }

    #[test]
    fn rigidity() {
        for e in rigidity_bracket_checks(7) {
            assert!(e.nonzero && e.random_all_nonzero, "{e:?}");
        }
        let s = cyclic_symmetry_check(&ExactScalar::one(), &ExactScalar::from_int(2), &ExactScalar::i());
        assert!(s.minus_one_exact);
        assert!(s.primitive_root_error < 1e-12);
    }

    #[test]
    fn theta_is_minus_adjoint_on_g2c() {
        let g = graded_decomposition();
        for x in g.roots.values().chain(g.torus.iter()) {
            assert_eq!(theta(x), -&x.conj().transpose());
        }
    }

    #[test]
    fn jacobi() {
        assert!(jacobi_check());
    }
}
