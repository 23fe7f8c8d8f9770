//! `algebra-check`: exact certificate for the split octonions.

use anyhow::Result;
use g2cyclic::exact::{random_scalar, ExactScalar};
use g2cyclic::linalg::{span_rank, ExactMatrix};
use g2cyclic::octonion::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::summary::{Check, Outcome};

fn int(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

fn signature(m: &ExactMatrix) -> String {
    match m.real_signature() {
        Some((p, n, z)) => format!("({p},{n},{z})"),
        None => "not real".into(),
    }
}

fn block(idx: &[usize], q: impl Fn(usize, usize) -> ExactScalar) -> ExactMatrix {
    ExactMatrix::from_fn(idx.len(), idx.len(), |a, b| q(idx[a], idx[b]))
}

fn random_oct(rng: &mut ChaCha8Rng) -> SplitOctonion {
    SplitOctonion(std::array::from_fn(|_| random_scalar(rng, 3)))
}

fn random_im(rng: &mut ChaCha8Rng) -> ImOctonion {
    ImOctonion(std::array::from_fn(|_| random_scalar(rng, 3)))
}

fn table_checks(out: &mut Outcome) -> Result<()> {
    let entries = verify_f_table();
    let mut w = csv::Writer::from_writer(out.create("cross_table.csv")?);
    w.write_record(["row", "col", "expected", "computed", "ok"])?;
    for e in &entries {
        w.write_record([e.row.to_string(), e.col.to_string(), e.expected.clone(), e.computed.clone(), e.ok.to_string()])?;
        out.check(Check::new(format!("f{} x f{}", e.row, e.col), e.ok, &e.computed, &e.expected));
    }
    w.flush()?;
    let ok = entries.iter().filter(|e| e.ok).count();
    out.note(format!("cross product table: {ok}/{} off-diagonal entries verified (read as row x column)", entries.len()));
    out.check(Check::equals("table entries verified", ok, 42));
    Ok(())
}

fn structure_checks(out: &mut Outcome) {
    let g = gram();
    out.check(Check::equals("q signature", signature(&g), "(4,3,0)".to_string()));
    out.check(Check::holds("q Gram in f-basis", f_gram() == expected_f_gram()));
    out.check(Check::holds("J_f0 matrix", j_f0_matrix() == expected_j_f0()));

    // Im(H') = span(j, δ, ε) and H'ℓ = span(ℓ, jℓ, δℓ, εℓ).
    let im_h: Vec<usize> = (0..3).collect();
    let h_l: Vec<usize> = (3..7).collect();
    let q = |a: usize, b: usize| ImOctonion::basis(a).bilinear(&ImOctonion::basis(b));
    let cross_zero = im_h.iter().all(|&a| h_l.iter().all(|&b| q(a, b).is_zero()));
    out.check(Check::holds("Im(H') orthogonal to H'l", cross_zero));
    out.check(Check::equals("signature on Im(H')", signature(&block(&im_h, q)), "(2,1,0)".into()));
    out.check(Check::equals("signature on H'l", signature(&block(&h_l, q)), "(2,2,0)".into()));
    // Quaternion presentation: q(x) = Re(x·x) on imaginary units.
    let qq = |a: usize, b: usize| SplitOctonion::basis(a + 1).mul_quat(&SplitOctonion::basis(b + 1)).re().clone();
    out.check(Check::equals("signature on Im(H), quaternion form", signature(&block(&im_h, qq)), "(0,3,0)".into()));
    out.check(Check::equals("signature on Hl, quaternion form", signature(&block(&h_l, qq)), "(4,0,0)".into()));

    let pairs = |a: &[usize], b: &[usize], strict: bool| -> Vec<ImOctonion> {
        let mut v = Vec::new();
        for &i in a {
            for &j in b {
                if !strict || i < j {
                    v.push(ImOctonion::basis(i).cross(&ImOctonion::basis(j)));
                }
            }
        }
        v
    };
    let in_im_h = |v: &ImOctonion| v.0[3..].iter().all(ExactScalar::is_zero);
    let rank = |vs: &[ImOctonion]| span_rank(&vs.iter().map(ImOctonion::to_vec).collect::<Vec<_>>());
    let a = pairs(&im_h, &im_h, true);
    out.check(Check::holds("x: L2 Im(H') onto Im(H')", a.iter().all(in_im_h) && rank(&a) == 3));
    let b = pairs(&h_l, &h_l, true);
    out.check(Check::holds("x: L2 H'l into Im(H'), kernel dim 3", b.iter().all(in_im_h) && rank(&b) == 3));
    let c = pairs(&im_h, &h_l, false);
    out.check(Check::holds("x: Im(H') (x) H'l has no Im(H') part", c.iter().all(|v| v.0[..3].iter().all(ExactScalar::is_zero))));

    let (lhs, rhs) = nonassociativity_witness();
    let el = SplitOctonion::basis(7);
    out.check(Check::holds("(j d) l = el, j (d l) = -el", lhs == el && rhs == el.scale(&int(-1))));
    out.check(Check::equals("isomorphism intertwining failures", iso_intertwining_failures().len(), 0));

    let fb = f_basis();
    let [x, y, z] = d_plus_delta_reference();
    out.check(Check::equals("Omega(j, d, e)", ImOctonion::basis(0).three_form(&ImOctonion::basis(1), &ImOctonion::basis(2)).to_string(), "1".into()));
    out.check(Check::equals("Omega(f-3, f1, f2)", fb[0].three_form(&fb[4], &fb[5]).to_string(), ExactScalar::sqrt2().to_string()));
    out.check(Check::equals("Omega on D+ reference", x.three_form(&y, &z).to_string(), "-4".into()));
    for (idx, coef) in omega_coefficients() {
        out.note(format!("Omega coefficient r{}*r{}*r{}: {coef}", idx[0] + 1, idx[1] + 1, idx[2] + 1));
    }

    out.note(format!(
        "vol coefficient: {} (determinant convention), {} (1/k! convention)",
        vol_coefficient(),
        vol_coefficient_factorial_convention()
    ));

    let (plus, minus) = para_distributions(&ImOctonion::basis(1)).expect("q(d) = 1");
    out.check(Check::holds("D+ at d is span(j-e, l+dl, jl+el)", plus.len() == 3 && minus.len() == 3 && same_span(&plus, &d_plus_delta_reference())));
}

fn sweeps(cfg: &RunConfig, out: &mut Outcome) {
    let n = cfg.file.algebra.random_pairs.unwrap_or(32);
    let nv = cfg.file.algebra.volume_pairs.unwrap_or(8);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut alt, mut norm, mut conj, mut jsq, mut vol) = (0, 0, 0, 0, 0);
    let nrm = |x: &SplitOctonion| x.mul(&x.conj()).re().clone();
    for _ in 0..n {
        let (x, y) = (random_oct(&mut rng), random_oct(&mut rng));
        alt += usize::from(x.mul(&x).mul(&y) == x.mul(&x.mul(&y)) && y.mul(&x).mul(&x) == y.mul(&x.mul(&x)));
        norm += usize::from(nrm(&x.mul(&y)) == &nrm(&x) * &nrm(&y));
        conj += usize::from(x.mul(&y).conj() == y.conj().mul(&x.conj()));
        // J on the tangent space at j, which has q = -1
        let z = ImOctonion::basis(0);
        let w = random_im(&mut rng);
        let w = w.sub(&z.scale(&z.bilinear(&w).checked_div(&z.qform()).expect("q(j) = -1")));
        let jw = almost_complex(&z, &w).expect("tangent vector");
        jsq += usize::from(almost_complex(&z, &jw).ok() == Some(w.scale(&int(-1))));
    }
    for _ in 0..nv {
        vol += usize::from(volume_identity_check(&random_im(&mut rng), &random_im(&mut rng)).holds);
    }
    out.check(Check::equals("alternativity (random pairs)", alt, n));
    out.check(Check::equals("norm multiplicative (random pairs)", norm, n));
    out.check(Check::equals("conjugation reverses products (random pairs)", conj, n));
    out.check(Check::equals("J^2 = -1 at j (random tangent vectors)", jsq, n));
    out.check(Check::equals("7-form identity (random pairs)", vol, nv));
    out.note(format!("seeded sweeps: seed {}, {n} pairs, {nv} pairs for the 7-form identity", cfg.seed));
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::new("algebra-check", &cfg.out)?;
    table_checks(&mut out)?;
    structure_checks(&mut out);
    sweeps(cfg, &mut out);
    out.put("vol_coefficient", &vol_coefficient().to_string())?;
    out.put("vol_coefficient_factorial", &vol_coefficient_factorial_convention().to_string())?;
    out.put("table_entries_verified", &verify_f_table().iter().filter(|e| e.ok).count())?;
    out.put("table_reading", &"row x column")?;
    let text = out.report_text();
    out.write_text("certificate.txt", &text)?;
    Ok(out)
}
