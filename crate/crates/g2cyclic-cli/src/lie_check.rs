//! `lie-check`: exact certificate for g2' and its complexified grading.

use std::io::Write;

use anyhow::Result;
use g2cyclic::exact::random_scalar;
use g2cyclic::lie::*;
use g2cyclic::octonion::ImOctonion;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::summary::{Check, Outcome};

fn sig(s: (usize, usize, usize)) -> String {
    format!("({},{},{})", s.0, s.1, s.2)
}

fn dimension_checks(out: &mut Outcome) {
    let d = derivation_algebra();
    out.check(Check::equals("dim of derivation algebra", d.len(), 14));
    out.check(Check::equals("dim so(4,3)", so43_dimension(), 21));
    out.check(Check::holds("derivations are q-skew", d.iter().all(is_q_skew)));
    out.check(Check::holds("closed under bracket", closure_check()));
    out.check(Check::holds("Jacobi identity", jacobi_check()));
    let k = killing_form().real_signature().map(sig).unwrap_or_default();
    out.check(Check::equals("Killing form signature", k, "(8,6,0)".into()));

    let cd = cartan_decomposition();
    out.check(Check::equals("Cartan decomposition dims", format!("({},{})", cd.k.len(), cd.p.len()), "(6,8)".into()));
    out.check(Check::holds("[k,k] in k, [k,p] in p, [p,p] in k", cd.relations_hold));
    out.check(Check::equals("Killing form on k", sig(cd.killing_k_signature), "(0,6,0)".into()));
    out.check(Check::equals("Killing form on p", sig(cd.killing_p_signature), "(8,0,0)".into()));

    let stab = |v: ImOctonion| stabilizer_subalgebra(&v).map(|s| s.len()).unwrap_or(0);
    out.check(Check::equals("stabilizer of j (q = -1)", stab(ImOctonion::basis(0)), 8));
    out.check(Check::equals("stabilizer of d (q = +1)", stab(ImOctonion::basis(1)), 8));
    out.check(Check::equals("stabilizer of Im(H') + H'l", splitting_stabilizer().len(), 6));
}

fn root_checks(cfg: &RunConfig, out: &mut Outcome) -> Result<()> {
    let g = graded_decomposition();
    let pos = g.positive_roots();
    out.check(Check::equals("positive roots", pos.len(), 6));
    out.check(Check::holds("highest root eta is positive", pos.contains(&ETA)));
    out.check(Check::equals("height of eta", ETA.height(), 5));
    out.check(Check::holds("[g_a, g_b] in g_(a+b)", root_bracket_rule_check()));
    out.check(Check::holds("Z6 grading: [g_k, g_l] in g_(k+l)", grading_containment_check()));
    for k in -2..=3 {
        let dim = g.bucket(k).len();
        let expected = if k == 0 { 2 } else { 2 + usize::from(k == 1 || k == -1) };
        out.check(Check::equals(format!("dim g_{k}"), dim, expected));
    }
    out.note(format!("positive roots: {}", pos.iter().map(|r| r.label()).collect::<Vec<_>>().join(", ")));
    out.note(format!("eta normalization ratio: {}", g.eta_ratio));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for _ in 0..8 {
        let r = cyclic_symmetry_check(&random_scalar(&mut rng, 5), &random_scalar(&mut rng, 5), &random_scalar(&mut rng, 5));
        exact &= r.minus_one_exact;
        worst = worst.max(r.primitive_root_error);
    }
    out.check(Check::holds("g1 model: conjugation by diag((-1)^k) is -1", exact));
    out.check(Check::at_most("g1 model: primitive 6th root character", worst, 1e-12));

    let rig = rigidity_bracket_checks(cfg.seed);
    let mut w = csv::Writer::from_writer(out.create("rigidity.csv")?);
    for e in &rig {
        w.serialize(e)?;
        out.check(Check::new(
            format!("[g_{}, g_{}] -> g_{} injective", e.acting, e.source, e.target),
            e.nonzero && e.random_all_nonzero,
            &e.constant,
            "nonzero",
        ));
    }
    w.flush()?;

    let inv = involutions();
    out.check(Check::holds("sigma^2 = 1, automorphism", inv.sigma_squared_identity && inv.sigma_automorphism));
    out.check(Check::holds("sigma = (-1)^k on g_k", inv.sigma_grading_sign));
    out.check(Check::holds("theta^2 = 1, automorphism", inv.theta_squared_identity && inv.theta_automorphism));
    out.check(Check::holds("theta maps g_k to g_-k", inv.theta_swaps_grades));
    out.check(Check::holds("theta and sigma commute", inv.theta_sigma_commute));
    out.check(Check::holds("fixed set of lambda is real g2'", inv.fix_lambda_real_dim == 14 && inv.fix_lambda_is_real_g2));
    out.check(Check::equals("Killing form on fixed set of lambda", sig(inv.fix_lambda_killing_signature), "(8,6,0)".into()));
    out.put("involutions", &inv)?;
    Ok(())
}

fn write_bases(out: &mut Outcome) -> Result<()> {
    let mut f = out.create("bases.txt")?;
    writeln!(f, "# canonical basis of g2' (real basis j, d, e, l, jl, dl, el)")?;
    for (k, m) in derivation_algebra().iter().enumerate() {
        writeln!(f, "X{k}\n{m:?}")?;
    }
    let g = graded_decomposition();
    writeln!(f, "# complexified basis in the f-basis (f-3 .. f3)")?;
    for (k, m) in g.torus.iter().enumerate() {
        writeln!(f, "H{k}\n{m:?}")?;
    }
    for (r, m) in &g.roots {
        writeln!(f, "E[{}] grade {}\n{m:?}", r.label(), r.grade())?;
    }

    let sc = structure_constants();
    let mut w = csv::Writer::from_writer(out.create("structure_constants.csv")?);
    w.write_record(["a", "b", "k", "value"])?;
    let mut nonzero = 0;
    for (a, row) in sc.iter().enumerate() {
        for (b, col) in row.iter().enumerate().skip(a + 1) {
            for (k, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    nonzero += 1;
                    w.write_record([a.to_string(), b.to_string(), k.to_string(), v.to_string()])?;
                }
            }
        }
    }
    w.flush()?;
    out.note(format!("structure constants: {nonzero} nonzero c[a][b][k] with a < b"));
    out.put("nonzero_structure_constants", &nonzero)?;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::new("lie-check", &cfg.out)?;
    dimension_checks(&mut out);
    root_checks(cfg, &mut out)?;
    write_bases(&mut out)?;
    let text = out.report_text();
    out.write_text("certificate.txt", &text)?;
    Ok(out)
}
