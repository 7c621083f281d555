//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! `cargo test -p semitor-core --test acceptance`

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use semitor_core::classify::{self, Classification, ClassifyOptions};
use semitor_core::cubic;
use semitor_core::elliptic::{self, ModularMatrix, PeriodRatio};
use semitor_core::field::{self, FieldElement, NumberField};
use semitor_core::lattice::{self, SemiTorusLattice};
use semitor_core::rational::{ratio, Rat};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> ClassifyOptions {
    ClassifyOptions::default()
}

fn fixture_trichotomy() -> Verdict {
    let cases = [("split", split_fixture(), "SplitProduct"), ("cubic", cubic_fixture(), "CubicArithmetic"), ("generic", generic_fixture(), "Generic")];
    let mut slowest = Duration::ZERO;
    for (name, l, want) in cases {
        let start = Instant::now();
        let c = classify::classify(&l, &opts()).map_err(|e| format!("{name}: {e}"))?;
        let t = start.elapsed();
        slowest = slowest.max(t);
        ensure(c.classification.tag() == want, || format!("{name} classified as {}", c.classification.tag()))?;
        ensure(t < Duration::from_secs(5), || format!("{name} took {t:?}"))?;
    }
    Ok(format!("3/3 fixtures, slowest {:.2} s", slowest.as_secs_f64()))
}

fn theorem_both_directions() -> Verdict {
    let mut rng = rng(2);
    let mut runs = 0;
    for (name, base) in [("split", split_fixture()), ("cubic", cubic_fixture()), ("generic", generic_fixture())] {
        let want = classify::classify(&base, &opts()).map_err(|e| e.to_string())?.classification.tag();
        let mut lattices = vec![base.clone()];
        lattices.extend((0..50).map(|_| scramble(&base, &mut rng)));
        for (i, l) in lattices.iter().enumerate() {
            let r = classify::isogeny_class_report(l, 4, &opts()).map_err(|e| format!("{name} #{i}: {e}"))?;
            let c = &r.classified.classification;
            ensure(c.tag() == want, || format!("{name} #{i} classified as {}", c.tag()))?;
            ensure(r.all_isogenous == c.single_isogeny_class(), || format!("{name} #{i}: all_isogenous = {}", r.all_isogenous))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} reports at height 4, 0 consistency violations"))
}

fn quadratic_lemma() -> Verdict {
    let mut rng = rng(3);
    let mut done = 0;
    for n in [1, 2, 3, 7] {
        let k = imag_quadratic(n);
        let sqrt = PeriodRatio::new(k.generator()).unwrap();
        let mut count = 0;
        while count < 10 {
            let gens = [0, 1, 2].map(|_| [random_element(&mut rng, &k, 3), random_element(&mut rng, &k, 3)]);
            let Ok(l) = SemiTorusLattice::validate(&k, gens) else { continue };
            let c = classify::classify(&l, &opts()).map_err(|e| e.to_string())?;
            let Classification::SplitProduct(d) = &c.classification else {
                return Err(format!("Q(√-{n}) lattice classified as {}", c.classification.tag()));
            };
            let w = elliptic::isogenous(&d.e_tau, &sqrt).map_err(|e| e.to_string())?;
            let ok = w.is_some_and(|w| w.verify(d.e_tau.tau(), sqrt.tau()));
            ensure(ok, || format!("Q(√-{n}): e_tau not isogenous to √-{n}"))?;
            count += 1;
            done += 1;
        }
    }
    Ok(format!("{done} lattices split, e_tau isogenous to √-n with verified witness"))
}

fn cubic_orbits() -> Verdict {
    let mut rng = rng(4);
    let mut pairs = 0;
    for k in [cubic(), cubic_plastic()] {
        for _ in 0..50 {
            let x = random_nonrational(&mut rng, &k, 5);
            let y = random_nonrational(&mut rng, &k, 5);
            ensure(cubic::stabilizer_check(&x).map_err(|e| e.to_string())?, || "stabilizer check failed".into())?;
            let w = cubic::orbit_matrix(&x, &y).map_err(|e| e.to_string())?;
            ensure(!w.det().is_zero() && w.verify(&x, &y), || format!("orbit witness {w} fails"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, all witnesses invertible and exact"))
}

fn has_integer_root(p: &[i64; 3]) -> bool {
    // t^3 - p2 t^2 - p1 t - p0; integer roots divide p0
    let f = |t: i64| t * t * t - p[2] * t * t - p[1] * t - p[0];
    if p[0] == 0 {
        return true;
    }
    (1..=p[0].abs()).filter(|d| p[0] % d == 0).any(|d| f(d) == 0 || f(-d) == 0)
}

fn claim2_identity() -> Verdict {
    let mut rng = rng(5);
    let mut n = 0;
    while n < 100 {
        let p = [0, 1, 2].map(|_| rng.gen_range(-10..=10i64));
        if has_integer_root(&p) {
            continue;
        }
        let lam = random_rational(&mut rng, 6);
        let pq = p.map(|x| Rat::from_integer(x.into()));
        let s = &lam + &pq[2];
        let q = -(&pq[1] * &s) + &lam * &s * &s - &pq[0];
        if q.is_zero() {
            continue;
        }
        let (w, det) = cubic::claim2_matrix(&pq, &lam).map_err(|e| e.to_string())?;
        // (λt + t^2)(ct + d) - (at + b) with t^3 = p2 t^2 + p1 t + p0
        let t2 = &w.c * &pq[2] + &w.c * &lam + &w.d;
        let t1 = &w.c * &pq[1] + &w.d * &lam - &w.a;
        let t0 = &w.c * &pq[0] - &w.b;
        ensure(t2.is_zero() && t1.is_zero() && t0.is_zero(), || format!("identity fails for p = {p:?}, λ = {lam}"))?;
        ensure(det == q && w.det() == q, || format!("det mismatch for p = {p:?}"))?;
        n += 1;
    }
    Ok(format!("{n} cubics, identity exact and det A = Q(λ)"))
}

fn random_modular(rng: &mut rand_chacha::ChaCha8Rng) -> ModularMatrix {
    let mut m = ModularMatrix::identity();
    for _ in 0..rng.gen_range(1..6) {
        m = ModularMatrix::translation(BigInt::from(rng.gen_range(-3..=3))).compose(&m);
        m = ModularMatrix::inversion().compose(&m);
    }
    m
}

fn in_domain_numeric(t: &FieldElement) -> bool {
    let (re, im) = t.enclose(ORACLE_BITS).unwrap().mid();
    let tol = tolerance();
    let half = ratio(1, 2);
    let norm = &re * &re + &im * &im - Rat::one();
    let on_circle = norm.abs() < tol;
    &re + &half > tol && &re - &half <= tol && norm > -&tol && (!on_circle || re > -&tol)
}

fn strip_criterion() -> Verdict {
    let mut rng = rng(6);
    let fields = [gaussian(), imag_quadratic(2), cubic(), zeta8()];
    let lifted = |rng: &mut rand_chacha::ChaCha8Rng, k: &NumberField| {
        let x = random_upper(rng, k, 4);
        let im = x.approx().im;
        x.scale(&Rat::from_integer(BigInt::from((1.0 / im).ceil() as i64 + 1)))
    };
    for i in 0..50 {
        let k = &fields[i % fields.len()];
        let t1 = lifted(&mut rng, k);
        let t2 = match i % 3 {
            0 => t1.add_rational(&Rat::from_integer(rng.gen_range(-5..=5).into())),
            1 => t1.add_rational(&random_rational(&mut rng, 4)),
            _ => lifted(&mut rng, k),
        };
        let diff_integer = (&t1 - &t2).as_rational().is_some_and(|q| q.is_integer());
        let iso = elliptic::isomorphic(&PeriodRatio::new(t1).unwrap(), &PeriodRatio::new(t2).unwrap()).map_err(|e| e.to_string())?;
        ensure(iso.is_some() == diff_integer, || format!("pair {i}: isomorphic = {}, integer difference = {diff_integer}", iso.is_some()))?;
    }
    for i in 0..200 {
        let k = &fields[i % fields.len()];
        let tau = PeriodRatio::new(random_upper(&mut rng, k, 4)).unwrap();
        let m = random_modular(&mut rng);
        let moved = PeriodRatio::new(m.apply(tau.tau()).unwrap()).map_err(|e| e.to_string())?;
        let (r1, m1) = elliptic::reduce_fundamental(&tau).map_err(|e| e.to_string())?;
        let (r2, m2) = elliptic::reduce_fundamental(&moved).map_err(|e| e.to_string())?;
        ensure(r1 == r2, || format!("input {i}: scrambled value reduces elsewhere"))?;
        ensure(&m1.apply(tau.tau()).unwrap() == r1.tau() && &m2.apply(moved.tau()).unwrap() == r2.tau(), || format!("input {i}: matrix mismatch"))?;
        let (r3, m3) = elliptic::reduce_fundamental(&r1).map_err(|e| e.to_string())?;
        ensure(r3 == r1 && m3 == ModularMatrix::identity(), || format!("input {i}: reduction not idempotent"))?;
        ensure(in_domain_numeric(r1.tau()) && elliptic::in_fundamental_domain(&r1).unwrap(), || format!("input {i}: outside the domain"))?;
    }
    Ok("50 strip pairs agree; 200 scrambled inputs reduce canonically".into())
}

fn proposition_witness() -> Verdict {
    let mut rng = rng(7);
    let fields = [gaussian(), imag_quadratic(2), imag_quadratic(7), cubic(), cubic_plastic(), zeta8()];
    let mut split_checked = 0;
    for i in 0..20 {
        let k = &fields[i % fields.len()];
        let alpha = random_element(&mut rng, k, 4);
        let tau = random_upper(&mut rng, k, 4);
        let w = classify::nonisomorphic_witness(&alpha, &tau).map_err(|e| e.to_string())?;
        ensure(&w.n + BigInt::one() == w.m, || "m != n + 1".into())?;
        for (mm, t) in [(&w.m, &w.tau_m), (&w.n, &w.tau_n)] {
            let want = &tau.scale(&Rat::from_integer(mm.clone())) - &alpha;
            ensure(t.tau() == &want, || format!("lattice {i}: wrong quotient ratio"))?;
            ensure(t.tau().enclose(ORACLE_BITS).unwrap().im.lo() > Rat::one(), || format!("lattice {i}: Im not above 1"))?;
        }
        let (im_a, im_t) = (alpha.approx().im, tau.approx().im);
        ensure(w.n.to_string().parse::<f64>().unwrap() > (1.0 + im_a) / im_t, || format!("lattice {i}: n below threshold"))?;
        let iso = elliptic::isomorphic(&w.tau_m, &w.tau_n).map_err(|e| e.to_string())?;
        ensure(iso.is_none(), || format!("lattice {i}: witness curves are isomorphic"))?;
        if k.degree() == 2 {
            let g = elliptic::isogenous(&w.tau_m, &w.tau_n).map_err(|e| e.to_string())?;
            ensure(g.is_some_and(|g| g.verify(w.tau_m.tau(), w.tau_n.tau())), || format!("lattice {i}: split pair not isogenous"))?;
            split_checked += 1;
        }
    }
    Ok(format!("20 non-isomorphic pairs, {split_checked} split cases isogenous"))
}

fn psi_machinery() -> Verdict {
    let mut rng = rng(8);
    let lattices = [lattice::normalize(&cubic_fixture(), 10).unwrap(), lattice::normalize(&generic_fixture(), 10).unwrap()];
    for i in 0..500 {
        let n = &lattices[i % 2];
        let t = loop {
            let t = [0, 1, 2].map(|_| random_rational(&mut rng, 6));
            if t.iter().any(|x| !x.is_zero()) {
                break t;
            }
        };
        let [m, nn, p] = t.clone();
        let z = Rat::zero();
        let mat = vec![vec![m.clone(), z.clone(), p.clone()], vec![nn.clone(), p, z.clone()], vec![z, m, -nn]];
        ensure(rational_rank(&mat) == 2, || format!("triple {i}: matrix rank is not 2"))?;
        let e = lattice::e_plane(n, &t).map_err(|e| e.to_string())?;
        let back = lattice::psi_preimage(n, &e).map_err(|e| e.to_string())?;
        ensure(lattice::e_plane(n, &back).map_err(|e| e.to_string())? == e, || format!("triple {i}: round trip changes the plane"))?;
        ensure(lattice::image_plane(n, &t).map_err(|e| e.to_string())? == e, || format!("triple {i}: image span differs"))?;
    }
    Ok("500 triples: rank 2, round trip and image identity hold".into())
}

fn oracle_agreement() -> Verdict {
    let mut rng = rng(9);
    let mut members = 0;
    for (name, l) in [("split", split_fixture()), ("cubic", cubic_fixture()), ("generic", generic_fixture())] {
        let n = lattice::normalize(&l, 10).unwrap();
        let rel = lattice::relation_space(&n).unwrap();
        for i in 0..100 {
            let t: [Rat; 3] = if i % 2 == 0 && rel.dim > 0 {
                let mut v = [Rat::zero(), Rat::zero(), Rat::zero()];
                for b in &rel.basis {
                    let c = random_rational(&mut rng, 5);
                    for j in 0..3 {
                        v[j] += &c * &b[j];
                    }
                }
                v
            } else {
                [0, 1, 2].map(|_| Rat::from_integer(rng.gen_range(-5..=5).into()))
            };
            let exact = lattice::membership_h(&n, &t).map_err(|e| e.to_string())?;
            let numeric = numeric_in_h(&n, &t);
            ensure(exact == numeric, || format!("{name} triple {t:?}: exact {exact}, numeric {numeric}"))?;
            members += usize::from(exact);
        }
    }
    Ok(format!("300 triples agree at 1e-40 ({members} in H)"))
}

fn eval_at(p: &semitor_core::RationalPolynomial, x: &FieldElement) -> FieldElement {
    p.coeffs().iter().rev().fold(x.field().zero(), |acc, c| (&acc * x).add_rational(c))
}

fn kernel_soundness() -> Verdict {
    let mut rng = rng(10);
    let fields = [gaussian(), cubic(), cubic_plastic(), zeta8(), imag_quadratic(7)];
    for i in 0..100 {
        let k = &fields[i % fields.len()];
        let x = random_element(&mut rng, k, 6);
        let y = random_element(&mut rng, k, 6);
        if !x.is_zero() {
            ensure((&x * &x.inv().map_err(|e| e.to_string())?).is_one(), || format!("case {i}: x * x^-1 != 1"))?;
        }
        let m = field::minimal_polynomial(&x);
        let d = m.degree().unwrap();
        ensure(eval_at(&m, &x).is_zero() && k.degree() % d == 0 && m.leading().is_some_and(|c| c.is_one()), || format!("case {i}: bad minimal polynomial {m}"))?;

        let a = random_rational(&mut rng, 4);
        let b = random_rational(&mut rng, 4);
        let z = &x.scale(&a) + &y.scale(&b);
        let xs = [k.one(), x.clone(), y.clone(), z];
        let coords: Vec<Vec<Rat>> = xs.iter().map(|e| e.coords().to_vec()).collect();
        let rank = field::q_rank(&xs).map_err(|e| e.to_string())?;
        ensure(rank == rational_rank(&coords), || format!("case {i}: dependence rank {rank}"))?;
        let dep = field::q_dependence(&xs).map_err(|e| e.to_string())?;
        ensure(dep.len() == 4 - rank, || format!("case {i}: kernel dimension"))?;

        let ctx = k.conjugate_context().map_err(|e| e.to_string())?;
        let hom = ctx.conj(&(&x * &y)) == &ctx.conj(&x) * &ctx.conj(&y) && ctx.conj(&(&x + &y)) == &ctx.conj(&x) + &ctx.conj(&y);
        ensure(hom, || format!("case {i}: conjugation is not a homomorphism"))?;
        let (cx, ax) = (ctx.conj(&x).approx(), x.approx());
        ensure((cx - ax.conj()).norm() < 1e-9, || format!("case {i}: conjugate has the wrong value"))?;

        let s = x.sign_im().map_err(|e| e.to_string())?;
        let expect = if ax.im.abs() < 1e-12 { 0 } else if ax.im > 0.0 { 1 } else { -1 };
        ensure(s == expect, || format!("case {i}: sign_im {s}, numeric {expect}"))?;
        if !x.is_zero() {
            let norm = &ctx.embed(&x) * &ctx.conj(&x);
            ensure(ctx.sign_real_ext(&norm).map_err(|e| e.to_string())? == 1, || format!("case {i}: |x|^2 not positive"))?;
        }
    }
    Ok("100 cases: inverse, minimal polynomial, dependence rank, conjugation, signs".into())
}

fn main() {
    let criteria: Vec<(&str, Option<u64>, fn() -> Verdict)> = vec![
        ("fixture trichotomy", None, fixture_trichotomy),
        ("classification matches isogeny classes", Some(60), theorem_both_directions),
        ("quadratic fields split", None, quadratic_lemma),
        ("cubic orbits", None, cubic_orbits),
        ("cubic identity", None, claim2_identity),
        ("strip criterion and reduction", None, strip_criterion),
        ("non-isomorphic quotients", None, proposition_witness),
        ("plane correspondence", None, psi_machinery),
        ("H-membership oracle", None, oracle_agreement),
        ("kernel soundness", Some(30), kernel_soundness),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let t = start.elapsed().as_secs_f64();
        let r = match (r, limit) {
            (Ok(msg), Some(l)) if t >= l as f64 => Err(format!("{msg}, but exceeded {l} s")),
            (r, _) => r,
        };
        let (tag, msg) = match &r {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += usize::from(r.is_err());
        println!("criterion {:>2} [{tag}] {name}: {msg} ({t:.2} s)", i + 1);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
