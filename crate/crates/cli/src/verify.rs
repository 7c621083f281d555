//! Re-checks the witnesses embedded in a JSON report against the input
//! document, without repeating any search.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use semitor_core::elliptic::{self, IsogenyWitness, ModularMatrix, PeriodRatio};
use semitor_core::field::{self, FieldElement};
use semitor_core::lattice::{self, SemiTorusLattice};
use semitor_core::linalg;
use semitor_core::rational::{parse_rational, Rat};
use serde_json::Value;

use crate::document::{self, LatticeDocument, Loaded};

type Check<T> = std::result::Result<T, String>;

struct Verifier {
    loaded: Loaded,
    checks: usize,
}

fn get<'a>(v: &'a Value, key: &str) -> Check<&'a Value> {
    v.get(key).ok_or_else(|| format!("report is missing {key:?}"))
}

fn rat(v: &Value) -> Check<Rat> {
    v.as_str().and_then(parse_rational).ok_or_else(|| format!("not a rational: {v}"))
}

fn int(v: &Value) -> Check<BigInt> {
    match v {
        Value::String(s) => s.parse().map_err(|_| format!("not an integer: {s}")),
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| format!("not an integer: {n}")),
        _ => Err(format!("not an integer: {v}")),
    }
}

fn list(v: &Value) -> Check<&Vec<Value>> {
    v.as_array().ok_or_else(|| format!("not a list: {v}"))
}

fn triple(v: &Value) -> Check<[i64; 3]> {
    let l = list(v)?;
    let x: Vec<i64> = l.iter().map(|e| e.as_i64().ok_or_else(|| format!("bad triple {v}"))).collect::<Check<_>>()?;
    x.try_into().map_err(|_| format!("bad triple {v}"))
}

fn int_triple(v: &Value) -> Check<[BigInt; 3]> {
    let x: Vec<BigInt> = list(v)?.iter().map(int).collect::<Check<_>>()?;
    x.try_into().map_err(|_| format!("bad triple {v}"))
}

fn witness(v: &Value) -> Check<IsogenyWitness> {
    let x: Vec<Rat> = list(v)?.iter().map(rat).collect::<Check<_>>()?;
    let x: [Rat; 4] = x.try_into().map_err(|_| format!("bad matrix {v}"))?;
    Ok(IsogenyWitness::new(x))
}

fn modular(v: &Value) -> Check<ModularMatrix> {
    let x: Vec<BigInt> = list(v)?.iter().map(int).collect::<Check<_>>()?;
    let [a, b, c, d]: [BigInt; 4] = x.try_into().map_err(|_| format!("bad matrix {v}"))?;
    ModularMatrix::new(a, b, c, d).ok_or_else(|| format!("matrix {v} does not have determinant 1"))
}

impl Verifier {
    fn element(&self, v: &Value) -> Check<FieldElement> {
        let coords: Vec<String> = list(get(v, "coords")?)?.iter().map(|c| c.as_str().unwrap_or("?").to_string()).collect();
        self.loaded.working_element(&coords, "report").map_err(|e| e.to_string())
    }

    fn ratio(&self, v: &Value) -> Check<PeriodRatio> {
        PeriodRatio::new(self.element(v)?).map_err(|e| e.to_string())
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) -> Check<()> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(what())
        }
    }

    fn reduction(&mut self, tau: &PeriodRatio, reduced: &PeriodRatio, m: &ModularMatrix) -> Check<()> {
        let img = m.apply(tau.tau()).map_err(|e| e.to_string())?;
        self.check(&img == reduced.tau(), || "reduction matrix does not map tau to the reduced value".into())?;
        let inside = elliptic::in_fundamental_domain(reduced).map_err(|e| e.to_string())?;
        self.check(inside, || "reduced value is outside the fundamental domain".into())
    }

    fn normalized(&mut self, l: &SemiTorusLattice, v: &Value) -> Check<(FieldElement, FieldElement)> {
        let rows: Vec<Vec<BigInt>> =
            list(get(v, "recombination")?)?.iter().map(|r| list(r)?.iter().map(int).collect::<Check<Vec<_>>>()).collect::<Check<_>>()?;
        self.check(rows.len() == 3 && linalg::int_det(&rows).abs().is_one(), || "recombination is not unimodular".into())?;
        let alpha = self.element(get(v, "alpha")?)?;
        let beta = self.element(get(v, "beta")?)?;
        let [g1, g2, g3] = [0, 1, 2].map(|i| l.combine(&rows[i]));
        let ok = (0..2).all(|c| g3[c] == &(&alpha * &g1[c]) + &(&beta * &g2[c]));
        self.check(ok, || "third basis vector is not alpha*gamma1 + beta*gamma2".into())?;
        let real = alpha.is_real().map_err(|e| e.to_string())? || beta.is_real().map_err(|e| e.to_string())?;
        self.check(!real, || "alpha or beta is real".into())?;
        Ok((alpha, beta))
    }

    fn quotient_tau(&self, alpha: &FieldElement, beta: &FieldElement, t: [i64; 3]) -> Check<PeriodRatio> {
        let n = lattice::normalize(&SemiTorusLattice::standard(alpha, beta).map_err(|e| e.to_string())?, 0).map_err(|e| e.to_string())?;
        Ok(lattice::quotient_curve(&n, t).map_err(|e| e.to_string())?.tau)
    }

    /// `τ` of a quotient may come from any basis of the image lattice, so it
    /// is checked up to `SL2(Z)`.
    fn same_curve(&mut self, expected: &PeriodRatio, claimed: &PeriodRatio) -> Check<()> {
        let iso = elliptic::isomorphic(expected, claimed).map_err(|e| e.to_string())?;
        self.check(iso.is_some(), || "reported tau does not match the quotient curve".into())
    }

    fn classification(&mut self, l: &SemiTorusLattice, alpha: &FieldElement, beta: &FieldElement, c: &Value) -> Check<()> {
        let standard = SemiTorusLattice::standard(alpha, beta).map_err(|e| e.to_string())?;
        let n = lattice::normalize(&standard, 0).map_err(|e| e.to_string())?;
        let dependent = !n.v_is_three_dimensional().map_err(|e| e.to_string())?;
        match get(c, "tag")?.as_str() {
            Some("SplitProduct") => {
                self.check(dependent, || "split lattice with Q-independent 1, alpha, beta".into())?;
                let g0 = int_triple(get(get(c, "gamma0")?, "triple")?)?;
                let hs: Vec<[BigInt; 3]> = list(get(c, "h_basis")?)?.iter().map(|h| int_triple(get(h, "triple")?)).collect::<Check<_>>()?;
                self.check(hs.len() == 2, || "H basis must have two vectors".into())?;
                let m = vec![g0.to_vec(), hs[0].to_vec(), hs[1].to_vec()];
                self.check(linalg::int_det(&m).abs().is_one(), || "gamma0 and the H basis do not form a basis".into())?;
                for h in &hs {
                    let q = h.clone().map(Rat::from_integer);
                    let inside = lattice::membership_h(&n, &q).map_err(|e| e.to_string())?;
                    self.check(inside, || "H basis vector outside H".into())?;
                }
                let g0q = g0.clone().map(Rat::from_integer);
                self.check(!lattice::membership_h(&n, &g0q).map_err(|e| e.to_string())?, || "gamma0 lies in H".into())?;
                let vec_of = |t: &[BigInt; 3]| n.gamma(&t.clone().map(Rat::from_integer));
                let (h1, h2) = (vec_of(&hs[0]), vec_of(&hs[1]));
                let k = if h1[0].is_zero() { 1 } else { 0 };
                let ratio = elliptic::period_ratio(&h1[k], &h2[k]).map_err(|e| e.to_string())?;
                let claimed = self.ratio(get(c, "h_ratio")?)?;
                self.check(ratio == claimed, || "H-lattice ratio mismatch".into())?;
                let e_tau = self.ratio(get(c, "e_tau")?)?;
                let m = modular(get(c, "reduction")?)?;
                self.reduction(&claimed, &e_tau, &m)?;
                let _ = l;
            }
            Some("CubicArithmetic") => {
                self.check(!dependent, || "cubic lattice with dependent 1, alpha, beta".into())?;
                let p = self.element(get(c, "primitive")?)?;
                self.check(field::element_degree(&p) == 3, || "primitive element is not cubic".into())?;
                let sub = field::generated_subfield(&[p.clone(), alpha.clone(), beta.clone()]).map_err(|e| e.to_string())?;
                self.check(sub.degree == 3, || "alpha, beta do not lie in the cubic field".into())?;
                let t = self.ratio(get(c, "reference_tau")?)?;
                self.check(t.tau() == &p || t.tau() == &-&p, || "reference tau is not the primitive element".into())?;
            }
            Some("Generic") => {
                self.check(!dependent, || "generic lattice with dependent 1, alpha, beta".into())?;
                if let Some(w) = get(c, "witness")?.as_object().map(|_| get(c, "witness")).transpose()? {
                    let ts = list(get(w, "triples")?)?;
                    let taus = list(get(w, "taus")?)?;
                    let mut rs = Vec::new();
                    for (t, tau) in ts.iter().zip(taus) {
                        let claimed = self.ratio(tau)?;
                        let expected = self.quotient_tau(alpha, beta, triple(t)?)?;
                        self.same_curve(&expected, &claimed)?;
                        rs.push(claimed);
                    }
                    let iso = elliptic::isogenous(&rs[0], &rs[1]).map_err(|e| e.to_string())?;
                    self.check(iso.is_none(), || "witness pair is isogenous".into())?;
                }
            }
            other => return Err(format!("unknown classification tag {other:?}")),
        }
        Ok(())
    }
}

/// Number of checks performed, or the first failure.
pub fn verify(input: &str, report: &Value) -> Check<usize> {
    let doc = LatticeDocument::parse(input).map_err(|e| e.to_string())?;
    let loaded = document::load_field(&doc.field).map_err(|e| e.to_string())?;
    let mut v = Verifier { loaded: loaded.clone(), checks: 0 };
    let command = get(report, "command")?.as_str().unwrap_or_default().to_string();
    let r = get(report, "result")?;
    let lattice = || document::load_lattice(&doc, &loaded).map_err(|e| e.to_string());
    match command.as_str() {
        "validate" => {
            lattice()?;
            v.check(true, String::new)?;
        }
        "classify" | "report" => {
            let l = lattice()?;
            let (alpha, beta) = v.normalized(&l, get(r, "normalized")?)?;
            v.classification(&l, &alpha, &beta, get(r, "classification")?)?;
            if command == "report" {
                verify_report(&mut v, &alpha, &beta, r)?;
            }
        }
        "quotients" => {
            let l = lattice()?;
            let (alpha, beta) = v.normalized(&l, get(r, "normalized")?)?;
            for q in list(get(r, "quotients")?)? {
                let tau = v.ratio(get(q, "tau")?)?;
                let expected = v.quotient_tau(&alpha, &beta, triple(get(q, "triple")?)?)?;
                v.same_curve(&expected, &tau)?;
                let reduced = v.ratio(get(q, "reduced")?)?;
                v.reduction(&tau, &reduced, &modular(get(q, "reduction")?)?)?;
            }
        }
        "isogeny" => {
            let taus = list(get(r, "taus")?)?;
            let (t1, t2) = (v.ratio(&taus[0])?, v.ratio(&taus[1])?);
            match get(r, "witness")? {
                Value::Null => {
                    let none = elliptic::isogenous(&t1, &t2).map_err(|e| e.to_string())?.is_none();
                    v.check(none, || "claimed non-isogenous pair is isogenous".into())?;
                }
                w => {
                    let w = witness(w)?;
                    v.check(w.verify(t1.tau(), t2.tau()), || "isogeny witness does not verify".into())?;
                }
            }
            if let Value::Array(_) = get(r, "modular")? {
                let m = modular(get(r, "modular")?)?;
                let img = m.apply(t1.tau()).map_err(|e| e.to_string())?;
                v.check(&img == t2.tau(), || "isomorphism matrix does not verify".into())?;
            }
        }
        "reduce" => {
            let tau = v.ratio(get(r, "tau")?)?;
            let reduced = v.ratio(get(r, "reduced")?)?;
            v.reduction(&tau, &reduced, &modular(get(r, "matrix")?)?)?;
        }
        "witness" => {
            let alpha = v.element(get(r, "alpha")?)?;
            let tau = v.element(get(r, "tau")?)?;
            for (k, t, red) in [("m", "tau_m", "reduced_m"), ("n", "tau_n", "reduced_n")] {
                let m = Rat::from_integer(int(get(r, k)?)?);
                let claimed = v.ratio(get(r, t)?)?;
                v.check(claimed.tau() == &(&tau.scale(&m) - &alpha), || format!("{t} is not {k}*tau - alpha"))?;
                let im = claimed.tau().enclose(64).map_err(|e| e.to_string())?.im.lo();
                v.check(im > Rat::one(), || format!("Im {t} is not above 1"))?;
                let _ = red;
            }
            let (tm, tn) = (v.ratio(get(r, "tau_m")?)?, v.ratio(get(r, "tau_n")?)?);
            let iso = elliptic::isomorphic(&tm, &tn).map_err(|e| e.to_string())?;
            v.check(iso.is_none(), || "witness curves are isomorphic".into())?;
            if let w @ Value::Array(_) = get(r, "isogeny")? {
                let w = witness(w)?;
                v.check(w.verify(tm.tau(), tn.tau()), || "isogeny witness does not verify".into())?;
            }
        }
        "orbit" => {
            let pts = list(get(r, "points")?)?;
            let (x, y) = (v.element(&pts[0])?, v.element(&pts[1])?);
            if let w @ Value::Array(_) = get(r, "witness")? {
                let w = witness(w)?;
                v.check(w.verify(&x, &y), || "orbit witness does not verify".into())?;
            }
            let same = get(r, "same_orbit")?.as_bool().unwrap_or(false);
            let expected = x.as_rational().is_some() == y.as_rational().is_some();
            v.check(same == expected, || "orbit verdict disagrees with rationality".into())?;
        }
        other => return Err(format!("unknown command {other:?}")),
    }
    Ok(v.checks)
}

fn verify_report(v: &mut Verifier, alpha: &FieldElement, beta: &FieldElement, r: &Value) -> Check<()> {
    let entries = list(get(r, "quotients")?)?;
    let mut taus = Vec::new();
    for q in entries {
        let tau = v.ratio(get(q, "tau")?)?;
        let expected = v.quotient_tau(alpha, beta, triple(get(q, "triple")?)?)?;
        v.same_curve(&expected, &tau)?;
        let reduced = v.ratio(get(q, "reduced")?)?;
        v.reduction(&tau, &reduced, &modular(get(q, "reduction")?)?)?;
        taus.push(tau);
    }
    let classes: Vec<Vec<usize>> = list(get(r, "classes")?)?
        .iter()
        .map(|c| list(c)?.iter().map(|i| i.as_u64().map(|x| x as usize).ok_or_else(|| "bad class index".to_string())).collect())
        .collect::<Check<_>>()?;
    let membership = list(get(r, "membership")?)?;
    v.check(membership.len() == taus.len(), || "membership list has the wrong length".into())?;
    let mut class_of = vec![usize::MAX; taus.len()];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }
    for (i, m) in membership.iter().enumerate() {
        let c = get(m, "class")?.as_u64().unwrap_or(u64::MAX) as usize;
        v.check(class_of[i] == c, || format!("entry {i} is listed in two classes"))?;
        let w = witness(get(m, "witness")?)?;
        let leader = classes[c][0];
        v.check(w.verify(taus[leader].tau(), taus[i].tau()), || format!("membership witness of entry {i} does not verify"))?;
    }
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let iso = elliptic::isogenous(&taus[classes[a][0]], &taus[classes[b][0]]).map_err(|e| e.to_string())?;
            v.check(iso.is_none(), || format!("classes {a} and {b} are isogenous"))?;
        }
    }
    let matrix = list(get(r, "matrix")?)?;
    for (i, row) in matrix.iter().enumerate() {
        for (j, x) in list(row)?.iter().enumerate() {
            let expected = u64::from(class_of[i] == class_of[j]);
            v.check(x.as_u64() == Some(expected), || format!("matrix entry ({i}, {j}) disagrees with the classes"))?;
        }
    }
    let all = get(r, "all_isogenous")?.as_bool().unwrap_or(false);
    v.check(all == (classes.len() <= 1), || "all_isogenous disagrees with the classes".into())
}
