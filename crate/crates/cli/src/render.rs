use num_bigint::BigInt;
use semitor_core::elliptic::{IsogenyWitness, ModularMatrix, PeriodRatio};
use semitor_core::field::FieldElement;
use semitor_core::rational::format_rational;
use semitor_core::RationalPolynomial;
use serde_json::{json, Value};

pub fn coords(x: &FieldElement) -> Vec<String> {
    x.coords().iter().map(format_rational).collect()
}

pub fn element(x: &FieldElement) -> Value {
    let z = x.approx();
    json!({ "coords": coords(x), "approx": [z.re, z.im] })
}

pub fn ratio(t: &PeriodRatio) -> Value {
    element(t.tau())
}

pub fn poly(p: &RationalPolynomial) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

pub fn witness(w: &IsogenyWitness) -> Value {
    json!(w.entries().map(format_rational))
}

pub fn modular(m: &ModularMatrix) -> Value {
    json!([m.a.to_string(), m.b.to_string(), m.c.to_string(), m.d.to_string()])
}

pub fn ints(v: &[BigInt]) -> Value {
    json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

/// `1/2 - 1/2*t  (≈ 0.5000-0.5000i)`
pub fn element_text(x: &FieldElement) -> String {
    let mut terms = Vec::new();
    for (k, c) in x.coords().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        };
        let coeff = format_rational(c);
        terms.push(match (k, coeff.as_str()) {
            (0, _) => coeff,
            (_, "1") => mono,
            (_, "-1") => format!("-{mono}"),
            _ => format!("{coeff}*{mono}"),
        });
    }
    let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ").replace("+ -", "- ") };
    let z = x.approx();
    format!("{body}  (≈ {:.4}{:+.4}i)", z.re, z.im)
}

pub fn witness_text(w: &IsogenyWitness) -> String {
    w.to_string()
}
