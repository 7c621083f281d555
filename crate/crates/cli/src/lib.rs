//! Batch front end: parse a lattice document, run one pipeline, and build
//! a text or JSON report whose witnesses can be re-verified independently.

pub mod document;
pub mod render;
pub mod verify;

use std::fmt::Write as _;
use std::time::Instant;

use clap::ValueEnum;
use num_bigint::BigInt;
use semitor_core::classify::{self, Classification, Classified, ClassifyOptions};
use semitor_core::elliptic::{self, PeriodRatio};
use semitor_core::field::FieldElement;
use semitor_core::lattice::{self, NormalizedLattice};
use semitor_core::{cubic, Error};
use serde_json::{json, Value};

use document::{LatticeDocument, Loaded};
use render::{element, element_text, ratio};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Math(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Math(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(e) => match e {
                Error::NotSquarefree(_) | Error::InvalidModulus | Error::RectNotIsolating { .. } | Error::FieldMismatch => 2,
                Error::SearchExhausted(_) | Error::WitnessSearchExhausted(_) => 4,
                Error::Internal(_) | Error::ConsistencyViolation(_) | Error::RootIsolation(_) => 1,
                _ => 3,
            },
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::Input(_) => "InvalidInput".into(),
            CliError::Math(e) => format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Classify,
    Quotients,
    Isogeny,
    Reduce,
    Witness,
    Orbit,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Classify => "classify",
            Command::Quotients => "quotients",
            Command::Isogeny => "isogeny",
            Command::Reduce => "reduce",
            Command::Witness => "witness",
            Command::Orbit => "orbit",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub height: u32,
    pub witness_cap: u32,
    pub norm_height: u32,
}

impl Default for Options {
    fn default() -> Self {
        Self { height: 3, witness_cap: 6, norm_height: 10 }
    }
}

impl Options {
    fn classify(&self) -> ClassifyOptions {
        ClassifyOptions { norm_height: self.norm_height, witness_cap: self.witness_cap }
    }
}

pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub exit: i32,
}

/// Error document for `--json` output.
pub fn error_json(command: Command, e: &CliError) -> Value {
    json!({
        "schema": document::SCHEMA_VERSION,
        "command": command.name(),
        "error": { "kind": e.kind(), "message": e.to_string(), "exit": e.exit_code() },
    })
}

pub fn run(command: Command, input: &str, opts: &Options) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let doc = LatticeDocument::parse(input)?;
    let loaded = document::load_field(&doc.field)?;
    let mut text = String::new();
    let mut exit = 0;
    let result = match command {
        Command::Validate => {
            let l = document::load_lattice(&doc, &loaded)?;
            writeln!(text, "valid rank-3 lattice over Q[t]/({})", l.field().min_poly()).unwrap();
            json!({ "valid": true })
        }
        Command::Classify => {
            let l = document::load_lattice(&doc, &loaded)?;
            let c = classify::classify(&l, &opts.classify())?;
            exit = exhausted_code(&c.classification);
            text += &normalized_text(&c.normalized);
            text += &classification_text(&c.classification);
            let rel = lattice::relation_space(&c.normalized)?;
            json!({
                "normalized": normalized_json(&c.normalized),
                "relation_space": {
                    "dim": rel.dim,
                    "basis": rel.integer_basis().iter().map(|t| render::ints(t)).collect::<Vec<_>>(),
                },
                "classification": classification_json(&c),
            })
        }
        Command::Quotients => {
            let l = document::load_lattice(&doc, &loaded)?;
            let n = lattice::normalize(&l, opts.norm_height)?;
            let curves = lattice::enumerate_quotients(&n, opts.height)?;
            text += &normalized_text(&n);
            writeln!(text, "{} quotient curves up to height {}", curves.len(), opts.height).unwrap();
            let mut list = Vec::new();
            for c in &curves {
                let (reduced, m) = elliptic::reduce_fundamental(&c.tau)?;
                writeln!(text, "  {:?}  tau = {}  reduced = {}", c.triple, element_text(c.tau.tau()), element_text(reduced.tau())).unwrap();
                list.push(json!({
                    "triple": c.triple,
                    "functional": [element(&c.functional[0]), element(&c.functional[1])],
                    "omega": [element(&c.basis.omega[0]), element(&c.basis.omega[1])],
                    "tau": ratio(&c.tau),
                    "reduced": ratio(&reduced),
                    "reduction": render::modular(&m),
                }));
            }
            json!({ "normalized": normalized_json(&n), "height": opts.height, "quotients": list })
        }
        Command::Report => {
            let l = document::load_lattice(&doc, &loaded)?;
            let r = classify::isogeny_class_report(&l, opts.height, &opts.classify())?;
            exit = exhausted_code(&r.classified.classification);
            text += &normalized_text(&r.classified.normalized);
            text += &classification_text(&r.classified.classification);
            writeln!(text, "{} quotient curves up to height {} in {} isogeny class(es)", r.entries.len(), r.height, r.classes.len()).unwrap();
            writeln!(text, "all isogenous: {}", r.all_isogenous).unwrap();
            if let Some((i, j)) = r.first_failing_pair {
                writeln!(text, "first non-isogenous pair: {:?} {:?}", r.entries[i].triple, r.entries[j].triple).unwrap();
            }
            let matrix: Vec<Vec<u8>> =
                (0..r.entries.len()).map(|i| (0..r.entries.len()).map(|j| u8::from(r.membership[i].0 == r.membership[j].0)).collect()).collect();
            json!({
                "normalized": normalized_json(&r.classified.normalized),
                "classification": classification_json(&r.classified),
                "height": r.height,
                "quotients": r.entries.iter().map(|e| json!({
                    "triple": e.triple,
                    "tau": ratio(&e.tau),
                    "reduced": ratio(&e.reduced),
                    "reduction": render::modular(&e.reduction),
                })).collect::<Vec<_>>(),
                "classes": r.classes,
                "membership": r.membership.iter().map(|(c, w)| json!({ "class": c, "witness": render::witness(w) })).collect::<Vec<_>>(),
                "matrix": matrix,
                "all_isogenous": r.all_isogenous,
                "first_failing_pair": r.first_failing_pair.map(|(i, j)| [r.entries[i].triple, r.entries[j].triple]),
            })
        }
        Command::Isogeny => {
            let [x, y] = need_pair(&doc, &loaded)?;
            let one = loaded.field.one();
            let (t1, t2) = (elliptic::period_ratio(&one, &x)?, elliptic::period_ratio(&one, &y)?);
            let w = elliptic::isogenous(&t1, &t2)?;
            let iso = elliptic::isomorphic(&t1, &t2)?;
            match &w {
                Some(w) => writeln!(text, "isogenous via {w}").unwrap(),
                None => writeln!(text, "not isogenous (1, tau1, tau2, tau1*tau2 are Q-independent)").unwrap(),
            }
            writeln!(text, "isomorphic: {}", iso.is_some()).unwrap();
            json!({
                "taus": [ratio(&t1), ratio(&t2)],
                "isogenous": w.is_some(),
                "witness": w.as_ref().map(render::witness),
                "isomorphic": iso.is_some(),
                "modular": iso.as_ref().map(render::modular),
            })
        }
        Command::Reduce => {
            let coords = doc.tau.as_ref().ok_or_else(|| CliError::Input("tau: missing".into()))?;
            let tau = PeriodRatio::new(loaded.element(coords, "tau")?)?;
            let (r, m) = elliptic::reduce_fundamental(&tau)?;
            writeln!(text, "reduced tau = {}", element_text(r.tau())).unwrap();
            writeln!(text, "via ({}, {}; {}, {})", m.a, m.b, m.c, m.d).unwrap();
            json!({ "tau": ratio(&tau), "reduced": ratio(&r), "matrix": render::modular(&m) })
        }
        Command::Witness => {
            let (alpha, tau) = match document::load_pair(&doc, &loaded)? {
                Some([a, t]) => (a, t),
                None => {
                    let l = document::load_lattice(&doc, &loaded)?;
                    let n = lattice::normalize(&l, opts.norm_height)?;
                    // orient so that Im τ > 0 by negating the third basis vector
                    if n.beta().sign_im()? < 0 {
                        (-n.alpha(), -n.beta())
                    } else {
                        (n.alpha().clone(), n.beta().clone())
                    }
                }
            };
            let w = classify::nonisomorphic_witness(&alpha, &tau)?;
            let iso = elliptic::isogenous(&w.tau_m, &w.tau_n)?;
            writeln!(text, "m = {}, n = {}", w.m, w.n).unwrap();
            writeln!(text, "tau_m = {}  reduced {}", element_text(w.tau_m.tau()), element_text(w.reduced_m.tau())).unwrap();
            writeln!(text, "tau_n = {}  reduced {}", element_text(w.tau_n.tau()), element_text(w.reduced_n.tau())).unwrap();
            writeln!(text, "not isomorphic; isogenous: {}", iso.is_some()).unwrap();
            json!({
                "alpha": element(&alpha),
                "tau": element(&tau),
                "m": w.m.to_string(),
                "n": w.n.to_string(),
                "tau_m": ratio(&w.tau_m),
                "tau_n": ratio(&w.tau_n),
                "reduced_m": ratio(&w.reduced_m),
                "reduced_n": ratio(&w.reduced_n),
                "isogeny": iso.as_ref().map(render::witness),
            })
        }
        Command::Orbit => {
            let [x, y] = need_pair(&doc, &loaded)?;
            let (px, py) = (cubic::ProjectivePoint::Finite(x.clone()), cubic::ProjectivePoint::Finite(y.clone()));
            let same = cubic::same_orbit(&px, &py)?;
            let w = if !px.is_rational() && !py.is_rational() { Some(cubic::orbit_matrix(&x, &y)?) } else { None };
            let stab = if px.is_rational() { None } else { Some(cubic::stabilizer_check(&x)?) };
            writeln!(text, "same orbit: {same}").unwrap();
            if let Some(w) = &w {
                writeln!(text, "witness {w}").unwrap();
            }
            json!({
                "points": [element(&x), element(&y)],
                "same_orbit": same,
                "witness": w.as_ref().map(render::witness),
                "free_action": stab,
            })
        }
    };
    let mut field = json!({ "min_poly": render::poly(loaded.field.min_poly()) });
    if !loaded.field.ptr_eq(&loaded.declared) {
        field["declared_min_poly"] = json!(render::poly(loaded.declared.min_poly()));
        text.insert_str(0, &format!("working in the factor {} of the declared modulus\n", loaded.field.min_poly()));
    }
    let json = json!({
        "schema": document::SCHEMA_VERSION,
        "command": command.name(),
        "field": field,
        "result": result,
        "diagnostics": {
            "elapsed_ms": start.elapsed().as_millis() as u64,
            "height": opts.height,
            "norm_height": opts.norm_height,
            "witness_cap": opts.witness_cap,
        },
    });
    Ok(Outcome { json, text, exit })
}

fn need_pair(doc: &LatticeDocument, loaded: &Loaded) -> Result<[FieldElement; 2], CliError> {
    document::load_pair(doc, loaded)?.ok_or_else(|| CliError::Input("pair: missing".into()))
}

fn exhausted_code(c: &Classification) -> i32 {
    match c {
        Classification::Generic { witness: None, .. } => 4,
        _ => 0,
    }
}

fn normalized_json(n: &NormalizedLattice) -> Value {
    json!({
        "alpha": element(n.alpha()),
        "beta": element(n.beta()),
        "recombination": n.recombination().iter().map(|r| render::ints(r)).collect::<Vec<_>>(),
        "search_height": n.search_height(),
    })
}

fn normalized_text(n: &NormalizedLattice) -> String {
    let rows: Vec<Vec<String>> = n.recombination().iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect();
    format!(
        "normalized basis {:?}\n  alpha = {}\n  beta  = {}\n",
        rows,
        element_text(n.alpha()),
        element_text(n.beta())
    )
}

fn classification_json(c: &Classified) -> Value {
    match &c.classification {
        Classification::SplitProduct(d) => json!({
            "tag": "SplitProduct",
            "relation_dim": c.relation_dim,
            "gamma0": { "triple": render::ints(&d.gamma0_triple), "vector": [element(&d.gamma0[0]), element(&d.gamma0[1])] },
            "h_basis": d.h_triples.iter().zip(&d.h_basis).map(|(t, v)| json!({
                "triple": render::ints(t),
                "vector": [element(&v[0]), element(&v[1])],
            })).collect::<Vec<_>>(),
            "projection": [element(&d.projection[0]), element(&d.projection[1])],
            "h_ratio": ratio(&d.h_ratio),
            "e_tau": ratio(&d.e_tau),
            "reduction": render::modular(&d.reduction),
            "also_cubic": d.also_cubic,
        }),
        Classification::CubicArithmetic { primitive, reference_tau } => json!({
            "tag": "CubicArithmetic",
            "relation_dim": c.relation_dim,
            "primitive": element(primitive),
            "reference_tau": ratio(reference_tau),
        }),
        Classification::Generic { witness, searched, degree } => json!({
            "tag": "Generic",
            "relation_dim": c.relation_dim,
            "degree": degree,
            "searched": searched,
            "witness": witness.as_ref().map(|w| json!({
                "triples": w.triples,
                "taus": [ratio(&w.taus[0]), ratio(&w.taus[1])],
                "height": w.height,
            })),
        }),
    }
}

fn classification_text(c: &Classification) -> String {
    let mut s = format!("classification: {}\n", c.tag());
    match c {
        Classification::SplitProduct(d) => {
            let t = |v: &[BigInt; 3]| v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(", ");
            writeln!(s, "  gamma0 = ({})", t(&d.gamma0_triple)).unwrap();
            writeln!(s, "  H basis = ({}), ({})", t(&d.h_triples[0]), t(&d.h_triples[1])).unwrap();
            writeln!(s, "  e_tau = {}", element_text(d.e_tau.tau())).unwrap();
            if d.also_cubic {
                writeln!(s, "  (alpha, beta also generate a cubic field)").unwrap();
            }
        }
        Classification::CubicArithmetic { primitive, reference_tau } => {
            writeln!(s, "  primitive element = {}", element_text(primitive)).unwrap();
            writeln!(s, "  reference tau = {}", element_text(reference_tau.tau())).unwrap();
        }
        Classification::Generic { witness: Some(w), .. } => {
            writeln!(s, "  non-isogenous quotients {:?} and {:?} (height {})", w.triples[0], w.triples[1], w.height).unwrap();
            writeln!(s, "    tau = {}", element_text(w.taus[0].tau())).unwrap();
            writeln!(s, "    tau = {}", element_text(w.taus[1].tau())).unwrap();
        }
        Classification::Generic { witness: None, searched, .. } => {
            writeln!(s, "  no certificate: witness search exhausted at height {searched}").unwrap();
        }
    }
    s
}
