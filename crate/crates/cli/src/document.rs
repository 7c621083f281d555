//! Input documents.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "field": { "min_poly": ["1", "0", "1"], "embedding": ["-1/2", "1/2", "1/2", "3/2"] },
//!   "generators": [[["1", "0"], ["0", "0"]], [["0", "0"], ["1", "0"]], [["0", "0"], ["0", "1"]]]
//! }
//! ```
//!
//! `min_poly` lists coefficients from the constant term up; `embedding` is
//! the rectangle `[re_lo, re_hi, im_lo, im_hi]` isolating the chosen root.
//! Each coordinate is a list of power-basis coefficients. Rationals are
//! strings `"p"` or `"p/q"`; `"dec:1.25"` spells a decimal exactly.

use semitor_core::field::{FieldElement, NumberField};
use semitor_core::lattice::{SemiTorusLattice, Vector2};
use semitor_core::rational::{parse_rational, Rat};
use semitor_core::{Error, IntervalRect, RationalPolynomial};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub type Coords = Vec<String>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub min_poly: Vec<String>,
    pub embedding: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LatticeDocument {
    pub schema: u32,
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Coords>>>,
    /// Period ratio for `reduce`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Coords>,
    /// Two elements for `isogeny`, `orbit` and `witness` (as `α, τ`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<Vec<Coords>>,
}

impl LatticeDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: Self = serde_json::from_str(text)
            .map_err(|e| CliError::Input(e.to_string()))?;
        if doc.schema != SCHEMA_VERSION {
            return Err(CliError::Input(format!("schema: unsupported version {}", doc.schema)));
        }
        Ok(doc)
    }
}

fn rational(s: &str, at: &str) -> Result<Rat, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Input(format!("{at}: cannot parse rational {s:?}")))
}

/// The declared field, and the field actually used after discarding
/// factors of a reducible modulus that do not vanish at the embedding.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub declared: NumberField,
    pub field: NumberField,
}

impl Loaded {
    pub fn element(&self, coords: &[String], at: &str) -> Result<FieldElement, CliError> {
        let d = self.declared.degree();
        if coords.len() != d {
            return Err(CliError::Input(format!("{at}: expected {d} coordinates, found {}", coords.len())));
        }
        let q = coords.iter().enumerate().map(|(i, s)| rational(s, &format!("{at}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
        Ok(self.field.reduce_into(&self.declared.element(q)))
    }

    /// Elements of the working field are written in its power basis.
    pub fn working_element(&self, coords: &[String], at: &str) -> Result<FieldElement, CliError> {
        let d = self.field.degree();
        if coords.len() != d {
            return Err(CliError::Input(format!("{at}: expected {d} coordinates, found {}", coords.len())));
        }
        let q = coords.iter().enumerate().map(|(i, s)| rational(s, &format!("{at}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
        Ok(self.field.element(q))
    }
}

pub fn load_field(spec: &FieldSpec) -> Result<Loaded, CliError> {
    let coeffs = spec
        .min_poly
        .iter()
        .enumerate()
        .map(|(i, s)| rational(s, &format!("field.min_poly[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    if spec.embedding.len() != 4 {
        return Err(CliError::Input(format!("field.embedding: expected 4 rationals, found {}", spec.embedding.len())));
    }
    let r: Vec<Rat> = spec
        .embedding
        .iter()
        .enumerate()
        .map(|(i, s)| rational(s, &format!("field.embedding[{i}]")))
        .collect::<Result<_, _>>()?;
    let rect = IntervalRect::new(r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone())
        .ok_or_else(|| CliError::Input("field.embedding: lower bound exceeds upper bound".into()))?;
    let declared = NumberField::new(RationalPolynomial::new(coeffs), rect)?;
    let mut field = declared.clone();
    loop {
        match field.certify_irreducible() {
            Ok(()) => break,
            Err(Error::SplitRequired(sub)) => field = sub,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Loaded { declared, field })
}

pub fn load_lattice(doc: &LatticeDocument, loaded: &Loaded) -> Result<SemiTorusLattice, CliError> {
    let gens = doc.generators.as_ref().ok_or_else(|| CliError::Input("generators: missing".into()))?;
    if gens.len() != 3 {
        return Err(CliError::Input(format!("generators: expected 3 vectors, found {}", gens.len())));
    }
    let mut vs: Vec<Vector2> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.len() != 2 {
            return Err(CliError::Input(format!("generators[{i}]: expected 2 coordinates, found {}", g.len())));
        }
        vs.push([loaded.element(&g[0], &format!("generators[{i}][0]"))?, loaded.element(&g[1], &format!("generators[{i}][1]"))?]);
    }
    let gens: [Vector2; 3] = vs.try_into().unwrap();
    Ok(SemiTorusLattice::validate(&loaded.field, gens)?)
}

pub fn load_pair(doc: &LatticeDocument, loaded: &Loaded) -> Result<Option<[FieldElement; 2]>, CliError> {
    let Some(pair) = &doc.pair else { return Ok(None) };
    if pair.len() != 2 {
        return Err(CliError::Input(format!("pair: expected 2 elements, found {}", pair.len())));
    }
    Ok(Some([loaded.element(&pair[0], "pair[0]")?, loaded.element(&pair[1], "pair[1]")?]))
}
