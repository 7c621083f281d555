//! Classification of semi-tori `C^2/Γ` with witnesses, and the isogeny
//! classes of their quotient elliptic curves.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::elliptic::{self, IsogenyWitness, ModularMatrix, PeriodRatio};
use crate::error::{Error, Result};
use crate::field::{self, FieldElement, ModularField};
use crate::lattice::{self, NormalizedLattice, SemiTorusLattice, Vector2};
use crate::linalg;
use crate::rational::{ceil, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub norm_height: u32,
    pub witness_cap: u32,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { norm_height: lattice::DEFAULT_NORM_HEIGHT, witness_cap: 6 }
    }
}

/// `T ≅ C* × E` with `E = H/(H ∩ Γ)`.
#[derive(Clone, Debug)]
pub struct SplitData {
    /// Triple of `γ0` in the normalized basis and the vector in original coordinates.
    pub gamma0_triple: [BigInt; 3],
    pub gamma0: Vector2,
    /// Basis of `H ∩ Γ`, as triples and as vectors.
    pub h_triples: [[BigInt; 3]; 2],
    pub h_basis: [Vector2; 2],
    /// Coefficients of `z1, z2` of a functional vanishing on `H`.
    pub projection: Vector2,
    /// Ratio `h2/h1` of the `H`-lattice basis, up to sign.
    pub h_ratio: PeriodRatio,
    /// Its reduction to the fundamental domain.
    pub e_tau: PeriodRatio,
    pub reduction: ModularMatrix,
    pub also_cubic: bool,
}

/// Two quotient curves that are not isogenous.
#[derive(Clone, Debug)]
pub struct GenericWitness {
    pub triples: [[i64; 3]; 2],
    pub taus: [PeriodRatio; 2],
    pub height: u32,
}

#[derive(Clone, Debug)]
pub enum Classification {
    SplitProduct(Box<SplitData>),
    CubicArithmetic { primitive: FieldElement, reference_tau: PeriodRatio },
    /// `witness` is `None` when the search up to `searched` found nothing.
    Generic { witness: Option<GenericWitness>, searched: u32, degree: usize },
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::SplitProduct(_) => "SplitProduct",
            Classification::CubicArithmetic { .. } => "CubicArithmetic",
            Classification::Generic { .. } => "Generic",
        }
    }

    /// Whether every quotient curve is isogenous to every other.
    pub fn single_isogeny_class(&self) -> bool {
        !matches!(self, Classification::Generic { .. })
    }
}

/// Both normalized data and the verdict.
#[derive(Clone, Debug)]
pub struct Classified {
    pub normalized: NormalizedLattice,
    pub relation_dim: usize,
    pub classification: Classification,
}

pub fn classify(lattice: &SemiTorusLattice, opts: &ClassifyOptions) -> Result<Classified> {
    let n = lattice::normalize(lattice, opts.norm_height)?;
    let classification = classify_normalized(&n, opts)?;
    let relation_dim = lattice::relation_space(&n)?.dim;
    Ok(Classified { normalized: n, relation_dim, classification })
}

pub fn classify_normalized(n: &NormalizedLattice, opts: &ClassifyOptions) -> Result<Classification> {
    let rel = lattice::relation_space(n)?;
    if rel.dim == 2 {
        return Ok(Classification::SplitProduct(Box::new(split_construction(n)?)));
    }
    let sub = field::generated_subfield(&[n.alpha().clone(), n.beta().clone()])?;
    match sub.degree {
        3 => {
            let k = n.field();
            let reference_tau = elliptic::period_ratio(&k.one(), &sub.primitive)?;
            Ok(Classification::CubicArithmetic { primitive: sub.primitive, reference_tau })
        }
        d if d >= 4 => {
            let witness = generic_witness(n, opts.witness_cap)?;
            Ok(Classification::Generic { witness, searched: opts.witness_cap, degree: d })
        }
        d => Err(Error::Internal(format!("independent 1, α, β generate a field of degree {d}"))),
    }
}

fn vector_of(n: &NormalizedLattice, t: &[BigInt; 3]) -> Vector2 {
    n.to_original(&n.gamma(&t.clone().map(Rat::from_integer)))
}

pub fn split_construction(n: &NormalizedLattice) -> Result<SplitData> {
    let rel = lattice::relation_space(n)?;
    if rel.dim != 2 {
        return Err(Error::NotSplit(rel.dim));
    }
    let basis = rel.integer_basis();
    let h_triples = [basis[0].clone(), basis[1].clone()];
    let normal = linalg::cross(&h_triples[0], &h_triples[1]);
    let (u, g) = linalg::reduce_column(&normal);
    if !g.is_one() {
        return Err(Error::Internal("relation lattice basis is not saturated".into()));
    }
    let gamma0_triple = [u[0][0].clone(), u[0][1].clone(), u[0][2].clone()];
    let h_basis = [vector_of(n, &h_triples[0]), vector_of(n, &h_triples[1])];
    let gamma0 = vector_of(n, &gamma0_triple);
    let h1 = &h_basis[0];
    let projection = [h1[1].clone(), -&h1[0]];
    // a chart of H: the coordinate where h1 does not vanish
    let c = if h1[0].is_zero() { 1 } else { 0 };
    let h_ratio = elliptic::period_ratio(&h1[c], &h_basis[1][c])?;
    let (e_tau, reduction) = elliptic::reduce_fundamental(&h_ratio)?;
    let also_cubic = field::generated_subfield(&[n.alpha().clone(), n.beta().clone()])?.degree == 3;
    Ok(SplitData { gamma0_triple, gamma0, h_triples, h_basis, projection, h_ratio, e_tau, reduction, also_cubic })
}

/// Tests a list of ratios against the first, returning the first index that
/// is certainly not isogenous to it.
fn first_non_isogenous(taus: &[PeriodRatio]) -> Result<Option<usize>> {
    let Some(first) = taus.first() else { return Ok(None) };
    let modular = ModularField::new(first.tau().field());
    let reduced = modular.as_ref().and_then(|m| m.reduce(first.tau()));
    let hits: Vec<Result<bool>> = taus[1..]
        .par_iter()
        .map(|t| {
            if let (Some(m), Some(a)) = (&modular, &reduced) {
                if let Some(b) = m.reduce(t.tau()) {
                    if elliptic::certainly_not_isogenous(m, a, &b) {
                        return Ok(true);
                    }
                }
            }
            Ok(elliptic::isogenous(first, t)?.is_none())
        })
        .collect();
    for (i, h) in hits.into_iter().enumerate() {
        if h? {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}

fn generic_witness(n: &NormalizedLattice, cap: u32) -> Result<Option<GenericWitness>> {
    for h in 1..=cap {
        let curves = lattice::enumerate_quotients(n, h)?;
        let taus: Vec<PeriodRatio> = curves.iter().map(|c| c.tau.clone()).collect();
        if let Some(j) = first_non_isogenous(&taus)? {
            let w = GenericWitness {
                triples: [curves[0].triple, curves[j].triple],
                taus: [taus[0].clone(), taus[j].clone()],
                height: h,
            };
            if elliptic::isogenous(&w.taus[0], &w.taus[1])?.is_some() {
                return Err(Error::Internal("modular independence certificate contradicts exact dependence".into()));
            }
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Quotients along `(m, 1)` and `(n, 1)` of `<e1, e2, (α, τ)>`, i.e. the
/// curves `C/<1, mτ - α>` and `C/<1, nτ - α>`, which are not isomorphic.
#[derive(Clone, Debug)]
pub struct NonisomorphicWitness {
    pub m: BigInt,
    pub n: BigInt,
    pub tau_m: PeriodRatio,
    pub tau_n: PeriodRatio,
    pub reduced_m: PeriodRatio,
    pub reduced_n: PeriodRatio,
}

/// `ceil((1 + Im α)/Im τ)`, exact.
fn threshold_ceiling(alpha: &FieldElement, tau: &FieldElement) -> Result<BigInt> {
    let ctx = tau.field().conjugate_context()?;
    let (ia, it) = (ctx.im_part(alpha), ctx.im_part(tau));
    let mut bits = 32;
    while bits <= 8192 {
        let a = alpha.enclose(bits)?.im;
        let t = tau.enclose(bits)?.im;
        let (tlo, thi) = (t.lo(), t.hi());
        if tlo.is_zero() || tlo < Rat::zero() {
            bits *= 2;
            continue;
        }
        let one = Rat::one();
        let (alo, ahi) = (&one + a.lo(), &one + a.hi());
        let lo = if alo < Rat::zero() { &alo / &tlo } else { &alo / &thi };
        let hi = if ahi < Rat::zero() { &ahi / &thi } else { &ahi / &tlo };
        let (clo, chi) = (ceil(&lo), ceil(&hi));
        if clo == chi {
            return Ok(clo);
        }
        if &chi - &clo == BigInt::one() {
            // the interval straddles the integer clo; test T = clo exactly
            let x = &it.scale(&Rat::from_integer(clo.clone())) - &ia;
            let sq = &x * &x;
            if sq.as_rational() == Some(-Rat::one()) && x.sign_im()? > 0 {
                return Ok(clo);
            }
        }
        bits *= 2;
    }
    Err(Error::Internal("threshold did not separate from an integer".into()))
}

pub fn nonisomorphic_witness(alpha: &FieldElement, tau: &FieldElement) -> Result<NonisomorphicWitness> {
    if !alpha.same_field(tau) {
        return Err(Error::FieldMismatch);
    }
    PeriodRatio::new(tau.clone())?;
    let n = threshold_ceiling(alpha, tau)? + 1;
    let m = &n + 1;
    let lam = |k: &BigInt| PeriodRatio::new(&tau.scale(&Rat::from_integer(k.clone())) - alpha);
    let (tau_m, tau_n) = (lam(&m)?, lam(&n)?);
    let (reduced_m, _) = elliptic::reduce_fundamental(&tau_m)?;
    let (reduced_n, _) = elliptic::reduce_fundamental(&tau_n)?;
    if reduced_m == reduced_n {
        return Err(Error::Internal("quotient curves above the threshold are isomorphic".into()));
    }
    Ok(NonisomorphicWitness { m, n, tau_m, tau_n, reduced_m, reduced_n })
}

/// One enumerated quotient curve in a report.
#[derive(Clone, Debug)]
pub struct ReportEntry {
    pub triple: [i64; 3],
    pub tau: PeriodRatio,
    pub reduced: PeriodRatio,
    pub reduction: ModularMatrix,
}

#[derive(Clone, Debug)]
pub struct IsogenyClassReport {
    pub height: u32,
    pub entries: Vec<ReportEntry>,
    /// Partition of entry indices into isogeny classes, each led by its smallest index.
    pub classes: Vec<Vec<usize>>,
    /// For every entry, its class and a witness mapping the class leader's `τ` to its own.
    pub membership: Vec<(usize, IsogenyWitness)>,
    pub all_isogenous: bool,
    pub first_failing_pair: Option<(usize, usize)>,
    pub classified: Classified,
}

impl IsogenyClassReport {
    /// Witness for `τ_i → τ_j`, or `None` when not isogenous.
    pub fn pair(&self, i: usize, j: usize) -> Option<IsogenyWitness> {
        let (ci, wi) = &self.membership[i];
        let (cj, wj) = &self.membership[j];
        (ci == cj).then(|| wj.compose(&wi.inverse()))
    }

    /// Full pairwise matrix.
    pub fn matrix(&self) -> Vec<Vec<Option<IsogenyWitness>>> {
        let n = self.entries.len();
        (0..n).into_par_iter().map(|i| (0..n).map(|j| self.pair(i, j)).collect()).collect()
    }
}

fn partition(taus: &[PeriodRatio]) -> Result<(Vec<Vec<usize>>, Vec<(usize, IsogenyWitness)>)> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut membership = Vec::with_capacity(taus.len());
    let modular = taus.first().and_then(|t| ModularField::new(t.tau().field()));
    let reduced: Vec<Option<Vec<u64>>> = taus.iter().map(|t| modular.as_ref().and_then(|m| m.reduce(t.tau()))).collect();
    for (i, t) in taus.iter().enumerate() {
        let leaders: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        let found: Vec<Result<Option<IsogenyWitness>>> = leaders
            .par_iter()
            .map(|&l| {
                if let (Some(m), Some(a), Some(b)) = (&modular, &reduced[l], &reduced[i]) {
                    if elliptic::certainly_not_isogenous(m, a, b) {
                        return Ok(None);
                    }
                }
                elliptic::isogenous(&taus[l], t)
            })
            .collect();
        let mut placed = false;
        for (c, f) in found.into_iter().enumerate() {
            if let Some(w) = f? {
                classes[c].push(i);
                membership.push((c, w));
                placed = true;
                break;
            }
        }
        if !placed {
            membership.push((classes.len(), IsogenyWitness::from_ints(1, 0, 0, 1)));
            classes.push(vec![i]);
        }
    }
    Ok((classes, membership))
}

/// Enumerates the quotient curves up to `height`, partitions them into
/// isogeny classes and checks the outcome against the classification.
pub fn isogeny_class_report(lattice: &SemiTorusLattice, height: u32, opts: &ClassifyOptions) -> Result<IsogenyClassReport> {
    let classified = classify(lattice, opts)?;
    let curves = lattice::enumerate_quotients(&classified.normalized, height)?;
    let entries: Vec<ReportEntry> = curves
        .into_par_iter()
        .map(|c| {
            let (reduced, reduction) = elliptic::reduce_fundamental(&c.tau)?;
            Ok(ReportEntry { triple: c.triple, tau: c.tau, reduced, reduction })
        })
        .collect::<Result<_>>()?;
    let taus: Vec<PeriodRatio> = entries.iter().map(|e| e.tau.clone()).collect();
    let (classes, membership) = partition(&taus)?;
    let all_isogenous = classes.len() <= 1;
    let first_failing_pair = classes.get(1).map(|_| (0, (0..entries.len()).find(|&j| membership[j].0 != 0).unwrap()));
    let expected = match &classified.classification {
        Classification::Generic { witness: Some(w), .. } if w.height <= height => Some(false),
        Classification::Generic { .. } => None,
        _ => Some(true),
    };
    if expected.is_some_and(|e| e != all_isogenous) {
        return Err(Error::ConsistencyViolation(format!(
            "{} lattice but all_isogenous = {all_isogenous} at height {height}",
            classified.classification.tag()
        )));
    }
    Ok(IsogenyClassReport { height, entries, classes, membership, all_isogenous, first_failing_pair, classified })
}
