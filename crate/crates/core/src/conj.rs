//! Complex conjugation for elements of a number field.
//!
//! For `K = Q(θ)` with `θ` non-real, the field `L = Q(θ, θ̄)` is built
//! explicitly as `Q(ρ)` with `ρ = θ̄ + cθ`. The algebra
//! `A = Q[u, t]/(f(t), H(u, t))`, with `H(u, t) = (f(u) - f(t))/(u - t)`,
//! contains a copy of `L` as one of its factors; `ρ = u + ct` generates `A`
//! for all but finitely many `c`. The irreducible factor `μ` of the
//! characteristic polynomial of `ρ` that vanishes at the numeric value of
//! `θ̄ + cθ` is singled out by certified recombination of the numerically
//! known roots, and `θ`, `θ̄` are then read off as polynomials in `ρ`.
//! Real and imaginary parts of elements of `K` are elements of `L`; the
//! imaginary part is carried as `i·Im(x)`, which always lies in `L`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::interval::ComplexBox;
use crate::linalg;
use crate::poly::RationalPolynomial;
use crate::rational::{common_denominator, floor, Rat};
use crate::roots::{self, RootCell};

/// Largest characteristic polynomial handled by the recombination search.
const MAX_RECOMBINATION_DEGREE: usize = 20;

pub struct ConjugateContext {
    base: NumberField,
    ext: NumberField,
    /// Column `k` is `θ^k` in `L`.
    embed: Vec<FieldElement>,
    /// Column `k` is `θ̄^k` in `L`.
    conj: Vec<FieldElement>,
    /// `conj(ρ)^k` in `L`, for conjugating elements of `L` itself.
    ext_conj: OnceLock<Vec<FieldElement>>,
    /// Multiplier in `ρ = θ̄ + cθ`.
    c: Rat,
    identity: bool,
}

impl std::fmt::Debug for ConjugateContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ConjugateContext({} -> {})", self.base.min_poly(), self.ext.min_poly())
    }
}

impl ConjugateContext {
    pub(crate) fn build(base: &NumberField) -> Result<Self> {
        if base.root_is_real() {
            let powers = powers_of(&base.generator(), base.degree());
            return Ok(Self {
                base: base.clone(),
                ext: base.clone(),
                embed: powers.clone(),
                conj: powers,
                ext_conj: OnceLock::new(),
                c: Rat::zero(),
                identity: true,
            });
        }
        let f = base.min_poly();
        let d = base.degree();
        let n = d * (d - 1);
        if n > MAX_RECOMBINATION_DEGREE {
            return Err(Error::Internal(format!("conjugate closure of a degree-{d} field is out of range")));
        }
        let algebra = Algebra::new(f);
        let ti = base.root_index();
        let ui = base.conjugate_root_index()?;
        for c in 1..=64i64 {
            let cq = Rat::from_integer(c.into());
            let Some((chi, theta_coords)) = algebra.generate(&cq) else { continue };
            // roots of chi are θ_j + c θ_i for i != j
            let cells = base.root_cells();
            let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).collect();
            let target = pairs.iter().position(|&p| p == (ti, ui)).unwrap();
            let scale = common_denominator(f.coeffs());
            let enclose = |bits: u32| -> Result<Vec<ComplexBox>> {
                let prec = bits + 8 + 64 - (c as u64).leading_zeros();
                let boxes: Vec<ComplexBox> =
                    cells.iter().map(|cell| cell.refine(f, prec).map(|r| ComplexBox::from_rect(&r, prec))).collect::<Result<_>>()?;
                let cb = ComplexBox::from_rat(&cq, prec);
                Ok(pairs.iter().map(|&(i, j)| &boxes[j] + &(&cb * &boxes[i])).collect())
            };
            let mu = rational_factor(&chi, target, &scale, enclose)?;
            let ext = extension_field(&mu, |bits| {
                let b = enclose(bits)?;
                Ok(b[target].clone())
            })?;
            let rho_theta = ext.from_poly(&RationalPolynomial::new(theta_coords));
            let theta_bar = &ext.generator() - &rho_theta.scale(&cq);
            let embed = powers_of(&rho_theta, d);
            let conj = powers_of(&theta_bar, d);
            return Ok(Self { base: base.clone(), ext, embed, conj, ext_conj: OnceLock::new(), c: cq, identity: false });
        }
        Err(Error::Internal("no separating element found for the conjugate closure".into()))
    }

    pub fn base(&self) -> &NumberField {
        &self.base
    }

    /// The field `Q(θ, θ̄)`.
    pub fn ext(&self) -> &NumberField {
        &self.ext
    }

    fn apply(&self, cols: &[FieldElement], x: &FieldElement) -> FieldElement {
        let mut acc = self.ext.zero();
        for (c, col) in x.coords().iter().zip(cols) {
            if !c.is_zero() {
                acc = &acc + &col.scale(c);
            }
        }
        acc
    }

    /// `x` as an element of `L`.
    pub fn embed(&self, x: &FieldElement) -> FieldElement {
        self.apply(&self.embed, x)
    }

    /// `conj(x)` as an element of `L`.
    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        self.apply(&self.conj, x)
    }

    /// `Re(x)` in `L`.
    pub fn re(&self, x: &FieldElement) -> FieldElement {
        (&self.embed(x) + &self.conj(x)).scale(&Rat::new(1.into(), 2.into()))
    }

    /// `i·Im(x)` in `L`.
    pub fn im_part(&self, x: &FieldElement) -> FieldElement {
        (&self.embed(x) - &self.conj(x)).scale(&Rat::new(1.into(), 2.into()))
    }

    pub fn is_real(&self, x: &FieldElement) -> bool {
        self.identity || self.embed(x) == self.conj(x)
    }

    /// Complex conjugation on `L`.
    pub fn conj_ext(&self, y: &FieldElement) -> FieldElement {
        if self.identity {
            return y.clone();
        }
        let cols = self.ext_conj.get_or_init(|| {
            // conj(ρ) = θ + cθ̄ where ρ = θ̄ + cθ
            let image = &self.embed[1] + &self.conj[1].scale(&self.c);
            powers_of(&image, self.ext.degree())
        });
        self.apply(cols, y)
    }

    pub fn is_real_ext(&self, y: &FieldElement) -> bool {
        self.conj_ext(y) == *y
    }

    /// Certified sign of a real element of `L`.
    pub fn sign_real_ext(&self, y: &FieldElement) -> Result<i32> {
        if !self.is_real_ext(y) {
            return Err(Error::NotRealInput);
        }
        if y.is_zero() {
            return Ok(0);
        }
        let mut bits = 32;
        loop {
            if let Some(s) = y.enclose(bits)?.re.sign() {
                if s != 0 {
                    return Ok(s);
                }
            }
            bits *= 2;
        }
    }

    /// Certified sign of `Im(x)` for `x` in `K`; equal to the sign of the
    /// imaginary part of `i·Im(x)` read as an element of `L`.
    pub fn sign_im(&self, x: &FieldElement) -> Result<i32> {
        if self.is_real(x) {
            return Ok(0);
        }
        x.sign_im()
    }
}

fn powers_of(x: &FieldElement, n: usize) -> Vec<FieldElement> {
    let mut out = vec![x.field().one()];
    for k in 1..n {
        let next = &out[k - 1] * x;
        out.push(next);
    }
    out
}

/// The field `Q[x]/(μ)` embedded at the root enclosed by `enclose`.
fn extension_field(mu: &RationalPolynomial, enclose: impl Fn(u32) -> Result<ComplexBox>) -> Result<NumberField> {
    let cells: Vec<RootCell> = roots::isolate_all(mu)?.into_iter().map(RootCell::new).collect();
    let mut bits = 32;
    loop {
        let b = enclose(bits)?.to_rect();
        let hits: Vec<usize> = (0..cells.len()).filter(|&k| cells[k].isolating().intersects(&b)).collect();
        if hits.len() == 1 {
            let k = hits[0];
            let rect = cells[k].isolating().clone();
            return Ok(NumberField::from_parts(mu.clone(), cells, k, rect));
        }
        bits *= 2;
        if bits > 1 << 14 {
            return Err(Error::RootIsolation("extension root not separated".into()));
        }
    }
}

/// `Q[u, t]/(f(t), H(u, t))` with `H(u, t) = (f(u) - f(t))/(u - t)`.
struct Algebra {
    f: RationalPolynomial,
    d: usize,
    /// `H = u^(d-1) + sum_a h[a](t) u^a`.
    h: Vec<RationalPolynomial>,
}

type AlgElem = Vec<RationalPolynomial>;

impl Algebra {
    fn new(f: &RationalPolynomial) -> Self {
        let d = f.degree().unwrap();
        let h = (0..d - 1)
            .map(|a| {
                let coeffs: Vec<Rat> = (0..d).map(|e| if a + 1 + e <= d { f.coeff(a + 1 + e) } else { Rat::zero() }).collect();
                RationalPolynomial::new(coeffs)
            })
            .collect();
        Self { f: f.clone(), d, h }
    }

    fn dim(&self) -> usize {
        self.d * (self.d - 1)
    }

    fn one(&self) -> AlgElem {
        let mut e = vec![RationalPolynomial::zero(); self.d - 1];
        e[0] = RationalPolynomial::one();
        e
    }

    fn mul_u(&self, e: &AlgElem) -> AlgElem {
        let m = self.d - 1;
        let mut out = vec![RationalPolynomial::zero(); m];
        for a in 0..m - 1 {
            out[a + 1] = e[a].clone();
        }
        let top = &e[m - 1];
        if !top.is_zero() {
            for a in 0..m {
                out[a] = (&out[a] - &(top * &self.h[a])).rem(&self.f);
            }
        }
        out
    }

    fn mul_t(&self, e: &AlgElem) -> AlgElem {
        let t = RationalPolynomial::from_ints(&[0, 1]);
        e.iter().map(|p| (p * &t).rem(&self.f)).collect()
    }

    fn flatten(&self, e: &AlgElem) -> Vec<Rat> {
        e.iter().flat_map(|p| (0..self.d).map(|b| p.coeff(b))).collect()
    }

    /// For `ρ = u + c t`: if `ρ` generates the algebra, returns its
    /// characteristic polynomial and the coordinates of `t` in powers of `ρ`.
    fn generate(&self, c: &Rat) -> Option<(RationalPolynomial, Vec<Rat>)> {
        let n = self.dim();
        let mut cur = self.one();
        let mut cols = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            cols.push(self.flatten(&cur));
            let by_u = self.mul_u(&cur);
            let by_t = self.mul_t(&cur);
            cur = by_u.iter().zip(&by_t).map(|(a, b)| a + &b.scale(c)).collect();
        }
        let basis = &cols[..n];
        if linalg::rank_mod_prime(basis) != Some(n) && linalg::rank(basis).ok()? != n {
            return None;
        }
        let rows = linalg::transpose(basis);
        let coeffs = linalg::solve(&rows, &cols[n])?;
        let mut chi: Vec<Rat> = coeffs.into_iter().map(|q| -q).collect();
        chi.push(Rat::one());
        let mut t = self.one();
        t = self.mul_t(&t);
        let theta = linalg::solve(&rows, &self.flatten(&t))?;
        Some((RationalPolynomial::new(chi), theta))
    }
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    if k > n {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx)? {
            return Ok(true);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

enum Verdict {
    Reject,
    Candidate(Vec<BigInt>),
    Undecided,
}

/// Whether the interval `[lo, hi]` surely avoids the integers, holds exactly
/// one integer with room to spare, or is too wide to tell.
fn integer_in(b: &ComplexBox) -> Option<Option<BigInt>> {
    if !b.im.contains_zero() {
        return Some(None);
    }
    let (lo, hi) = (b.re.lo(), b.re.hi());
    let fl = floor(&hi);
    if Rat::from_integer(fl.clone()) < lo {
        return Some(None);
    }
    if &hi - &lo < Rat::new(1.into(), 4.into()) && b.im.width() < Rat::new(1.into(), 4.into()) {
        return Some(Some(fl));
    }
    None
}

fn judge(boxes: &[ComplexBox], subset: &[usize], prec: u32) -> Verdict {
    // cheap trace test before the full product
    let mut trace = ComplexBox::zero(prec);
    for &k in subset {
        trace = &trace + &boxes[k];
    }
    match integer_in(&trace) {
        Some(None) => return Verdict::Reject,
        None => return Verdict::Undecided,
        Some(Some(_)) => {}
    }
    // coefficients of prod (x - r), ascending
    let mut coeffs = vec![ComplexBox::from_rat(&Rat::one(), prec)];
    for &k in subset {
        let mut next = vec![ComplexBox::zero(prec); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] = &next[j + 1] + c;
            next[j] = &next[j] - &(c * &boxes[k]);
        }
        coeffs = next;
    }
    let mut ints = Vec::with_capacity(coeffs.len());
    let mut undecided = false;
    for c in &coeffs {
        match integer_in(c) {
            Some(None) => return Verdict::Reject,
            Some(Some(v)) => ints.push(v),
            None => undecided = true,
        }
    }
    if undecided {
        Verdict::Undecided
    } else {
        Verdict::Candidate(ints)
    }
}

/// The irreducible factor over Q of the monic squarefree `p` that vanishes
/// at its root number `target`. `enclose(bits)` returns enclosures of all
/// roots (in a fixed order) of width at most `2^-bits`; `scale` is an
/// integer `M` such that `M` times every root is an algebraic integer.
pub(crate) fn rational_factor(
    p: &RationalPolynomial,
    target: usize,
    scale: &BigInt,
    enclose: impl Fn(u32) -> Result<Vec<ComplexBox>>,
) -> Result<RationalPolynomial> {
    let n = p.degree().unwrap();
    if n > MAX_RECOMBINATION_DEGREE {
        return Err(Error::Internal(format!("recombination over {n} roots is out of range")));
    }
    let scaled = p.scale_roots(scale);
    let m = Rat::from_integer(scale.clone());
    let others: Vec<usize> = (0..n).filter(|&k| k != target).collect();
    let size_bits = scaled.coeffs().iter().map(|c| c.numer().bits()).max().unwrap_or(1) as u32;
    for size in 1..=n {
        let mut prec = 48 + size_bits;
        let mut pending: Vec<Vec<usize>> = Vec::new();
        combinations(others.len(), size - 1, |idx| {
            let mut s: Vec<usize> = idx.iter().map(|&i| others[i]).collect();
            s.push(target);
            pending.push(s);
            Ok(false)
        })?;
        while !pending.is_empty() {
            let raw = enclose(prec)?;
            let boxes: Vec<ComplexBox> = raw.iter().map(|b| &ComplexBox::from_rat(&m, b.prec()) * b).collect();
            let mut still = Vec::new();
            for s in pending {
                match judge(&boxes, &s, boxes[0].prec()) {
                    Verdict::Reject => {}
                    Verdict::Undecided => still.push(s),
                    Verdict::Candidate(ints) => {
                        let q = RationalPolynomial::new(ints.into_iter().map(Rat::from_integer).collect());
                        let Some(co) = scaled.exact_div(&q) else { continue };
                        // the target root of the scaled polynomial is M·root
                        if root_of_first(&q, &co, &boxes[target]) {
                            return Ok(unscale(&q, scale));
                        }
                        still.push(s);
                    }
                }
            }
            pending = still;
            prec *= 2;
            if prec > 1 << 16 {
                return Err(Error::RootIsolation("factor recombination did not converge".into()));
            }
        }
    }
    Err(Error::Internal("no rational factor found".into()))
}

/// `true` when the cofactor is certified nonzero at the enclosed root
/// (so the root belongs to `q`).
fn root_of_first(_q: &RationalPolynomial, co: &RationalPolynomial, at: &ComplexBox) -> bool {
    let prec = at.prec();
    let mut acc = ComplexBox::zero(prec);
    for c in co.coeffs().iter().rev() {
        acc = &(&acc * at) + &ComplexBox::from_rat(c, prec);
    }
    !acc.contains_zero()
}

/// Undoes [`RationalPolynomial::scale_roots`].
fn unscale(q: &RationalPolynomial, scale: &BigInt) -> RationalPolynomial {
    let m = Rat::from_integer(scale.clone());
    let deg = q.degree().unwrap();
    let mut pow = Rat::one();
    let mut out = vec![Rat::zero(); deg + 1];
    for k in (0..=deg).rev() {
        out[k] = &q.coeff(k) / &pow;
        pow *= &m;
    }
    RationalPolynomial::new(out)
}
