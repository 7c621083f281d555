//! Certified isolation and refinement of complex roots of rational polynomials.
//!
//! Approximations come from an Aberth iteration in `f64`, are polished by
//! Newton steps in fixed-point arithmetic, and are then certified with the
//! Krawczyk test: for a box `X` with centre `z`, if
//! `K(X) = z - Y f(z) + (1 - Y f'(X)) (X - z)` lies in the interior of `X`
//! then `X` contains exactly one root of `f` (and that root lies in `K(X)`).

use std::sync::RwLock;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{ComplexBox, IntervalRect};
use crate::poly::RationalPolynomial;
use crate::rational::Rat;

/// Horner evaluation of a rational polynomial over a complex box.
pub fn eval_box(poly: &RationalPolynomial, z: &ComplexBox) -> ComplexBox {
    let prec = z.prec();
    let mut acc = ComplexBox::zero(prec);
    for c in poly.coeffs().iter().rev() {
        acc = &(&acc * z) + &ComplexBox::from_rat(c, prec);
    }
    acc
}

fn to_c64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Simultaneous approximation of all roots (Aberth–Ehrlich).
pub fn approximate_roots(poly: &RationalPolynomial) -> Vec<Complex64> {
    let n = match poly.degree() {
        None | Some(0) => return Vec::new(),
        Some(n) => n,
    };
    let coeffs: Vec<f64> = poly.monic().coeffs().iter().map(to_c64).collect();
    if n == 1 {
        return vec![Complex64::new(-coeffs[0], 0.0)];
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let radius = 1.0 + coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut converged = true;
        for k in 0..n {
            let (p, dp) = eval(zs[k]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (zs[k] - zs[j]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * repulsion);
            if !w.is_finite() {
                continue;
            }
            zs[k] -= w;
            if w.norm() > 1e-14 * (1.0 + zs[k].norm()) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    zs
}

fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

/// Round `q` to a multiple of `2^-prec`.
fn round_dyadic(q: &Rat, prec: u32) -> Rat {
    let scale = num_bigint::BigInt::one() << prec;
    let n = (q * Rat::from_integer(scale.clone())).round().to_integer();
    Rat::new(n, scale)
}

/// One Newton step at working precision `prec`; returns the new point and the
/// step size (max-norm of the correction).
fn newton_step(poly: &RationalPolynomial, deriv: &RationalPolynomial, z: &(Rat, Rat), prec: u32) -> Option<((Rat, Rat), Rat)> {
    let zb = ComplexBox::from_point(&z.0, &z.1, prec + 16);
    let (fr, fi) = eval_box(poly, &zb).mid();
    let (dr, di) = eval_box(deriv, &zb).mid();
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    // (fr + i fi) / (dr + i di)
    let sr = (&fr * &dr + &fi * &di) / &den;
    let si = (&fi * &dr - &fr * &di) / &den;
    let step = if sr.abs() > si.abs() { sr.abs() } else { si.abs() };
    let next = (round_dyadic(&(&z.0 - &sr), prec), round_dyadic(&(&z.1 - &si), prec));
    Some((next, step))
}

/// Krawczyk test on the square box of half-width `radius` around `z`.
/// Returns the contracted box on success.
fn krawczyk(poly: &RationalPolynomial, deriv: &RationalPolynomial, z: &(Rat, Rat), radius: &Rat, prec: u32) -> Option<IntervalRect> {
    let x_rect = IntervalRect::around(&z.0, &z.1, radius);
    let xb = ComplexBox::from_rect(&x_rect, prec);
    let zb = ComplexBox::from_point(&z.0, &z.1, prec);
    let fz = eval_box(poly, &zb);
    let (dr, di) = eval_box(deriv, &zb).mid();
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    let y = ComplexBox::from_point(&round_dyadic(&(&dr / &den), prec), &round_dyadic(&(-&di / &den), prec), prec);
    let fpx = eval_box(deriv, &xb);
    let one = ComplexBox::from_rat(&Rat::one(), prec);
    let k = &(&zb - &(&y * &fz)) + &(&(&one - &(&y * &fpx)) * &(&xb - &zb));
    xb.strictly_contains(&k).then(|| k.to_rect())
}

/// Largest `k` with `r < 2^-k` guaranteed (0 when `r >= 1/2`).
fn bits_of_radius(r: &Rat) -> u32 {
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    (db - nb - 1).max(0) as u32
}

/// Certifies a root near `start`; the returned rectangle contains exactly
/// one root. When `within` is given, the certified box must lie inside it.
fn certify_near(
    poly: &RationalPolynomial,
    deriv: &RationalPolynomial,
    start: (Rat, Rat),
    target_bits: u32,
    within: Option<&IntervalRect>,
) -> Result<IntervalRect> {
    let mut z = start;
    let mut prec = (target_bits + 24).max(64);
    for _attempt in 0..8 {
        let mut step = Rat::one();
        for _ in 0..200 {
            match newton_step(poly, deriv, &z, prec) {
                Some((next, s)) => {
                    z = next;
                    let done = s.is_zero() || bits_of_radius(&s) > prec - 4;
                    step = s;
                    if done {
                        break;
                    }
                }
                None => break,
            }
        }
        let floor_radius = Rat::new(1.into(), num_bigint::BigInt::one() << (target_bits + 2));
        let mut radius = &step * Rat::from_integer(4.into());
        let ulp = Rat::new(1.into(), num_bigint::BigInt::one() << (prec - 12));
        if radius < ulp {
            radius = ulp;
        }
        for _ in 0..4 {
            let work = bits_of_radius(&radius) + 24;
            if let Some(rect) = krawczyk(poly, deriv, &z, &radius, work.max(prec)) {
                let x_rect = IntervalRect::around(&z.0, &z.1, &radius);
                let inside = within.map_or(true, |w| w.contains(&x_rect));
                if inside && rect.width() <= &floor_radius * Rat::from_integer(4.into()) {
                    return Ok(rect);
                }
                if inside && radius > floor_radius {
                    // certified but too wide: shrink the radius
                    radius = floor_radius.clone();
                    continue;
                }
            }
            radius *= Rat::from_integer(16.into());
        }
        prec = prec * 2;
    }
    Err(Error::RootIsolation("Krawczyk certification did not succeed".into()))
}

/// Certified, pairwise disjoint boxes for all roots of a squarefree polynomial.
pub fn isolate_all(poly: &RationalPolynomial) -> Result<Vec<IntervalRect>> {
    let deriv = poly.derivative();
    let approx = approximate_roots(poly);
    let mut boxes = Vec::with_capacity(approx.len());
    for a in approx {
        let start = (rat_from_f64(a.re), rat_from_f64(a.im));
        boxes.push(certify_near(poly, &deriv, start, 40, None)?);
    }
    for i in 0..boxes.len() {
        for j in 0..i {
            if boxes[i].intersects(&boxes[j]) {
                return Err(Error::RootIsolation("approximations collapsed onto one root".into()));
            }
        }
    }
    Ok(boxes)
}

/// A certified root together with a cache of its best enclosure.
#[derive(Debug)]
pub struct RootCell {
    isolating: IntervalRect,
    best: RwLock<(u32, IntervalRect)>,
}

impl Clone for RootCell {
    fn clone(&self) -> Self {
        let best = self.best.read().unwrap().clone();
        Self { isolating: self.isolating.clone(), best: RwLock::new(best) }
    }
}

impl RootCell {
    pub fn new(isolating: IntervalRect) -> Self {
        let bits = bits_of_radius(&isolating.width());
        Self { best: RwLock::new((bits, isolating.clone())), isolating }
    }

    /// Box certified to isolate this root among all roots.
    pub fn isolating(&self) -> &IntervalRect {
        &self.isolating
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn refine(&self, poly: &RationalPolynomial, bits: u32) -> Result<IntervalRect> {
        {
            let best = self.best.read().unwrap();
            if best.0 >= bits {
                return Ok(best.1.clone());
            }
        }
        let deriv = poly.derivative();
        let start = self.best.read().unwrap().1.center();
        let rect = certify_near(poly, &deriv, start, bits, Some(&self.isolating))?;
        let mut best = self.best.write().unwrap();
        if best.0 < bits {
            *best = (bits, rect.clone());
        }
        Ok(rect)
    }
}

/// Enclosure of `poly` at a root box, as a helper for callers that only need a value.
pub fn eval_at_rect(poly: &RationalPolynomial, rect: &IntervalRect, prec: u32) -> ComplexBox {
    eval_box(poly, &ComplexBox::from_rect(rect, prec))
}
