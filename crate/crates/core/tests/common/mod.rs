//! Fixtures, random generators and numeric oracles shared by the
//! integration tests. The oracles work with high-precision rational
//! approximations of the embedded values and never call the exact
//! decision procedures they are compared against.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semitor_core::field::{FieldElement, NumberField};
use semitor_core::lattice::{NormalizedLattice, SemiTorusLattice, Vector2};
use semitor_core::rational::{ratio, Rat};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(coeffs: &[i64], re: f64, im: f64) -> NumberField {
    NumberField::from_int_coeffs_near(coeffs, re, im).unwrap()
}

pub fn gaussian() -> NumberField {
    field(&[1, 0, 1], 0.0, 1.0)
}

/// `t^3 = 2`, complex root in the upper half-plane.
pub fn cubic() -> NumberField {
    field(&[-2, 0, 0, 1], -0.63, 1.09)
}

/// `t^3 = t + 1`, complex root in the upper half-plane.
pub fn cubic_plastic() -> NumberField {
    field(&[-1, -1, 0, 1], -0.662, 0.562)
}

pub fn zeta8() -> NumberField {
    field(&[1, 0, 0, 0, 1], 0.7, 0.7)
}

/// `Q(√-n)` as `Q[t]/(t^2 + n)` with `t = i√n`.
pub fn imag_quadratic(n: i64) -> NumberField {
    field(&[n, 0, 1], 0.0, (n as f64).sqrt())
}

pub fn standard(k: &NumberField, third: Vector2) -> SemiTorusLattice {
    SemiTorusLattice::validate(k, [[k.one(), k.zero()], [k.zero(), k.one()], third]).unwrap()
}

pub fn split_fixture() -> SemiTorusLattice {
    let k = gaussian();
    standard(&k, [k.zero(), k.generator()])
}

pub fn cubic_fixture() -> SemiTorusLattice {
    let k = cubic();
    let t = k.generator();
    standard(&k, [t.clone(), t.pow(2)])
}

pub fn generic_fixture() -> SemiTorusLattice {
    let k = zeta8();
    let z = k.generator();
    standard(&k, [z.pow(2), &z + &z.pow(3)])
}

pub fn random_rational(rng: &mut ChaCha8Rng, h: i64) -> Rat {
    ratio(rng.gen_range(-h..=h), rng.gen_range(1..=h))
}

pub fn random_int_element(rng: &mut ChaCha8Rng, k: &NumberField, h: i64) -> FieldElement {
    k.element_from_ints(&(0..k.degree()).map(|_| rng.gen_range(-h..=h)).collect::<Vec<_>>())
}

pub fn random_element(rng: &mut ChaCha8Rng, k: &NumberField, h: i64) -> FieldElement {
    k.element((0..k.degree()).map(|_| random_rational(rng, h)).collect())
}

pub fn random_nonrational(rng: &mut ChaCha8Rng, k: &NumberField, h: i64) -> FieldElement {
    loop {
        let x = random_element(rng, k, h);
        if x.as_rational().is_none() {
            return x;
        }
    }
}

/// Element with strictly positive imaginary part.
pub fn random_upper(rng: &mut ChaCha8Rng, k: &NumberField, h: i64) -> FieldElement {
    loop {
        let x = random_element(rng, k, h);
        let im = x.approx().im;
        if im.abs() > 1e-6 {
            return if im > 0.0 { x } else { -&x };
        }
    }
}

/// Product of random elementary integer matrices.
pub fn random_unimodular(rng: &mut ChaCha8Rng, steps: usize) -> [[i64; 3]; 3] {
    let mut m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..steps {
        let i = rng.gen_range(0..3);
        let j = (i + rng.gen_range(1..3)) % 3;
        let c = rng.gen_range(-2..=2);
        for k in 0..3 {
            m[i][k] += c * m[j][k];
        }
        if rng.gen_bool(0.3) {
            m.swap(i, j);
        }
    }
    m
}

/// The same lattice with a random unimodular change of generators and a
/// random invertible rational change of coordinates of `C^2`.
pub fn scramble(l: &SemiTorusLattice, rng: &mut ChaCha8Rng) -> SemiTorusLattice {
    let u = random_unimodular(rng, 6);
    let k = l.field().clone();
    let (a, b, c, d) = loop {
        let v: Vec<Rat> = (0..4).map(|_| Rat::from_integer(rng.gen_range(-2..=2).into())).collect();
        if !(&v[0] * &v[3] - &v[1] * &v[2]).is_zero() {
            break (v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone());
        }
    };
    let gens: Vec<Vector2> = (0..3)
        .map(|i| {
            let v = l.combine(&u[i].iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
            [&v[0].scale(&a) + &v[1].scale(&b), &v[0].scale(&c) + &v[1].scale(&d)]
        })
        .collect();
    SemiTorusLattice::validate(&k, gens.try_into().unwrap()).unwrap()
}

pub const ORACLE_BITS: u32 = 200;

/// `10^-40`
pub fn tolerance() -> Rat {
    Rat::new(1.into(), num_traits::pow(BigInt::from(10), 40))
}

fn approx(x: &FieldElement) -> (Rat, Rat) {
    x.enclose(ORACLE_BITS).unwrap().mid()
}

fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut d = Rat::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs())) else { return Rat::zero() };
        if a[p][c].is_zero() {
            return Rat::zero();
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d
}

/// Real coordinates `(Re z1, Im z1, Re z2, Im z2)`.
pub fn real_row(v: &Vector2) -> Vec<Rat> {
    let (a, b) = approx(&v[0]);
    let (c, d) = approx(&v[1]);
    vec![a, b, c, d]
}

/// Numeric rank of the 3×4 real coordinate matrix of three vectors.
pub fn numeric_real_rank_is_3(gens: &[Vector2; 3]) -> bool {
    let rows: Vec<Vec<Rat>> = gens.iter().map(real_row).collect();
    let tol = tolerance();
    (0..4).any(|skip| {
        let minor: Vec<Vec<Rat>> = rows.iter().map(|r| (0..4).filter(|&c| c != skip).map(|c| r[c].clone()).collect()).collect();
        det(&minor).abs() > tol
    })
}

/// Whether `i·γ` is a real combination of `e1, e2, (α, β)`, decided by the
/// determinant of the 4×4 real system at 10^-40.
pub fn numeric_in_h(n: &NormalizedLattice, t: &[Rat; 3]) -> bool {
    let k = n.field();
    let g = n.gamma(t);
    let cols = [real_row(&[k.one(), k.zero()]), real_row(&[k.zero(), k.one()]), real_row(&[n.alpha().clone(), n.beta().clone()])];
    let r = real_row(&g);
    let ig = vec![-r[1].clone(), r[0].clone(), -r[3].clone(), r[2].clone()];
    let m: Vec<Vec<Rat>> = (0..4).map(|i| vec![cols[0][i].clone(), cols[1][i].clone(), cols[2][i].clone(), ig[i].clone()]).collect();
    det(&m).abs() < tolerance()
}

/// Rank over Q of a rational matrix, by plain elimination.
pub fn rational_rank(m: &[Vec<Rat>]) -> usize {
    let mut a = m.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for k in c..cols {
                    let t = &f * &a[r][k];
                    a[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}
