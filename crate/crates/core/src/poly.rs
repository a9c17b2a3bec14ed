//! Univariate polynomials over ℚ and their factorization into irreducibles.
//!
//! Factoring goes square-free decomposition → primitive integer polynomial →
//! complete factorization modulo a prime larger than twice the coefficient
//! bound of any integer factor → recombination of modular factors by trial
//! division. The output is checked by multiplying back.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{format_rational, Q};
use crate::linalg::Matrix;

pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Coefficients in ascending degree; no trailing zeros, so the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPolynomial {
    coeffs: Vec<Q>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        RatPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::new(vec![Q::zero(), Q::one()])
    }

    /// `t − a`.
    pub fn linear(a: &Q) -> Self {
        Self::new(vec![-a.clone(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        Self::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn divides(&self, p: &Self) -> bool {
        p.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        self.mul(other).divrem(&self.gcd(other)).0.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * Q::from_integer(k.into())).collect())
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: num_complex::Complex64) -> num_complex::Complex64 {
        self.coeffs.iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * x + crate::field::to_f64(c))
    }

    /// `p(M)`.
    pub fn eval_matrix(&self, m: &Matrix<Q>) -> Matrix<Q> {
        let n = m.rows();
        let mut acc = Matrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&Matrix::identity(n).scale(c));
        }
        acc
    }

    /// `p(M)v` by Horner's scheme on the vector.
    pub fn apply(&self, m: &Matrix<Q>, v: &[Q]) -> Vec<Q> {
        let mut acc = vec![Q::zero(); v.len()];
        for c in self.coeffs.iter().rev() {
            acc = m.mul_vec(&acc);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += c * x;
            }
        }
        acc
    }

    /// Coefficients as exact strings, ascending degree.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "coefficients_ascending": self.coefficient_strings(),
            "degree": self.degree(),
            "text": self.to_string(),
        })
    }

    /// Human-readable form in the variable `var`.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&format_rational(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{mono}", format_rational(&a)));
            }
        }
        out
    }

    /// Clears denominators and content: a primitive integer polynomial with
    /// positive leading coefficient, as a multiple of `self` by a nonzero rational.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_zero() {
            for c in &mut ints {
                *c /= &content;
            }
        }
        if ints.last().is_some_and(|c| c.is_negative()) {
            for c in &mut ints {
                *c = -c.clone();
            }
        }
        ints
    }

    fn from_integers(ints: &[BigInt]) -> Self {
        Self::new(ints.iter().map(|c| Q::from_integer(c.clone())).collect())
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

/// `∏ factor^multiplicity` times `leading`, factors monic.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub leading: Q,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub poly: RatPolynomial,
    pub multiplicity: usize,
    /// False when the square-free part exceeded the degree cap and was left whole.
    pub irreducible: bool,
}

impl Factorization {
    pub fn product(&self) -> RatPolynomial {
        self.factors
            .iter()
            .fold(RatPolynomial::constant(self.leading.clone()), |acc, f| acc.mul(&f.poly.pow(f.multiplicity)))
    }
}

/// Yun's algorithm: monic square-free `a_i` with `monic(p) = ∏ a_i^i`.
pub fn squarefree_decomposition(p: &RatPolynomial) -> Vec<(RatPolynomial, usize)> {
    let f = p.monic();
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let fp = f.derivative();
    let mut a = f.gcd(&fp);
    let mut b = f.divrem(&a).0;
    let mut c = fp.divrem(&a).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.divrem(&a).0;
        c = d.divrem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Exact factorization into monic irreducibles; errors above `cap`.
pub fn factor_poly(p: &RatPolynomial, cap: usize) -> Result<Factorization> {
    let deg = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Precondition("factorization needs a polynomial of degree at least 1".into()))?;
    if deg > cap {
        return Err(Error::DegreeCap { degree: deg, cap });
    }
    Ok(factor_partial(p, cap))
}

/// Like [`factor_poly`], but square-free parts above `cap` are kept whole and
/// flagged instead of failing.
pub fn factor_partial(p: &RatPolynomial, cap: usize) -> Factorization {
    let mut factors = Vec::new();
    for (a, mult) in squarefree_decomposition(p) {
        if a.degree().unwrap_or(0) > cap {
            factors.push(Factor { poly: a, multiplicity: mult, irreducible: false });
            continue;
        }
        for g in factor_squarefree(&a) {
            factors.push(Factor { poly: g, multiplicity: mult, irreducible: true });
        }
    }
    factors.sort_by(|x, y| {
        (x.poly.degree(), x.poly.coefficient_strings()).cmp(&(y.poly.degree(), y.poly.coefficient_strings()))
    });
    let out = Factorization { leading: p.leading(), factors };
    assert_eq!(out.product(), *p, "factorization does not multiply back");
    out
}

/// Monic irreducible factors of a square-free polynomial of positive degree.
fn factor_squarefree(a: &RatPolynomial) -> Vec<RatPolynomial> {
    if a.degree() == Some(1) {
        return vec![a.monic()];
    }
    let f = a.primitive_integer();
    let n = f.len() - 1;
    let lc = f[n].clone();
    // any integer factor g of f has |g_i| ≤ 2^n ‖f‖₂; candidates are lc·g
    let max = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = &lc * (BigInt::one() << n) * BigInt::from(n + 1) * max;
    let mut p: BigInt = (&bound << 1) + 1u32;
    let modular = loop {
        p = next_prime(&p);
        if (&lc % &p).is_zero() {
            continue;
        }
        let fp = ModPoly::from_ints(&f, &p);
        if fp.derivative().gcd(&fp).degree() == 0 {
            break factor_mod_p(&fp);
        }
    };
    let mut remaining = modular;
    let mut current = RatPolynomial::from_integers(&f);
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut hit = None;
        for subset in combinations(remaining.len(), size) {
            let lcc = current.primitive_integer().last().unwrap().clone();
            let mut g = ModPoly::constant(&lcc, &p);
            for &i in &subset {
                g = g.mul(&remaining[i]);
            }
            let cand = RatPolynomial::from_integers(&g.symmetric()).primitive_integer();
            let cand = RatPolynomial::from_integers(&cand);
            if cand.degree().unwrap_or(0) > 0 && cand.divides(&current) {
                hit = Some((subset, cand));
                break;
            }
        }
        match hit {
            Some((subset, cand)) => {
                current = current.divrem(&cand).0;
                found.push(cand.monic());
                remaining =
                    remaining.into_iter().enumerate().filter(|(i, _)| !subset.contains(i)).map(|(_, u)| u).collect();
            }
            None => size += 1,
        }
    }
    if current.degree().unwrap_or(0) > 0 {
        found.push(current.monic());
    }
    found
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn is_probable_prime(n: &BigInt) -> bool {
    let small = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    if n < &BigInt::from(2) {
        return false;
    }
    for &s in &small {
        let s = BigInt::from(s);
        if n == &s {
            return true;
        }
        if (n % &s).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut r = 0;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for &a in &small {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn next_prime(from: &BigInt) -> BigInt {
    let mut c = from.clone();
    if c.is_even() {
        c += 1;
    }
    while !is_probable_prime(&c) {
        c += 2;
    }
    c
}

/// Polynomial over ℤ/p, coefficients reduced to `0..p`, ascending degree.
#[derive(Clone, Debug, PartialEq)]
struct ModPoly {
    c: Vec<BigInt>,
    p: BigInt,
}

impl ModPoly {
    fn new(mut c: Vec<BigInt>, p: &BigInt) -> Self {
        for x in &mut c {
            *x = x.mod_floor(p);
        }
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ModPoly { c, p: p.clone() }
    }

    fn from_ints(f: &[BigInt], p: &BigInt) -> Self {
        Self::new(f.to_vec(), p)
    }

    fn constant(a: &BigInt, p: &BigInt) -> Self {
        Self::new(vec![a.clone()], p)
    }

    fn x(p: &BigInt) -> Self {
        Self::new(vec![BigInt::zero(), BigInt::one()], p)
    }

    /// Zero polynomial has degree 0 here; callers check `is_zero` when it matters.
    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn inv(&self, a: &BigInt) -> BigInt {
        a.modpow(&(&self.p - 2u32), &self.p)
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let li = self.inv(self.c.last().unwrap());
        Self::new(self.c.iter().map(|x| x * &li).collect(), &self.p)
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let z = BigInt::zero();
        Self::new((0..n).map(|k| self.c.get(k).unwrap_or(&z) - o.c.get(k).unwrap_or(&z)).collect(), &self.p)
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(Vec::new(), &self.p);
        }
        let mut out = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out, &self.p)
    }

    fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree();
        let li = self.inv(d.c.last().expect("nonzero divisor"));
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return (Self::new(Vec::new(), &self.p), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = (&rem[k + dd] * &li).mod_floor(&self.p);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                rem[k + j] = (&rem[k + j] - &c * dj).mod_floor(&self.p);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot, &self.p), Self::new(rem, &self.p))
    }

    fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(k, x)| x * BigInt::from(k)).collect(), &self.p)
    }

    fn powmod(&self, e: &BigInt, m: &Self) -> Self {
        let mut result = Self::constant(&BigInt::one(), &self.p);
        let mut base = self.rem(m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        result
    }

    /// Coefficients lifted to the symmetric range `(−p/2, p/2]`.
    fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.p >> 1;
        self.c.iter().map(|x| if x > &half { x - &self.p } else { x.clone() }).collect()
    }
}

/// Monic irreducible factors of a square-free polynomial mod an odd prime:
/// distinct-degree splitting, then Cantor–Zassenhaus with a fixed seed.
fn factor_mod_p(f: &ModPoly) -> Vec<ModPoly> {
    let p = f.p.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let mut rest = f.monic();
    let mut out = Vec::new();
    let x = ModPoly::x(&p);
    let mut h = x.clone();
    let mut d = 1;
    while rest.degree() >= 2 * d {
        h = h.powmod(&p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() > 0 {
            out.extend(equal_degree_split(&g, d, &mut rng));
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
        d += 1;
    }
    if rest.degree() > 0 {
        out.push(rest.monic());
    }
    out.sort_by(|a, b| (a.degree(), &a.c).cmp(&(b.degree(), &b.c)));
    out
}

fn equal_degree_split(g: &ModPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    if g.degree() == d {
        return vec![g.monic()];
    }
    let p = &g.p;
    let e: BigInt = (p.pow(d as u32) - 1u32) >> 1;
    let word = p.to_u64().unwrap_or(u64::MAX);
    loop {
        let a = ModPoly::new((0..g.degree()).map(|_| BigInt::from(rng.random_range(0..word))).collect(), p);
        if a.degree() == 0 {
            continue;
        }
        let b = a.powmod(&e, g).sub(&ModPoly::constant(&BigInt::one(), p));
        let h = b.gcd(g);
        if h.degree() > 0 && h.degree() < g.degree() {
            let mut out = equal_degree_split(&h, d, rng);
            out.extend(equal_degree_split(&g.divrem(&h).0, d, rng));
            return out;
        }
    }
}
