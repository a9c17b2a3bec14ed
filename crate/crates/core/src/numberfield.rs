//! Elements of ℚ(λ) = ℚ[t]/(P) for an irreducible `P`, stored as residue
//! polynomials of degree below `deg P`. Rationals carry no modulus and mix
//! with any field element, so `Field::zero()` and `Field::one()` make sense.

use std::sync::Arc;

use num_traits::Signed;

use crate::field::{format_rational, Field, Q};
use crate::poly::RatPolynomial;

#[derive(Clone, Debug)]
pub struct NumberFieldElement {
    modulus: Option<Arc<RatPolynomial>>,
    residue: RatPolynomial,
}

impl NumberFieldElement {
    /// The class of `t`, i.e. a root `λ` of `modulus`.
    pub fn generator(modulus: Arc<RatPolynomial>) -> Self {
        Self::from_residue(modulus, RatPolynomial::t())
    }

    pub fn from_residue(modulus: Arc<RatPolynomial>, r: RatPolynomial) -> Self {
        assert!(modulus.degree().unwrap_or(0) >= 1, "modulus must have positive degree");
        let residue = r.rem(&modulus);
        NumberFieldElement { modulus: Some(modulus), residue }
    }

    pub fn rational(q: Q) -> Self {
        NumberFieldElement { modulus: None, residue: RatPolynomial::constant(q) }
    }

    pub fn residue(&self) -> &RatPolynomial {
        &self.residue
    }

    pub fn modulus(&self) -> Option<&Arc<RatPolynomial>> {
        self.modulus.as_ref()
    }

    /// The rational value when the residue is constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self.residue.degree() {
            None => Some(<Q as Field>::zero()),
            Some(0) => Some(self.residue.coeff(0)),
            _ => None,
        }
    }

    pub fn display_in(&self, var: &str) -> String {
        self.residue.display_in(var)
    }

    fn common_modulus(&self, other: &Self) -> Option<Arc<RatPolynomial>> {
        match (&self.modulus, &other.modulus) {
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b) || a == b, "elements of different number fields");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    fn build(modulus: Option<Arc<RatPolynomial>>, r: RatPolynomial) -> Self {
        match modulus {
            Some(m) => Self::from_residue(m, r),
            None => NumberFieldElement { modulus: None, residue: r },
        }
    }
}

impl PartialEq for NumberFieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.residue == other.residue
    }
}

impl Field for NumberFieldElement {
    fn zero() -> Self {
        Self::rational(<Q as Field>::zero())
    }

    fn one() -> Self {
        Self::rational(<Q as Field>::one())
    }

    fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        Self::build(self.common_modulus(other), self.residue.add(&other.residue))
    }

    fn sub(&self, other: &Self) -> Self {
        Self::build(self.common_modulus(other), self.residue.sub(&other.residue))
    }

    fn mul(&self, other: &Self) -> Self {
        Self::build(self.common_modulus(other), self.residue.mul(&other.residue))
    }

    fn neg(&self) -> Self {
        Self::build(self.modulus.clone(), self.residue.scale(&-<Q as Field>::one()))
    }

    /// Extended Euclid against the modulus.
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let Some(m) = &self.modulus else {
            return Some(Self::rational(self.residue.coeff(0).recip()));
        };
        let (mut r0, mut r1) = ((**m).clone(), self.residue.clone());
        let (mut s0, mut s1) = (RatPolynomial::zero(), RatPolynomial::one());
        while !r1.is_zero() {
            let (quo, rem) = r0.divrem(&r1);
            let s2 = s0.sub(&quo.mul(&s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant because the modulus is irreducible
        debug_assert_eq!(r0.degree(), Some(0));
        let c = r0.coeff(0).recip();
        Some(Self::from_residue(m.clone(), s0.scale(&c)))
    }

    fn from_rational(q: &Q) -> Self {
        Self::rational(q.clone())
    }

    fn abs_rational(&self) -> Option<Q> {
        self.as_rational().map(|q| q.abs())
    }

    fn pivot_weight(&self) -> u64 {
        self.residue.coeffs().iter().map(|c| c.numer().bits() + c.denom().bits()).sum()
    }
}

impl std::fmt::Display for NumberFieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.as_rational() {
            Some(q) => f.write_str(&format_rational(&q)),
            None => f.write_str(&self.display_in("λ")),
        }
    }
}
