//! Ordered formal simplices and sparse chains.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{format_rational, Field, Q};
use crate::spaces::Cover;

/// An ordered tuple of vertices; repeats allowed.
pub type Simplex = Vec<usize>;

/// Homogeneous finite linear combination of ordered simplices of dimension `q`.
/// Zero coefficients are never stored; iteration is lexicographic in the tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain<K> {
    q: usize,
    terms: BTreeMap<Simplex, K>,
}

impl<K: Field> Chain<K> {
    pub fn zero(q: usize) -> Self {
        Chain { q, terms: BTreeMap::new() }
    }

    pub fn simplex(s: Simplex) -> Self {
        let mut c = Chain::zero(s.len() - 1);
        c.add_term(s, K::one());
        c
    }

    pub fn from_terms(q: usize, terms: impl IntoIterator<Item = (Simplex, K)>) -> Result<Self> {
        let mut c = Chain::zero(q);
        for (s, k) in terms {
            if s.len() != q + 1 {
                return Err(Error::DimensionMismatch { expected: q, found: s.len().saturating_sub(1) });
            }
            c.add_term(s, k);
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, &K)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &[usize]) -> K {
        self.terms.get(s).cloned().unwrap_or_else(K::zero)
    }

    pub fn add_term(&mut self, s: Simplex, k: K) {
        debug_assert_eq!(s.len(), self.q + 1);
        if k.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(k);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().add(&k);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.q, other.q, "adding chains of different dimension");
        let mut out = self.clone();
        for (s, k) in &other.terms {
            out.add_term(s.clone(), k.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&K::one().neg()))
    }

    pub fn scale(&self, k: &K) -> Self {
        let mut out = Chain::zero(self.q);
        if k.is_zero() {
            return out;
        }
        for (s, v) in &self.terms {
            out.add_term(s.clone(), v.mul(k));
        }
        out
    }

    /// `∂(x₀ … x_q) = Σ (−1)^j (x₀ … x̂_j … x_q)`.
    pub fn boundary(&self) -> Result<Self> {
        if self.q == 0 {
            return Err(Error::ZeroDimensionalBoundary);
        }
        let mut out = Chain::zero(self.q - 1);
        for (s, k) in &self.terms {
            let neg = k.neg();
            for j in 0..s.len() {
                let mut face = s.clone();
                face.remove(j);
                out.add_term(face, if j % 2 == 0 { k.clone() } else { neg.clone() });
            }
        }
        Ok(out)
    }

    /// `∂c = 0`; every 0-chain counts as a cycle.
    pub fn is_cycle(&self) -> bool {
        self.q == 0 || self.boundary().map(|b| b.is_zero()).unwrap_or(false)
    }

    /// Cone with apex `a`: `(x₀ … x_q) ↦ (a x₀ … x_q)`.
    pub fn cone(&self, a: usize) -> Self {
        let mut out = Chain::zero(self.q + 1);
        for (s, k) in &self.terms {
            let mut t = Vec::with_capacity(s.len() + 1);
            t.push(a);
            t.extend_from_slice(s);
            out.add_term(t, k.clone());
        }
        out
    }

    /// `Σ |k_i|`; requires a real embedding of the coefficients.
    pub fn norm1(&self) -> Result<Q> {
        let mut total = Q::from_integer(0.into());
        for k in self.terms.values() {
            total += k.abs_rational().ok_or(Error::NoEmbedding)?;
        }
        Ok(total)
    }

    /// `f_♯(x₀ … x_q) = (f(x₀) … f(x_q))`.
    pub fn push_forward(&self, f: &[usize]) -> Self {
        let mut out = Chain::zero(self.q);
        for (s, k) in &self.terms {
            out.add_term(s.iter().map(|&v| f[v]).collect(), k.clone());
        }
        out
    }

    /// First simplex whose vertices lie in no single cover element.
    pub fn first_non_small(&self, cover: &Cover) -> Option<&Simplex> {
        self.terms.keys().find(|s| !cover.is_small(s))
    }

    pub fn is_small(&self, cover: &Cover) -> bool {
        self.first_non_small(cover).is_none()
    }

    /// Degenerate simplices go to 0; others to the sorted simplex times the
    /// sign of the sorting permutation.
    pub fn ordered_to_oriented(&self) -> Self {
        let mut out = Chain::zero(self.q);
        for (s, k) in &self.terms {
            if let Some((sorted, odd)) = orient(s) {
                out.add_term(sorted, if odd { k.neg() } else { k.clone() });
            }
        }
        out
    }

    /// Distinct vertices in the support.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Sorted form of a tuple with distinct entries and the parity of the sorting
/// permutation; `None` if some vertex repeats.
pub fn orient(s: &[usize]) -> Option<(Simplex, bool)> {
    let mut v = s.to_vec();
    let mut odd = false;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

impl Chain<Q> {
    /// `[{"simplex": [labels], "coeff": "p/q"}, …]` in lexicographic order.
    pub fn to_json(&self, labels: &[String]) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(s, k)| {
                    serde_json::json!({
                        "simplex": s.iter().map(|&v| labels[v].clone()).collect::<Vec<_>>(),
                        "coeff": format_rational(k),
                    })
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn ch(q_: usize, terms: &[(&[usize], i64)]) -> Chain<Q> {
        Chain::from_terms(q_, terms.iter().map(|(s, k)| (s.to_vec(), q(*k)))).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let (x, y, z) = (0, 1, 2);
        assert_eq!(ch(1, &[(&[x, y], 1)]).boundary().unwrap(), ch(0, &[(&[y], 1), (&[x], -1)]));
        assert_eq!(ch(2, &[(&[x, x, y], 1)]).boundary().unwrap(), ch(1, &[(&[x, x], 1)]));
        let s = ch(2, &[(&[x, y, z], 1)]);
        assert!(s.boundary().unwrap().boundary().unwrap().is_zero());
        assert!(matches!(ch(0, &[(&[x], 1)]).boundary(), Err(Error::ZeroDimensionalBoundary)));
    }

    #[test]
    fn cone_examples() {
        let (a, x, y) = (9, 0, 1);
        let s = ch(1, &[(&[x, y], 1)]);
        let lhs = s.cone(a).boundary().unwrap().add(&s.boundary().unwrap().cone(a));
        assert_eq!(lhs, s);
        assert!(Chain::<Q>::zero(1).cone(a).is_zero());
        // a 1-cycle in one cover element
        let c = ch(1, &[(&[0, 1], 1), (&[1, 2], 1), (&[2, 0], 1)]);
        assert_eq!(c.cone(5).boundary().unwrap(), c);
    }

    #[test]
    fn norm_and_smallness() {
        assert_eq!(Chain::<Q>::zero(1).norm1().unwrap(), q(0));
        assert_eq!(ch(1, &[(&[0, 1], 3), (&[1, 2], -2)]).norm1().unwrap(), q(5));
        let cover = Cover::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(ch(0, &[(&[0], 1), (&[2], 4)]).is_small(&cover));
        assert!(!ch(1, &[(&[0, 2], 1)]).is_small(&cover));
    }

    #[test]
    fn push_forward_examples() {
        let c = ch(1, &[(&[0, 1], 2), (&[1, 2], 1)]);
        assert_eq!(c.push_forward(&[0, 1, 2]), c);
        let konst = [7usize; 3];
        let k = ch(1, &[(&[0, 1], 1)]);
        assert_eq!(k.push_forward(&konst), ch(1, &[(&[7, 7], 1)]));
        assert_eq!(k.push_forward(&konst).boundary().unwrap(), k.boundary().unwrap().push_forward(&konst));
    }

    #[test]
    fn orientation_examples() {
        assert!(ch(1, &[(&[3, 3], 1)]).ordered_to_oriented().is_zero());
        assert_eq!(ch(1, &[(&[1, 0], 1)]).ordered_to_oriented(), ch(1, &[(&[0, 1], -1)]));
        assert_eq!(ch(2, &[(&[2, 0, 1], 1)]).ordered_to_oriented(), ch(2, &[(&[0, 1, 2], 1)]));
    }
}
