//! Alexander–Spanier cochains at a fixed scale.
//!
//! A cochain only stores values on tuples that are small for its scale cover;
//! values elsewhere are never represented, which is the same as working modulo
//! cochains that vanish on small tuples.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::chains::{orient, Chain, Simplex};
use crate::error::{Error, Result};
use crate::field::{format_rational, Field, Q};
use crate::spaces::{pullback_cover, refines, Cover};

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<K> {
    q: usize,
    scale: Arc<Cover>,
    values: BTreeMap<Simplex, K>,
}

impl<K: Field> Cochain<K> {
    pub fn zero(q: usize, scale: Arc<Cover>) -> Self {
        Cochain { q, scale, values: BTreeMap::new() }
    }

    pub fn from_entries(q: usize, scale: Arc<Cover>, entries: impl IntoIterator<Item = (Simplex, K)>) -> Result<Self> {
        let mut x = Cochain::zero(q, scale);
        for (t, v) in entries {
            if t.len() != q + 1 {
                return Err(Error::DimensionMismatch { expected: q, found: t.len().saturating_sub(1) });
            }
            if !x.scale.is_small(&t) {
                return Err(Error::NotSmall { simplex: t });
            }
            x.set(t, v);
        }
        Ok(x)
    }

    /// Alternating extension of values on oriented simplices: every permutation
    /// of a listed simplex gets the value times the permutation sign.
    pub fn alternating(q: usize, scale: Arc<Cover>, oriented: impl IntoIterator<Item = (Simplex, K)>) -> Result<Self> {
        let mut x = Cochain::zero(q, scale);
        for (s, v) in oriented {
            if v.is_zero() {
                continue;
            }
            if s.len() != q + 1 {
                return Err(Error::DimensionMismatch { expected: q, found: s.len().saturating_sub(1) });
            }
            if !x.scale.is_small(&s) {
                return Err(Error::NotSmall { simplex: s });
            }
            for p in permutations(&s) {
                let (_, odd) = orient(&p).expect("distinct vertices");
                x.set(p, if odd { v.neg() } else { v.clone() });
            }
        }
        Ok(x)
    }

    fn set(&mut self, t: Simplex, v: K) {
        if v.is_zero() {
            self.values.remove(&t);
        } else {
            self.values.insert(t, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.q
    }

    pub fn scale(&self) -> &Arc<Cover> {
        &self.scale
    }

    pub fn value(&self, t: &[usize]) -> K {
        self.values.get(t).cloned().unwrap_or_else(K::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Simplex, &K)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.q, other.q);
        let mut out = self.clone();
        for (t, v) in &other.values {
            let s = out.value(t).add(v);
            out.set(t.clone(), s);
        }
        out
    }

    pub fn scale_by(&self, k: &K) -> Self {
        let mut out = Cochain::zero(self.q, self.scale.clone());
        for (t, v) in &self.values {
            out.set(t.clone(), v.mul(k));
        }
        out
    }

    /// `(δx)(x₀,…,x_{q+1}) = Σ_{j=0}^{q+1} (−1)^j x(x₀,…,x̂_j,…,x_{q+1})` on small tuples.
    pub fn coboundary(&self) -> Self {
        let mut candidates = BTreeSet::new();
        for t in self.values.keys() {
            let mut reach = BTreeSet::new();
            for &e in self.scale.elements_containing(t[0]) {
                if t.iter().all(|&v| self.scale.contains(e, v)) {
                    reach.extend(self.scale.element(e).iter().copied());
                }
            }
            for j in 0..=t.len() {
                for &v in &reach {
                    let mut u = t.clone();
                    u.insert(j, v);
                    candidates.insert(u);
                }
            }
        }
        let mut out = Cochain::zero(self.q + 1, self.scale.clone());
        for u in candidates {
            let v = self.alternating_face_sum(&u);
            out.set(u, v);
        }
        out
    }

    fn alternating_face_sum(&self, u: &[usize]) -> K {
        let mut acc = K::zero();
        for j in 0..u.len() {
            let mut face = u.to_vec();
            face.remove(j);
            let v = self.value(&face);
            if !v.is_zero() {
                acc = if j % 2 == 0 { acc.add(&v) } else { acc.sub(&v) };
            }
        }
        acc
    }

    pub fn is_cocycle(&self) -> bool {
        self.coboundary().is_zero()
    }

    /// `x(Σ k_i σ_i) = Σ k_i x(σ_i)`; the chain must be small for the scale.
    pub fn evaluate(&self, c: &Chain<K>) -> Result<K> {
        if c.dim() != self.q && !c.is_zero() {
            return Err(Error::DimensionMismatch { expected: self.q, found: c.dim() });
        }
        if let Some(s) = c.first_non_small(&self.scale) {
            return Err(Error::NotSmall { simplex: s.clone() });
        }
        Ok(c.terms().fold(K::zero(), |acc, (s, k)| {
            let v = self.value(s);
            if v.is_zero() {
                acc
            } else {
                acc.add(&k.mul(&v))
            }
        }))
    }

    /// `(f^♯x)(t) = x(f(t))` on tuples small for `target`, which must refine
    /// `f⁻¹(scale)`.
    pub fn pull_back(&self, f: &[usize], target: Arc<Cover>) -> Result<Self> {
        let pulled = pullback_cover(f, &self.scale)?;
        if !refines(&target, &pulled)? {
            return Err(Error::NotRefinement("target scale does not refine the pulled-back cover".into()));
        }
        let mut preimage: Vec<Vec<usize>> = vec![Vec::new(); self.scale.n_vertices()];
        for (x, &y) in f.iter().enumerate() {
            preimage[y].push(x);
        }
        let mut out = Cochain::zero(self.q, target);
        for (s, v) in &self.values {
            let lists: Vec<&[usize]> = s.iter().map(|&y| preimage[y].as_slice()).collect();
            for t in cartesian(&lists) {
                if out.scale.is_small(&t) {
                    out.values.insert(t, v.clone());
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute value taken (0 for the zero cochain).
    pub fn sup_norm(&self) -> Result<Q> {
        let mut best = Q::from_integer(0.into());
        for v in self.values.values() {
            let a = v.abs_rational().ok_or(Error::NoEmbedding)?;
            if a > best {
                best = a;
            }
        }
        Ok(best)
    }
}

impl Cochain<Q> {
    pub fn to_json(&self, labels: &[String], scale_ref: &str) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "scale": scale_ref,
            "entries": self.values.iter().map(|(t, v)| serde_json::json!({
                "tuple": t.iter().map(|&x| labels[x].clone()).collect::<Vec<_>>(),
                "value": format_rational(v),
            })).collect::<Vec<_>>(),
        })
    }
}

fn cartesian(lists: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for &x in *l {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn permutations(s: &[usize]) -> Vec<Vec<usize>> {
    if s.len() <= 1 {
        return vec![s.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..s.len() {
        let mut rest = s.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn triangle_scale() -> Arc<Cover> {
        Arc::new(Cover::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap())
    }

    #[test]
    fn coboundary_of_zero_cochain() {
        let g = Cochain::from_entries(0, triangle_scale(), vec![(vec![0], q(5)), (vec![1], q(2))]).unwrap();
        let dg = g.coboundary();
        assert_eq!(dg.value(&[0, 1]), q(-3));
        assert_eq!(dg.value(&[1, 0]), q(3));
        assert_eq!(dg.value(&[0, 0]), q(0));
        assert_eq!(dg.value(&[2, 3]), q(0));
        assert_eq!(dg.value(&[1, 2]), q(-2));
        assert!(dg.coboundary().is_zero());
    }

    #[test]
    fn constant_has_zero_coboundary() {
        let g = Cochain::from_entries(0, triangle_scale(), (0..4).map(|v| (vec![v], q(7)))).unwrap();
        assert!(g.coboundary().is_zero());
    }

    #[test]
    fn evaluation() {
        let x = Cochain::from_entries(1, triangle_scale(), vec![(vec![0, 1], q(1))]).unwrap();
        let c = Chain::from_terms(1, vec![(vec![0, 1], q(3))]).unwrap();
        assert_eq!(x.evaluate(&c).unwrap(), q(3));
        assert_eq!(x.evaluate(&Chain::zero(1)).unwrap(), q(0));
        let far = Chain::from_terms(1, vec![(vec![0, 3], q(1))]).unwrap();
        assert!(matches!(x.evaluate(&far), Err(Error::NotSmall { .. })));
    }

    #[test]
    fn non_small_entries_rejected() {
        assert!(matches!(
            Cochain::from_entries(1, triangle_scale(), vec![(vec![0, 3], q(1))]),
            Err(Error::NotSmall { .. })
        ));
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(Cochain::<Q>::zero(1, triangle_scale()).sup_norm().unwrap(), q(0));
        let x = Cochain::from_entries(0, triangle_scale(), vec![(vec![0], q(1)), (vec![1], q(-3)), (vec![2], q(2))])
            .unwrap();
        assert_eq!(x.sup_norm().unwrap(), q(3));
    }

    #[test]
    fn pull_back_identity_and_precondition() {
        let s = triangle_scale();
        let x = Cochain::from_entries(1, s.clone(), vec![(vec![0, 1], q(2)), (vec![3, 2], q(-1))]).unwrap();
        let id: Vec<usize> = (0..4).collect();
        assert_eq!(x.pull_back(&id, s.clone()).unwrap(), x);
        let coarse = Arc::new(Cover::trivial(4));
        assert!(matches!(x.pull_back(&id, coarse), Err(Error::NotRefinement(_))));
    }

    #[test]
    fn alternating_values() {
        let x = Cochain::alternating(1, triangle_scale(), vec![(vec![0, 1], q(4))]).unwrap();
        assert_eq!(x.value(&[0, 1]), q(4));
        assert_eq!(x.value(&[1, 0]), q(-4));
        assert_eq!(x.value(&[0, 0]), q(0));
    }
}
