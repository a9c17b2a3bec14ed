//! The integral of a cocycle over a homology class at a fixed scale, the
//! pairing matrix, and the two constructions behind its nondegeneracy.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::chains::{Chain, Simplex};
use crate::cochains::Cochain;
use crate::error::{Error, Result};
use crate::field::{format_rational, Field, Q};
use crate::linalg::Matrix;
use crate::scale_algebra::{build_complex, matrix_json, ScaleComplex, DEFAULT_SIMPLEX_CAP};
use crate::spaces::Cover;

/// `∫_γ z` from representatives: the cocycle evaluated on the small cycle.
pub fn integral(z: &Cochain<Q>, gamma: &Chain<Q>) -> Result<Q> {
    if gamma.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), found: gamma.dim() });
    }
    if !z.is_cocycle() {
        return Err(Error::NotACocycle);
    }
    if !gamma.is_cycle() {
        return Err(Error::NotACycle);
    }
    z.evaluate(gamma)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingMatrix {
    pub q: usize,
    /// `matrix[i][j] = ∫_{c_j} ξ_i` (rows: cohomology basis, columns: homology basis).
    pub matrix: Matrix<Q>,
    pub determinant: Q,
    pub nondegenerate: bool,
}

impl PairingMatrix {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "matrix": matrix_json(&self.matrix),
            "determinant": format_rational(&self.determinant),
            "nondegenerate": self.nondegenerate,
        })
    }
}

/// Full matrix of integrals between the computed bases of `H^q` and `H_q`.
pub fn pairing_matrix(cx: &ScaleComplex, q: usize) -> Result<PairingMatrix> {
    let cb = cx.cohomology(q)?;
    let hb = cx.homology(q)?;
    let mut m = Matrix::zeros(cb.dim(), hb.dim());
    for (i, xi) in cb.reps.iter().enumerate() {
        for (j, c) in hb.reps.iter().enumerate() {
            m[(i, j)] = xi.evaluate(c)?;
        }
    }
    let (determinant, nondegenerate) = if m.is_square() {
        let d = m.determinant();
        let nz = !d.is_zero();
        (d, nz)
    } else {
        (Q::zero(), false)
    };
    Ok(PairingMatrix { q, matrix: m, determinant, nondegenerate })
}

/// All ordered tuples of length `len` that are small for `cover`.
pub fn ordered_small_tuples(cover: &Cover, len: usize) -> Vec<Simplex> {
    fn extend(members: &[usize], len: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Simplex>) {
        if cur.len() == len {
            out.insert(cur.clone());
            return;
        }
        for &v in members {
            cur.push(v);
            extend(members, len, cur, out);
            cur.pop();
        }
    }
    let mut set = BTreeSet::new();
    for e in cover.elements() {
        extend(&e.members, len, &mut Vec::with_capacity(len), &mut set);
    }
    set.into_iter().collect()
}

/// A `(q−1)`-cochain `h` with `δh = x` on small tuples, for a `q`-cocycle `x`
/// whose integrals over every homology class at its scale vanish.
///
/// The boundaries of a maximal independent family of small ordered
/// `q`-simplices `c_i` form a basis `d_i = ∂c_i` of the boundary space; `h` is
/// set to `x(c_i)` on `d_i` and to zero on a complement.
pub fn potential(x: &Cochain<Q>) -> Result<Cochain<Q>> {
    let q = x.dim();
    if q == 0 {
        return Err(Error::Precondition("a potential needs a cocycle of positive dimension".into()));
    }
    if !x.is_cocycle() {
        return Err(Error::NotACocycle);
    }
    let scale = x.scale().clone();
    let cx = build_complex(scale.clone(), q, DEFAULT_SIMPLEX_CAP)?;
    for (i, c) in cx.homology(q)?.reps.iter().enumerate() {
        if !x.evaluate(c)?.is_zero() {
            return Err(Error::NonvanishingIntegral { generator: i });
        }
    }

    let lower = ordered_small_tuples(&scale, q);
    let upper = ordered_small_tuples(&scale, q + 1);
    let lower_index: std::collections::HashMap<&Simplex, usize> =
        lower.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut d = Matrix::<Q>::zeros(lower.len(), upper.len());
    for (j, t) in upper.iter().enumerate() {
        for omit in 0..t.len() {
            let mut face = t.clone();
            face.remove(omit);
            let i = lower_index[&face];
            let sign = if omit % 2 == 0 { Q::one() } else { Q::one().neg() };
            d[(i, j)] = d[(i, j)].add(&sign);
        }
    }
    let (_, fillings) = d.rref();
    let rows: Vec<Vec<Q>> = fillings.iter().map(|&j| d.column(j)).collect();
    let rhs: Vec<Q> = fillings.iter().map(|&j| x.value(&upper[j])).collect();
    let h = if rows.is_empty() {
        vec![Q::zero(); lower.len()]
    } else {
        Matrix::from_rows(rows).solve(&rhs).expect("independent boundaries")
    };
    let h = Cochain::from_entries(q - 1, scale, lower.into_iter().zip(h))?;
    debug_assert_eq!(h.coboundary(), *x);
    Ok(h)
}

/// A cocycle at the scale of `cx` taking a nonzero value on the small cycle `c`,
/// built from a linear functional that vanishes on boundaries.
pub fn separating_cocycle(cx: &ScaleComplex, c: &Chain<Q>) -> Result<Cochain<Q>> {
    let coords = cx.homology_coordinates(c)?;
    let k = coords.iter().position(|a| !a.is_zero()).ok_or(Error::IsBoundary)?;
    let hb = cx.homology(c.dim())?;
    let functional = hb.quotient.coords.row(k).to_vec();
    let x =
        Cochain::alternating(c.dim(), Arc::clone(cx.cover()), cx.simplices(c.dim()).iter().cloned().zip(functional))?;
    debug_assert!(x.is_cocycle());
    debug_assert!(!x.evaluate(c)?.is_zero());
    Ok(x)
}
