//! Homology and cohomology at a fixed scale by exact elimination, and the maps
//! induced between scales by refinement and by vertex maps.
//!
//! Computations run on the oriented simplicial complex of small simplices
//! (distinct, sorted vertices). Ordered chains enter through
//! [`Chain::ordered_to_oriented`]; ordered cochains through restriction to
//! sorted tuples. Both conversions induce isomorphisms on (co)homology.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use crate::chains::{Chain, Simplex};
use crate::cochains::Cochain;
use crate::error::{Error, Result};
use crate::field::{format_rational, Field, Q};
use crate::linalg::{Matrix, Quotient};
use crate::spaces::{pullback_cover, refines, Cover, VertexMap};

pub const DEFAULT_SIMPLEX_CAP: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Homology,
    Cohomology,
}

/// Oriented small simplices up to dimension `max_q + 1` with their boundary
/// matrices.
#[derive(Debug)]
pub struct ScaleComplex {
    cover: Arc<Cover>,
    max_q: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    /// `boundary[k]` is `∂_k : C_k → C_{k−1}`; `boundary[0]` has no rows.
    boundary: Vec<Matrix<Q>>,
    homology: Vec<OnceLock<HomologyBasis>>,
    cohomology: Vec<OnceLock<CohomologyBasis>>,
}

#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub q: usize,
    pub quotient: Quotient<Q>,
    /// Representative cycles as ordered chains (sorted tuples).
    pub reps: Vec<Chain<Q>>,
}

#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub q: usize,
    pub quotient: Quotient<Q>,
    /// Representative cocycles as alternating ordered cochains.
    pub reps: Vec<Cochain<Q>>,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

impl CohomologyBasis {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn subsets_of_size(members: &[usize], k: usize, out: &mut BTreeSet<Simplex>) {
    fn rec(members: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Simplex>) {
        if cur.len() == k {
            out.insert(cur.clone());
            return;
        }
        for i in start..members.len() {
            if members.len() - i < k - cur.len() {
                break;
            }
            cur.push(members[i]);
            rec(members, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(members, k, 0, &mut Vec::with_capacity(k), out);
}

/// Enumerates the oriented small simplices of `cover` up to dimension
/// `max_q + 1` and assembles the boundary matrices.
pub fn build_complex(cover: Arc<Cover>, max_q: usize, cap: usize) -> Result<ScaleComplex> {
    let top = max_q + 1;
    let bound: usize = cover
        .elements()
        .iter()
        .map(|e| (0..=top).map(|k| binomial(e.members.len(), k + 1)).fold(0usize, usize::saturating_add))
        .fold(0usize, usize::saturating_add);
    let mut simplices = Vec::with_capacity(top + 1);
    let mut total = 0usize;
    for k in 0..=top {
        let mut set = BTreeSet::new();
        for e in cover.elements() {
            subsets_of_size(&e.members, k + 1, &mut set);
            if bound > cap && total + set.len() > cap {
                return Err(Error::SimplexCap { count: total + set.len(), cap });
            }
        }
        total += set.len();
        simplices.push(set.into_iter().collect::<Vec<_>>());
    }
    let index: Vec<HashMap<Simplex, usize>> =
        simplices.iter().map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
    let mut boundary = vec![Matrix::zeros(0, simplices[0].len())];
    for k in 1..=top {
        let mut m = Matrix::zeros(simplices[k - 1].len(), simplices[k].len());
        for (j, s) in simplices[k].iter().enumerate() {
            for omit in 0..s.len() {
                let mut face = s.clone();
                face.remove(omit);
                let i = index[k - 1][&face];
                m[(i, j)] = if omit % 2 == 0 { Q::one() } else { -Q::one() };
            }
        }
        boundary.push(m);
    }
    for k in 2..=top {
        debug_assert!(boundary[k - 1].mul(&boundary[k]).is_zero(), "∂∂ ≠ 0");
    }
    Ok(ScaleComplex {
        cover,
        max_q,
        simplices,
        index,
        boundary,
        homology: (0..=max_q).map(|_| OnceLock::new()).collect(),
        cohomology: (0..=max_q).map(|_| OnceLock::new()).collect(),
    })
}

impl ScaleComplex {
    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn max_q(&self) -> usize {
        self.max_q
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        &self.simplices[k]
    }

    pub fn boundary_matrix(&self, k: usize) -> &Matrix<Q> {
        &self.boundary[k]
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q > self.max_q {
            return Err(Error::Precondition(format!("dimension {q} exceeds complex max_q {}", self.max_q)));
        }
        Ok(())
    }

    pub fn homology(&self, q: usize) -> Result<&HomologyBasis> {
        self.check_q(q)?;
        Ok(self.homology[q].get_or_init(|| {
            let n = self.simplices[q].len();
            let cycles = if q == 0 { (0..n).map(|i| unit(n, i)).collect() } else { self.boundary[q].nullspace() };
            let boundaries = self.boundary[q + 1].transpose().to_rows();
            let quotient = Quotient::new(n, &boundaries, &cycles);
            let reps = quotient.reps.iter().map(|v| self.vector_to_chain(q, v)).collect();
            HomologyBasis { q, quotient, reps }
        }))
    }

    pub fn cohomology(&self, q: usize) -> Result<&CohomologyBasis> {
        self.check_q(q)?;
        Ok(self.cohomology[q].get_or_init(|| {
            let n = self.simplices[q].len();
            let cocycles = self.boundary[q + 1].transpose().nullspace();
            let coboundaries = if q == 0 { Vec::new() } else { self.boundary[q].to_rows() };
            let quotient = Quotient::new(n, &coboundaries, &cocycles);
            let reps = quotient.reps.iter().map(|v| self.vector_to_cochain(q, v).expect("small simplices")).collect();
            CohomologyBasis { q, quotient, reps }
        }))
    }

    pub fn vector_to_chain(&self, q: usize, v: &[Q]) -> Chain<Q> {
        let mut c = Chain::zero(q);
        for (i, k) in v.iter().enumerate() {
            c.add_term(self.simplices[q][i].clone(), k.clone());
        }
        c
    }

    pub fn vector_to_cochain(&self, q: usize, v: &[Q]) -> Result<Cochain<Q>> {
        Cochain::alternating(
            q,
            self.cover.clone(),
            v.iter().enumerate().map(|(i, k)| (self.simplices[q][i].clone(), k.clone())),
        )
    }

    /// Oriented coordinate vector of an ordered chain small for this scale.
    pub fn chain_to_vector(&self, c: &Chain<Q>) -> Result<Vec<Q>> {
        let q = c.dim();
        if q > self.max_q + 1 {
            return Err(Error::DimensionMismatch { expected: self.max_q + 1, found: q });
        }
        let mut v = vec![Q::zero(); self.simplices[q].len()];
        for (s, k) in c.ordered_to_oriented().terms() {
            let i = *self.index[q].get(s).ok_or_else(|| Error::NotSmall { simplex: s.clone() })?;
            v[i] = k.clone();
        }
        Ok(v)
    }

    /// Values of an ordered cochain on the sorted simplices of this scale.
    pub fn cochain_to_vector(&self, x: &Cochain<Q>) -> Vec<Q> {
        self.simplices[x.dim()].iter().map(|s| x.value(s)).collect()
    }

    /// Coordinates of the homology class of a small cycle.
    pub fn homology_coordinates(&self, c: &Chain<Q>) -> Result<Vec<Q>> {
        if !c.is_cycle() {
            return Err(Error::NotACycle);
        }
        let hb = self.homology(c.dim())?;
        Ok(hb.quotient.coordinates(&self.chain_to_vector(c)?))
    }

    /// Coordinates of the cohomology class of a cocycle defined at least on
    /// this scale's small tuples.
    pub fn cohomology_coordinates(&self, x: &Cochain<Q>) -> Result<Vec<Q>> {
        let cb = self.cohomology(x.dim())?;
        let v = self.cochain_to_vector(x);
        if x.dim() < self.max_q + 1 {
            let dv = self.boundary[x.dim() + 1].transpose().mul_vec(&v);
            if dv.iter().any(|a| !a.is_zero()) {
                return Err(Error::NotACocycle);
            }
        }
        Ok(cb.quotient.coordinates(&v))
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// Matrix of a map between (co)homology groups in the computed bases.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleMap {
    pub variance: Variance,
    pub q: usize,
    pub matrix: Matrix<Q>,
}

impl ScaleMap {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "variance": match self.variance { Variance::Homology => "homology", Variance::Cohomology => "cohomology" },
            "q": self.q,
            "rows": self.matrix.rows(),
            "cols": self.matrix.cols(),
            "matrix": matrix_json(&self.matrix),
        })
    }
}

pub fn matrix_json(m: &Matrix<Q>) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows())
            .map(|i| serde_json::Value::Array(m.row(i).iter().map(|x| format_rational(x).into()).collect()))
            .collect(),
    )
}

fn check_carries(f: &[usize], source: &ScaleComplex, target: &ScaleComplex) -> Result<()> {
    if f.len() != source.cover.n_vertices() {
        return Err(Error::Input("map is not total on the source vertices".into()));
    }
    let pulled = pullback_cover(f, &target.cover)?;
    if !refines(&source.cover, &pulled)? {
        return Err(Error::NotRefinement("source scale does not refine the pulled-back target scale".into()));
    }
    Ok(())
}

/// `f_*: H_q^A → H_q^B` (matrix `dim B × dim A`) or `f^*: H^q_B → H^q_A`
/// (matrix `dim A × dim B`). Requires `A` to refine `f⁻¹B`.
pub fn induced_map(
    f: &[usize],
    source: &ScaleComplex,
    target: &ScaleComplex,
    q: usize,
    variance: Variance,
) -> Result<ScaleMap> {
    check_carries(f, source, target)?;
    let matrix = match variance {
        Variance::Homology => {
            let ha = source.homology(q)?;
            let hb = target.homology(q)?;
            let cols: Vec<Vec<Q>> =
                ha.reps.iter().map(|c| target.homology_coordinates(&c.push_forward(f))).collect::<Result<_>>()?;
            Matrix::from_columns(hb.dim(), &cols)
        }
        Variance::Cohomology => {
            let ca = source.cohomology(q)?;
            let cols: Vec<Vec<Q>> = target
                .cohomology(q)?
                .reps
                .iter()
                .map(|z| source.cohomology_coordinates(&z.pull_back(f, source.cover.clone())?))
                .collect::<Result<_>>()?;
            Matrix::from_columns(ca.dim(), &cols)
        }
    };
    Ok(ScaleMap { variance, q, matrix })
}

/// Bonding map of the refinement `A ≤ B`: `j: H_q^A → H_q^B` or `π: H^q_B → H^q_A`.
pub fn bonding(fine: &ScaleComplex, coarse: &ScaleComplex, q: usize, variance: Variance) -> Result<ScaleMap> {
    if !refines(&fine.cover, &coarse.cover)? {
        return Err(Error::NotRefinement("fine scale does not refine the coarse scale".into()));
    }
    let id: VertexMap = (0..fine.cover.n_vertices()).collect();
    induced_map(&id, fine, coarse, q, variance)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contiguity {
    pub holds: bool,
    /// Source simplex whose combined image is not small, when the hypothesis fails.
    pub witness: Option<Simplex>,
    /// Whether `f_* = g_*` in every dimension up to `max_q`; only checked when
    /// the hypothesis holds.
    pub maps_equal: Option<bool>,
}

/// Checks that `f(σ) ∪ g(σ)` is small in the target for every small source
/// simplex; when it is, compares `f_*` with `g_*`.
pub fn contiguity_equal(f: &[usize], g: &[usize], source: &ScaleComplex, target: &ScaleComplex) -> Result<Contiguity> {
    for k in 0..source.simplices.len() {
        for s in &source.simplices[k] {
            let mut both: Vec<usize> = s.iter().map(|&v| f[v]).chain(s.iter().map(|&v| g[v])).collect();
            both.sort_unstable();
            both.dedup();
            if !target.cover.is_small(&both) {
                return Ok(Contiguity { holds: false, witness: Some(s.clone()), maps_equal: None });
            }
        }
    }
    let mut equal = true;
    for q in 0..=source.max_q.min(target.max_q) {
        let mf = induced_map(f, source, target, q, Variance::Homology)?;
        let mg = induced_map(g, source, target, q, Variance::Homology)?;
        equal &= mf == mg;
    }
    Ok(Contiguity { holds: true, witness: None, maps_equal: Some(equal) })
}

/// The self-map of `H_q^A` (or `H^q_A`) obtained from `f` by returning to the
/// fine scale through the inverse bonding map: `j⁻¹ ∘ f_*`, or `f^* ∘ π⁻¹`.
pub fn endomorphism(
    f: &[usize],
    fine: &ScaleComplex,
    coarse: &ScaleComplex,
    q: usize,
    variance: Variance,
) -> Result<ScaleMap> {
    let bond = bonding(fine, coarse, q, variance)?;
    let induced = induced_map(f, fine, coarse, q, variance)?;
    let inv = bond.matrix.inverse().ok_or(Error::NonInvertibleBonding)?;
    let matrix = match variance {
        Variance::Homology => inv.mul(&induced.matrix),
        Variance::Cohomology => induced.matrix.mul(&inv),
    };
    Ok(ScaleMap { variance, q, matrix })
}
