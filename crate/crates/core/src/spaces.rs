//! Finite models of a compact space with an open cover, cover algebra, and the
//! circle with a piecewise-linear self-map.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{format_rational, Q};

/// A total function on vertex indices `0..n`.
pub type VertexMap = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverElement {
    /// Sorted, deduplicated vertex indices.
    pub members: Vec<usize>,
    pub name: Option<String>,
    /// Parent indices when the element came from a join.
    pub parents: Option<(usize, usize)>,
}

/// A finite cover of the vertex set `0..n`, indexed in sequence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    n_vertices: usize,
    elements: Vec<CoverElement>,
    mask: Vec<Vec<bool>>,
    by_vertex: Vec<Vec<usize>>,
}

impl Cover {
    pub fn new(n_vertices: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_elements(
            n_vertices,
            sets.into_iter().map(|members| CoverElement { members, name: None, parents: None }).collect(),
        )
    }

    pub fn from_elements(n_vertices: usize, elements: Vec<CoverElement>) -> Result<Self> {
        let mut elements = elements;
        for (i, e) in elements.iter_mut().enumerate() {
            e.members.sort_unstable();
            e.members.dedup();
            if e.members.is_empty() {
                return Err(Error::EmptyCoverElement { index: i });
            }
            if let Some(&v) = e.members.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::Input(format!("cover element {i} names vertex {v} out of range")));
            }
        }
        let mut mask = vec![vec![false; n_vertices]; elements.len()];
        let mut by_vertex = vec![Vec::new(); n_vertices];
        for (i, e) in elements.iter().enumerate() {
            for &v in &e.members {
                mask[i][v] = true;
                by_vertex[v].push(i);
            }
        }
        if let Some(v) = by_vertex.iter().position(Vec::is_empty) {
            return Err(Error::NotACover { vertex: v.to_string() });
        }
        Ok(Cover { n_vertices, elements, mask, by_vertex })
    }

    /// The one-element cover `{X}`.
    pub fn trivial(n_vertices: usize) -> Self {
        Cover::new(n_vertices, vec![(0..n_vertices).collect()]).expect("trivial cover")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CoverElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[usize] {
        &self.elements[i].members
    }

    pub fn contains(&self, element: usize, vertex: usize) -> bool {
        self.mask[element][vertex]
    }

    pub fn elements_containing(&self, vertex: usize) -> &[usize] {
        &self.by_vertex[vertex]
    }

    /// Smallest index of an element containing every vertex of `vs`.
    pub fn element_containing_all(&self, vs: &[usize]) -> Option<usize> {
        let first = *vs.first()?;
        self.by_vertex[first].iter().copied().find(|&e| vs.iter().all(|&v| self.mask[e][v]))
    }

    /// All vertices of `vs` lie in one element.
    pub fn is_small(&self, vs: &[usize]) -> bool {
        vs.is_empty() || self.element_containing_all(vs).is_some()
    }

    fn element_subset_of(&self, i: usize, other: &Cover, j: usize) -> bool {
        self.elements[i].members.iter().all(|&v| other.mask[j][v])
    }

    /// Restriction of the cover to a subset of the vertices (nonempty traces only,
    /// keeping the original element index as the first parent).
    pub fn restricted_to(&self, subset: &[usize]) -> Vec<(usize, Vec<usize>)> {
        self.elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                let trace: Vec<usize> = e.members.iter().copied().filter(|v| subset.contains(v)).collect();
                (!trace.is_empty()).then_some((i, trace))
            })
            .collect()
    }
}

fn same_vertices(a: &Cover, b: &Cover) -> Result<()> {
    if a.n_vertices != b.n_vertices {
        return Err(Error::VertexSetMismatch);
    }
    Ok(())
}

/// All nonempty pairwise intersections, in `(i, j)` lexicographic order.
pub fn join_covers(a: &Cover, b: &Cover) -> Result<Cover> {
    same_vertices(a, b)?;
    let mut out = Vec::new();
    for (i, ea) in a.elements.iter().enumerate() {
        for (j, _) in b.elements.iter().enumerate() {
            let members: Vec<usize> = ea.members.iter().copied().filter(|&v| b.mask[j][v]).collect();
            if !members.is_empty() {
                out.push(CoverElement { members, name: None, parents: Some((i, j)) });
            }
        }
    }
    Cover::from_elements(a.n_vertices, out)
}

/// Every element of `a` lies inside some element of `b`.
pub fn refines(a: &Cover, b: &Cover) -> Result<bool> {
    same_vertices(a, b)?;
    Ok((0..a.len()).all(|i| (0..b.len()).any(|j| a.element_subset_of(i, b, j))))
}

/// `{f⁻¹(V) : V ∈ b}` with empty preimages dropped.
pub fn pullback_cover(f: &[usize], b: &Cover) -> Result<Cover> {
    if let Some(&v) = f.iter().find(|&&v| v >= b.n_vertices) {
        return Err(Error::Input(format!("map value {v} out of range")));
    }
    let elements = b
        .elements
        .iter()
        .enumerate()
        .filter_map(|(j, e)| {
            let members: Vec<usize> = (0..f.len()).filter(|&x| b.mask[j][f[x]]).collect();
            (!members.is_empty()).then(|| CoverElement { members, name: e.name.clone(), parents: Some((j, j)) })
        })
        .collect();
    Cover::from_elements(f.len(), elements)
}

/// Union of all elements of `a` meeting element `i`.
pub fn star(a: &Cover, i: usize) -> Vec<usize> {
    let mut s = BTreeSet::new();
    for j in 0..a.len() {
        if a.elements[j].members.iter().any(|&v| a.mask[i][v]) {
            s.extend(a.elements[j].members.iter().copied());
        }
    }
    s.into_iter().collect()
}

/// Standard star refinement: every star `st(U, a)` lies in one element of `b`.
pub fn star_refines(a: &Cover, b: &Cover) -> Result<bool> {
    same_vertices(a, b)?;
    Ok((0..a.len()).all(|i| {
        let s = star(a, i);
        (0..b.len()).any(|j| s.iter().all(|&v| b.mask[j][v]))
    }))
}

/// `p(x) = choices[i]` for the smallest `i` with `x ∈ a[i]`.
pub fn sampling_map(a: &Cover, b: &Cover, choices: &[usize]) -> Result<VertexMap> {
    if choices.len() != a.len() {
        return Err(Error::Input(format!("expected {} choices, got {}", a.len(), choices.len())));
    }
    for (i, &c) in choices.iter().enumerate() {
        if c >= a.n_vertices || !a.mask[i][c] {
            return Err(Error::ChoiceOutsideElement { index: i, choice: c });
        }
    }
    if !star_refines(a, b)? {
        return Err(Error::NotStarRefinement);
    }
    Ok((0..a.n_vertices).map(|x| choices[a.by_vertex[x][0]]).collect())
}

/// Finite vertex set, a primary cover, optional extra named covers, and an
/// optional self-map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    pub labels: Vec<String>,
    pub cover: Cover,
    pub extra_covers: Vec<(String, Cover)>,
    pub map: Option<VertexMap>,
}

impl FiniteModel {
    pub fn new(labels: Vec<String>, cover: Cover, map: Option<VertexMap>) -> Result<Self> {
        if cover.n_vertices() != labels.len() {
            return Err(Error::VertexSetMismatch);
        }
        if let Some(f) = &map {
            if f.len() != labels.len() || f.iter().any(|&v| v >= labels.len()) {
                return Err(Error::Input("map must be total on the vertex set".into()));
            }
        }
        Ok(FiniteModel { labels, cover, extra_covers: Vec::new(), map })
    }

    /// Model with vertices labelled `0..n`.
    pub fn indexed(n: usize, cover: Cover, map: Option<VertexMap>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), cover, map)
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn with_cover(mut self, name: &str, cover: Cover) -> Result<Self> {
        if cover.n_vertices() != self.n_vertices() {
            return Err(Error::VertexSetMismatch);
        }
        self.extra_covers.push((name.to_string(), cover));
        Ok(self)
    }

    pub fn named_cover(&self, name: &str) -> Option<&Cover> {
        if name == "cover" || name == "default" {
            return Some(&self.cover);
        }
        self.extra_covers.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn map(&self) -> Result<&VertexMap> {
        self.map.as_ref().ok_or(Error::MissingMap)
    }
}

/// Composition `(g ∘ f)(x) = g(f(x))`.
pub fn compose(g: &[usize], f: &[usize]) -> VertexMap {
    f.iter().map(|&y| g[y]).collect()
}

/// Consecutive-window cover of the cyclically ordered vertices `0..n`:
/// element `k` is `{k, k+1, …, k+width−1} mod n`.
pub fn window_cover(n: usize, width: usize) -> Cover {
    let sets = (0..n).map(|k| (0..width).map(|i| (k + i) % n).collect()).collect();
    Cover::new(n, sets).expect("windows cover the cycle")
}

// ---------------------------------------------------------------------------
// Circle

/// Reduces to `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// Open arc `(start, start + length)` on `ℝ/ℤ`; `length ≥ 1` is the whole circle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub start: Q,
    pub length: Q,
}

impl Arc {
    pub fn new(start: Q, length: Q) -> Result<Self> {
        if !length.is_positive() {
            return Err(Error::Input("arc length must be positive".into()));
        }
        let length = if length >= Q::one() { Q::one() + Q::one() } else { length };
        let start = if length > Q::one() { Q::zero() } else { frac(&start) };
        Ok(Arc { start, length })
    }

    pub fn full() -> Self {
        Arc { start: Q::zero(), length: Q::from_integer(2.into()) }
    }

    pub fn is_full(&self) -> bool {
        self.length > Q::one()
    }

    pub fn contains(&self, x: &Q) -> bool {
        if self.is_full() {
            return true;
        }
        let d = frac(&(x - &self.start));
        d.is_positive() && d < self.length
    }

    pub fn end(&self) -> Q {
        &self.start + &self.length
    }

    /// Intersection as a list of 0, 1 or 2 arcs.
    pub fn intersect(&self, other: &Arc) -> Vec<Arc> {
        if self.is_full() {
            return vec![other.clone()];
        }
        if other.is_full() {
            return vec![self.clone()];
        }
        let s = frac(&(&other.start - &self.start));
        let mut out = Vec::new();
        for shift in [Q::zero(), -Q::one()] {
            let lo = &s + &shift;
            let hi = &lo + &other.length;
            let a = if lo > Q::zero() { lo } else { Q::zero() };
            let b = if hi < self.length { hi } else { self.length.clone() };
            if a < b {
                out.push(Arc { start: frac(&(&self.start + &a)), length: b - a });
            }
        }
        out
    }
}

/// Piecewise-linear circle map with lift `F(x) = offset + ∫₀ˣ slope`, pieces
/// starting at `breakpoints` (the first is 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlMap {
    pub breakpoints: Vec<Q>,
    pub slopes: Vec<Q>,
    pub offset: Q,
    lift_at: Vec<Q>,
}

impl PlMap {
    pub fn new(breakpoints: Vec<Q>, slopes: Vec<Q>, offset: Q) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != slopes.len() {
            return Err(Error::Input("pl_map needs one slope per breakpoint".into()));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::Input("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints.last().unwrap() >= &Q::one() {
            return Err(Error::Input("breakpoints must increase within [0, 1)".into()));
        }
        if slopes.iter().any(Zero::is_zero) {
            return Err(Error::Input("pl_map slopes must be nonzero".into()));
        }
        let mut lift_at = vec![offset.clone()];
        for i in 0..breakpoints.len() {
            let right = breakpoints.get(i + 1).cloned().unwrap_or_else(Q::one);
            let v = &lift_at[i] + &slopes[i] * (&right - &breakpoints[i]);
            lift_at.push(v);
        }
        let m = PlMap { breakpoints, slopes, offset, lift_at };
        if !m.degree_rational().is_integer() {
            return Err(Error::Input("pl_map is discontinuous on the circle".into()));
        }
        Ok(m)
    }

    /// `x ↦ d·x mod 1`.
    pub fn multiplication(d: i64) -> Self {
        PlMap::new(vec![Q::zero()], vec![Q::from_integer(d.into())], Q::zero()).expect("valid map")
    }

    pub fn rotation(by: Q) -> Self {
        PlMap::new(vec![Q::zero()], vec![Q::one()], by).expect("valid map")
    }

    fn degree_rational(&self) -> Q {
        self.lift_at.last().unwrap() - &self.lift_at[0]
    }

    pub fn degree(&self) -> i64 {
        use num_traits::ToPrimitive;
        self.degree_rational().to_integer().to_i64().unwrap_or(0)
    }

    pub fn lift(&self, x: &Q) -> Q {
        let x = frac(x);
        let i = self.breakpoints.iter().rposition(|b| b <= &x).unwrap();
        &self.lift_at[i] + &self.slopes[i] * (&x - &self.breakpoints[i])
    }

    pub fn eval(&self, x: &Q) -> Q {
        frac(&self.lift(x))
    }

    /// Preimage of an open arc as a list of disjoint open arcs.
    pub fn preimage(&self, arc: &Arc) -> Vec<Arc> {
        if arc.is_full() {
            return vec![Arc::full()];
        }
        // open x-intervals, piece by piece
        let mut pieces: Vec<(Q, Q)> = Vec::new();
        for i in 0..self.breakpoints.len() {
            let x0 = self.breakpoints[i].clone();
            let (y0, y1) = (self.lift_at[i].clone(), self.lift_at[i + 1].clone());
            let (lo, hi) = if y0 < y1 { (y0.clone(), y1) } else { (y1, y0.clone()) };
            let k_min = (&lo - &arc.length - &arc.start).floor().to_integer();
            let k_max = (&hi - &arc.start).ceil().to_integer();
            let mut k = k_min;
            while k <= k_max {
                let a = &arc.start + Q::from_integer(k.clone());
                let b = &a + &arc.length;
                let ya = if a > lo { a } else { lo.clone() };
                let yb = if b < hi { b } else { hi.clone() };
                if ya < yb {
                    let s = &self.slopes[i];
                    let xa = &x0 + (&ya - &y0) / s;
                    let xb = &x0 + (&yb - &y0) / s;
                    let (u, v) = if xa < xb { (xa, xb) } else { (xb, xa) };
                    pieces.push((u, v));
                }
                k += 1;
            }
        }
        pieces.sort();
        let inside = |x: &Q| arc.contains(&self.eval(x));
        let mut merged: Vec<(Q, Q)> = Vec::new();
        for (u, v) in pieces {
            if let Some(last) = merged.last_mut() {
                if last.1 == u && inside(&u) {
                    last.1 = v;
                    continue;
                }
            }
            merged.push((u, v));
        }
        if merged.len() >= 2 || (merged.len() == 1 && merged[0].0.is_zero()) {
            let first_starts_at_zero = merged[0].0.is_zero();
            let last_ends_at_one = merged.last().unwrap().1 == Q::one();
            if first_starts_at_zero && last_ends_at_one && inside(&Q::zero()) {
                if merged.len() == 1 {
                    return vec![Arc::full()];
                }
                let first = merged.remove(0);
                let last = merged.last_mut().unwrap();
                last.1 = Q::one() + first.1;
            }
        }
        merged.into_iter().map(|(u, v)| Arc { start: frac(&u), length: v - u }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleSystem {
    pub arcs: Vec<Arc>,
    pub pl_map: PlMap,
}

impl CircleSystem {
    pub fn new(arcs: Vec<Arc>, pl_map: PlMap) -> Result<Self> {
        if !arcs_cover_circle(&arcs) {
            return Err(Error::Precondition("arcs do not cover the circle".into()));
        }
        Ok(CircleSystem { arcs, pl_map })
    }

    /// `count` arcs of the given length starting at `k / count`.
    pub fn equally_spaced_arcs(count: usize, length: Q) -> Vec<Arc> {
        (0..count)
            .map(|k| Arc::new(Q::new((k as i64).into(), (count as i64).into()), length.clone()).expect("arc"))
            .collect()
    }
}

/// Every point of the circle lies in some open arc.
pub fn arcs_cover_circle(arcs: &[Arc]) -> bool {
    if arcs.is_empty() {
        return false;
    }
    if arcs.iter().any(Arc::is_full) {
        return true;
    }
    // Uncovered points, if any, include an arc start.
    arcs.iter().all(|a| arcs.iter().any(|b| b.contains(&a.start)))
}

/// A finite sample of the circle and the finite model it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePlan {
    pub sample: Vec<Q>,
    pub model: FiniteModel,
}

/// Samples `k / n` for `k < n`; cover elements are the arc traces; the map sends
/// each sample to the sample nearest its image (ties toward the smaller coordinate).
pub fn sample_circle(sys: &CircleSystem, n: usize) -> Result<SamplePlan> {
    if n < 3 {
        return Err(Error::Precondition("need at least 3 samples".into()));
    }
    let nq = Q::from_integer((n as i64).into());
    let sample: Vec<Q> = (0..n).map(|k| Q::from_integer((k as i64).into()) / &nq).collect();
    let mut sets = Vec::with_capacity(sys.arcs.len());
    for (i, arc) in sys.arcs.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&k| arc.contains(&sample[k])).collect();
        if members.is_empty() {
            return Err(Error::EmptyArcSample { index: i });
        }
        sets.push(members);
    }
    let cover = Cover::new(n, sets)?;
    let map = sample.iter().map(|x| nearest_sample(&sys.pl_map.eval(x), n)).collect();
    let labels = sample.iter().map(format_rational).collect();
    Ok(SamplePlan { sample, model: FiniteModel::new(labels, cover, Some(map))? })
}

fn nearest_sample(y: &Q, n: usize) -> usize {
    let scaled = y * Q::from_integer((n as i64).into());
    let below = scaled.floor();
    let d_below = &scaled - &below;
    let d_above = Q::one() - &d_below;
    use num_traits::ToPrimitive;
    let lo = below.to_integer().to_usize().unwrap() % n;
    let hi = (lo + 1) % n;
    if d_below < d_above {
        lo
    } else if d_above < d_below {
        hi
    } else {
        lo.min(hi)
    }
}
