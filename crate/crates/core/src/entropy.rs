//! Cover entropy: iterated joins, minimal subcovers and the growth rate
//! `(1/n)·log s(·)`.
//!
//! Term `n` of an estimate is the join of `n` cover pullbacks
//! `𝒰 ∨ f⁻¹𝒰 ∨ … ∨ f^{−(n−1)}𝒰`, whose minimal subcover size `s` grows like
//! `exp(n·h(f, 𝒰))`. The join with `n + 1` factors is what
//! [`iterate_join_circle`] and [`iterate_join_finite`] return for `n`.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{to_f64, Q};
use crate::spaces::{Arc, CircleSystem, Cover};

pub const DEFAULT_ARC_CAP: usize = 100_000;
/// Largest finite cover solved exactly by branch and bound.
pub const EXACT_SUBCOVER_LIMIT: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    GreedyUpper,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::GreedyUpper => "greedy-upper",
        }
    }
}

/// Floating screen for circular overlap; errs on the side of overlapping.
fn may_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    const EPS: f64 = 1e-9;
    if a.1 >= 1.0 || b.1 >= 1.0 {
        return true;
    }
    (b.0 - a.0).rem_euclid(1.0) < a.1 + EPS
        || (a.0 - b.0).rem_euclid(1.0) < b.1 + EPS
        || (b.0 - a.0).rem_euclid(1.0) > 1.0 - EPS
}

fn approx(a: &Arc) -> (f64, f64) {
    (to_f64(&a.start), to_f64(&a.length))
}

/// Drops duplicate arcs and arcs contained in another.
fn prune_arcs(arcs: Vec<Arc>) -> Vec<Arc> {
    if arcs.iter().any(Arc::is_full) {
        return vec![Arc::full()];
    }
    let arcs: Vec<Arc> = arcs.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    // unrolled copies sorted by start, longest first; an arc is redundant when
    // an earlier copy of another arc reaches at least as far
    let mut unrolled: Vec<(Q, Q, usize)> = Vec::with_capacity(2 * arcs.len());
    for (i, a) in arcs.iter().enumerate() {
        unrolled.push((a.start.clone(), a.end(), i));
        unrolled.push((&a.start - Q::one(), a.end() - Q::one(), i));
    }
    unrolled.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
    let mut contained = vec![false; arcs.len()];
    let mut best: Option<(Q, usize)> = None;
    for (_, end, i) in &unrolled {
        if let Some((e, j)) = &best {
            if e >= end && j != i {
                contained[*i] = true;
            }
        }
        if best.as_ref().is_none_or(|(e, _)| end > e) {
            best = Some((end.clone(), *i));
        }
    }
    arcs.into_iter().zip(contained).filter(|(_, c)| !c).map(|(a, _)| a).collect()
}

/// Connected components of the elements of `𝒰 ∨ f⁻¹𝒰 ∨ … ∨ f⁻ⁿ𝒰` for the arc
/// cover of `sys`, without redundant arcs (equal to or inside another).
///
/// An element of the join can be disconnected; its components form a finer
/// open cover whose minimal subcover is found exactly by the arc greedy. Each
/// element has boundedly many components, so both covers have the same
/// growth rate.
pub fn iterate_join_circle(sys: &CircleSystem, n: usize, arc_cap: usize) -> Result<Vec<Arc>> {
    Ok(circle_levels(sys, n, arc_cap)?.pop().unwrap())
}

fn circle_levels(sys: &CircleSystem, n: usize, arc_cap: usize) -> Result<Vec<Vec<Arc>>> {
    let base_approx: Vec<(f64, f64)> = sys.arcs.iter().map(approx).collect();
    let mut levels = vec![prune_arcs(sys.arcs.clone())];
    for _ in 0..n {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for w in prev {
            for piece in sys.pl_map.preimage(w) {
                let pa = approx(&piece);
                for (u, ua) in sys.arcs.iter().zip(&base_approx) {
                    if may_overlap(pa, *ua) {
                        next.extend(u.intersect(&piece));
                    }
                }
            }
        }
        let level = prune_arcs(next);
        if level.len() > arc_cap {
            return Err(Error::ArcCap { count: level.len(), cap: arc_cap });
        }
        levels.push(level);
    }
    Ok(levels)
}

/// Minimum number of arcs covering the circle, with the chosen indices.
///
/// Classical circular-arc greedy, which is optimal: some arc covers 0; starting
/// from each such arc, repeatedly take the arc reaching furthest past the
/// uncovered frontier, and keep the shortest result.
pub fn min_subcover_arcs(arcs: &[Arc]) -> Result<(usize, Vec<usize>)> {
    if let Some(i) = arcs.iter().position(Arc::is_full) {
        return Ok((1, vec![i]));
    }
    // unrolled copies on the real line, sorted by start
    let mut unrolled: Vec<(Q, Q, usize)> = Vec::with_capacity(3 * arcs.len());
    for (i, a) in arcs.iter().enumerate() {
        for k in [-1i64, 0, 1] {
            let shift = Q::from_integer(k.into());
            unrolled.push((&a.start + &shift, a.end() + &shift, i));
        }
    }
    unrolled.sort();
    // prefix arg-maximum of ends
    let mut prefix: Vec<usize> = Vec::with_capacity(unrolled.len());
    for j in 0..unrolled.len() {
        let best = match prefix.last() {
            Some(&p) if unrolled[p].1 >= unrolled[j].1 => p,
            _ => j,
        };
        prefix.push(best);
    }
    let reach = |x: &Q| -> Option<usize> {
        let k = unrolled.partition_point(|(s, _, _)| s < x);
        if k == 0 {
            return None;
        }
        let p = prefix[k - 1];
        (unrolled[p].1 > *x).then_some(p)
    };
    let uncovered = || Error::Precondition("arcs do not cover the circle".into());

    let zero = Q::zero();
    let mut best: Option<Vec<usize>> = None;
    // an arc starting exactly at 0 leaves 0 uncovered, so some arc straddles it
    for (a, b, i) in unrolled.iter().filter(|(s, e, _)| s < &zero && e > &zero) {
        let stop = a + Q::one();
        let mut chosen = vec![*i];
        let mut x = b.clone();
        let mut pruned = false;
        while x <= stop {
            if best.as_ref().is_some_and(|bst| chosen.len() >= bst.len()) {
                pruned = true;
                break;
            }
            let p = reach(&x).ok_or_else(uncovered)?;
            chosen.push(unrolled[p].2);
            x = unrolled[p].1.clone();
        }
        if !pruned && best.as_ref().is_none_or(|bst| chosen.len() < bst.len()) {
            best = Some(chosen);
        }
    }
    let mut best = best.ok_or_else(uncovered)?;
    best.sort_unstable();
    Ok((best.len(), best))
}

/// Join `𝒰 ∨ f⁻¹𝒰 ∨ … ∨ f⁻ⁿ𝒰` on a finite model, redundant elements removed.
pub fn iterate_join_finite(cover: &Cover, f: &[usize], n: usize) -> Result<Vec<Vec<usize>>> {
    Ok(finite_levels(cover, f, n)?.pop().unwrap())
}

fn finite_levels(cover: &Cover, f: &[usize], n: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if f.len() != cover.n_vertices() {
        return Err(Error::DimensionMismatch { expected: cover.n_vertices(), found: f.len() });
    }
    let base: Vec<Vec<usize>> = cover.elements().iter().map(|e| e.members.clone()).collect();
    let mut levels = vec![prune_sets(base.clone())];
    for _ in 0..n {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for w in prev {
            let pre: Vec<usize> = (0..f.len()).filter(|&x| w.binary_search(&f[x]).is_ok()).collect();
            for u in &base {
                let x: Vec<usize> = u.iter().copied().filter(|v| pre.binary_search(v).is_ok()).collect();
                if !x.is_empty() {
                    next.push(x);
                }
            }
        }
        levels.push(prune_sets(next));
    }
    Ok(levels)
}

fn prune_sets(sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = sets.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| s.iter().all(|v| k.binary_search(v).is_ok())) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

type Bits = Vec<u64>;

fn to_bits(set: &[usize], words: usize) -> Bits {
    let mut b = vec![0u64; words];
    for &v in set {
        b[v / 64] |= 1 << (v % 64);
    }
    b
}

/// Minimum subcover of a finite cover: exact branch and bound up to
/// [`EXACT_SUBCOVER_LIMIT`] elements, greedy beyond.
pub fn min_subcover_sets(n_vertices: usize, sets: &[Vec<usize>]) -> Result<(usize, Vec<usize>, Method)> {
    let words = n_vertices.div_ceil(64).max(1);
    let bits: Vec<Bits> = sets.iter().map(|s| to_bits(s, words)).collect();
    let all = to_bits(&(0..n_vertices).collect::<Vec<_>>(), words);
    let union = bits.iter().fold(vec![0u64; words], |acc, b| acc.iter().zip(b).map(|(x, y)| x | y).collect());
    if union != all {
        let v = (0..n_vertices).find(|&v| union[v / 64] >> (v % 64) & 1 == 0).unwrap();
        return Err(Error::NotACover { vertex: v.to_string() });
    }
    if n_vertices == 0 {
        return Ok((0, Vec::new(), Method::Exact));
    }
    let greedy = greedy_cover(&bits, &all);
    if sets.len() > EXACT_SUBCOVER_LIMIT {
        return Ok((greedy.len(), greedy, Method::GreedyUpper));
    }
    let mut best = greedy;
    let mut chosen = Vec::new();
    branch(&bits, &all, &vec![0u64; words], &mut chosen, &mut best, n_vertices);
    best.sort_unstable();
    Ok((best.len(), best, Method::Exact))
}

fn greedy_cover(bits: &[Bits], all: &Bits) -> Vec<usize> {
    let mut covered = vec![0u64; all.len()];
    let mut out = Vec::new();
    while covered != *all {
        let (i, _) = bits
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.iter().zip(&covered).map(|(x, c)| (x & !c).count_ones()).sum::<u32>()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        for (c, x) in covered.iter_mut().zip(&bits[i]) {
            *c |= x;
        }
        out.push(i);
    }
    out.sort_unstable();
    out
}

fn branch(bits: &[Bits], all: &Bits, covered: &Bits, chosen: &mut Vec<usize>, best: &mut Vec<usize>, n: usize) {
    if covered == all {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    if chosen.len() + 1 >= best.len() {
        return;
    }
    // branch on the uncovered vertex with the fewest options
    let options = (0..n)
        .filter(|&v| covered[v / 64] >> (v % 64) & 1 == 0)
        .map(|v| (0..bits.len()).filter(|&i| bits[i][v / 64] >> (v % 64) & 1 == 1).collect::<Vec<_>>())
        .min_by_key(Vec::len)
        .unwrap();
    for i in options {
        let next: Bits = covered.iter().zip(&bits[i]).map(|(c, x)| c | x).collect();
        chosen.push(i);
        branch(bits, all, &next, chosen, best, n);
        chosen.pop();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyTerm {
    /// Number of factors in the join.
    pub n: usize,
    pub elements: usize,
    pub s: usize,
    pub method: Method,
    /// `(1/n)·ln s`.
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub terms: Vec<EntropyTerm>,
    /// Quotient of the last term.
    pub last: f64,
    /// Smallest quotient among exactly computed terms; by submultiplicativity
    /// every such quotient bounds `h(f, 𝒰)` from above.
    pub infimum: Option<f64>,
}

impl EntropyEstimate {
    fn from_terms(terms: Vec<EntropyTerm>) -> Self {
        let last = terms.last().map_or(0.0, |t| t.quotient);
        let infimum = terms.iter().filter(|t| t.method == Method::Exact).map(|t| t.quotient).reduce(f64::min);
        EntropyEstimate { terms, last, infimum }
    }

    /// Pairs `(m, n)` with exact terms violating `s_{m+n} ≤ s_m · s_n`.
    pub fn submultiplicativity_violations(&self) -> Vec<(usize, usize)> {
        let exact: Vec<&EntropyTerm> = self.terms.iter().filter(|t| t.method == Method::Exact).collect();
        let mut out = Vec::new();
        for a in &exact {
            for b in &exact {
                if a.n > b.n {
                    continue;
                }
                if let Some(c) = exact.iter().find(|c| c.n == a.n + b.n) {
                    if c.s > a.s * b.s {
                        out.push((a.n, b.n));
                    }
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,s,method,quotient\n");
        for t in &self.terms {
            out.push_str(&format!("{},{},{},{:.12}\n", t.n, t.s, t.method.tag(), t.quotient));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ln2 = std::f64::consts::LN_2;
        serde_json::json!({
            "terms": self.terms.iter().map(|t| serde_json::json!({
                "n": t.n,
                "elements": t.elements,
                "s": t.s,
                "method": t.method.tag(),
                "quotient_nats": format!("{:.12}", t.quotient),
                "quotient_bits": format!("{:.12}", t.quotient / ln2),
            })).collect::<Vec<_>>(),
            "last": { "nats": format!("{:.12}", self.last), "bits": format!("{:.12}", self.last / ln2) },
            "infimum": self.infimum.map(|x| serde_json::json!({
                "nats": format!("{x:.12}"), "bits": format!("{:.12}", x / ln2),
            })),
        })
    }
}

fn term(n: usize, elements: usize, s: usize, method: Method) -> EntropyTerm {
    EntropyTerm { n, elements, s, method, quotient: (s as f64).ln() / n as f64 }
}

/// Terms `n = 1..=n_max` for the arc cover of a circle system.
pub fn entropy_estimate_circle(sys: &CircleSystem, n_max: usize, arc_cap: usize) -> Result<EntropyEstimate> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let levels = circle_levels(sys, n_max - 1, arc_cap)?;
    let mut terms = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        let (s, _) = min_subcover_arcs(level)?;
        terms.push(term(k + 1, level.len(), s, Method::Exact));
    }
    Ok(EntropyEstimate::from_terms(terms))
}

/// Terms `n = 1..=n_max` for a finite model; finite spaces have entropy 0, so
/// the sequence is eventually `ln s / n` with bounded `s`.
pub fn entropy_estimate_finite(cover: &Cover, f: &[usize], n_max: usize) -> Result<EntropyEstimate> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let levels = finite_levels(cover, f, n_max - 1)?;
    let mut terms = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        let (s, _, method) = min_subcover_sets(cover.n_vertices(), level)?;
        terms.push(term(k + 1, level.len(), s, method));
    }
    Ok(EntropyEstimate::from_terms(terms))
}
