//! One-dimensional cycle manipulation at a scale: decomposition into
//! elementary cycles, surgery into simple pieces, and refinement to a finer
//! cover with a norm bound.

use std::collections::{BTreeMap, VecDeque};

use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::spaces::Cover;

/// Vertex walk `x₁ … x_n` standing for `Σ (x_i x_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryChain {
    pub walk: Vec<usize>,
    /// Injective assignment of the walk's edges to cover elements, when one
    /// exists (lexicographically smallest).
    pub matching: Option<Vec<usize>>,
}

impl ElementaryChain {
    /// Validates smallness and the elementary condition against `cover`.
    pub fn new(walk: Vec<usize>, cover: &Cover) -> Result<Self> {
        let sets = cover_sets(cover);
        Self::with_sets(walk, &sets)
    }

    fn with_sets(walk: Vec<usize>, sets: &[(usize, Vec<usize>)]) -> Result<Self> {
        if walk.len() < 2 {
            return Err(Error::NotElementary("a walk needs at least one edge".into()));
        }
        let closed = walk.first() == walk.last();
        let distinct_part = if closed { &walk[..walk.len() - 1] } else { &walk[..] };
        let mut seen = distinct_part.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotElementary(format!("repeated vertex in {walk:?}")));
        }
        let candidates = edge_candidates(&walk, sets)?;
        let matching = lexicographic_matching(&candidates);
        Ok(ElementaryChain { walk, matching })
    }

    pub fn is_cycle(&self) -> bool {
        self.walk.first() == self.walk.last()
    }

    pub fn is_simple(&self) -> bool {
        self.matching.is_some()
    }

    pub fn edges(&self) -> usize {
        self.walk.len() - 1
    }

    pub fn chain(&self) -> Chain<Q> {
        let mut c = Chain::zero(1);
        for w in self.walk.windows(2) {
            c.add_term(vec![w[0], w[1]], Q::one());
        }
        c
    }
}

fn cover_sets(cover: &Cover) -> Vec<(usize, Vec<usize>)> {
    cover.elements().iter().enumerate().map(|(i, e)| (i, e.members.clone())).collect()
}

fn set_contains(set: &[usize], v: usize) -> bool {
    set.binary_search(&v).is_ok()
}

/// For each edge, the positions (into `sets`) of elements containing it.
fn edge_candidates(walk: &[usize], sets: &[(usize, Vec<usize>)]) -> Result<Vec<Vec<usize>>> {
    walk.windows(2)
        .map(|w| {
            let c: Vec<usize> =
                (0..sets.len()).filter(|&k| set_contains(&sets[k].1, w[0]) && set_contains(&sets[k].1, w[1])).collect();
            if c.is_empty() {
                Err(Error::NotSmall { simplex: w.to_vec() })
            } else {
                Ok(c)
            }
        })
        .collect()
}

fn augment(u: usize, cand: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool], fixed: usize) -> bool {
    for &k in &cand[u] {
        if seen[k] {
            continue;
        }
        seen[k] = true;
        let free = match owner[k] {
            None => true,
            Some(o) => o >= fixed && augment(o, cand, owner, seen, fixed),
        };
        if free {
            owner[k] = Some(u);
            return true;
        }
    }
    false
}

/// Whether edges `from..` can be matched into elements not in `used`.
fn completable(cand: &[Vec<usize>], from: usize, used: &[bool]) -> bool {
    let n_sets = used.len();
    let mut owner: Vec<Option<usize>> = vec![None; n_sets];
    for (k, &u) in used.iter().enumerate() {
        if u {
            owner[k] = Some(usize::MAX);
        }
    }
    for u in from..cand.len() {
        let mut seen = used.to_vec();
        if !augment(u, cand, &mut owner, &mut seen, from) {
            return false;
        }
    }
    true
}

fn lexicographic_matching(cand: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n_sets = cand.iter().flatten().copied().max().map_or(0, |m| m + 1);
    let mut used = vec![false; n_sets];
    if !completable(cand, 0, &used) {
        return None;
    }
    let mut out = Vec::with_capacity(cand.len());
    for (u, options) in cand.iter().enumerate() {
        let pick = options.iter().copied().find(|&k| {
            if used[k] {
                return false;
            }
            used[k] = true;
            let ok = completable(cand, u + 1, &used);
            used[k] = false;
            ok
        })?;
        used[pick] = true;
        out.push(pick);
    }
    Some(out)
}

/// Writes a small 1-cycle as `Σ k_i e_i` with elementary cycles `e_i` whose
/// edges all occur in `c` (up to orientation); homologous to `c` at scale.
pub fn elementary_decomposition(c: &Chain<Q>, cover: &Cover) -> Result<Vec<(Q, ElementaryChain)>> {
    if c.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: c.dim() });
    }
    if let Some(s) = c.first_non_small(cover) {
        return Err(Error::NotSmall { simplex: s.clone() });
    }
    if !c.is_cycle() {
        return Err(Error::NotACycle);
    }
    let mut out = Vec::new();
    // flow along undirected edges, oriented from the smaller vertex
    let mut flow: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    for (s, k) in c.terms() {
        let (a, b) = (s[0], s[1]);
        if a == b {
            out.push((k.clone(), ElementaryChain::new(vec![a, a], cover)?));
            continue;
        }
        let (key, val) = if a < b { ((a, b), k.clone()) } else { ((b, a), k.neg()) };
        let e = flow.entry(key).or_insert_with(Q::zero);
        *e = e.add(&val);
    }
    flow.retain(|_, v| !v.is_zero());

    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in flow.keys() {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut parent: BTreeMap<usize, Option<usize>> = BTreeMap::new();
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let mut tree_edges = std::collections::BTreeSet::new();
    for &root in adj.keys() {
        if parent.contains_key(&root) {
            continue;
        }
        parent.insert(root, None);
        depth.insert(root, 0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[&u] {
                if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(v) {
                    slot.insert(Some(u));
                    depth.insert(v, depth[&u] + 1);
                    tree_edges.insert((u.min(v), u.max(v)));
                    queue.push_back(v);
                }
            }
        }
    }
    for (&(u, v), k) in &flow {
        if tree_edges.contains(&(u, v)) {
            continue;
        }
        // walk u → v, then back to u along the tree
        let (mut a, mut b) = (v, u);
        let mut up_from_v = vec![v];
        let mut up_from_u = vec![u];
        while a != b {
            if depth[&a] >= depth[&b] {
                a = parent[&a].expect("same tree");
                up_from_v.push(a);
            } else {
                b = parent[&b].expect("same tree");
                up_from_u.push(b);
            }
        }
        up_from_u.pop();
        let mut walk = vec![u];
        walk.extend(up_from_v);
        walk.extend(up_from_u.into_iter().rev());
        out.push((k.clone(), ElementaryChain::new(walk, cover)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surgery {
    pub i: usize,
    pub j: usize,
    pub element: usize,
}

#[derive(Clone, Debug)]
pub struct Simplification {
    pub e0: ElementaryChain,
    pub cycles: Vec<ElementaryChain>,
    pub log: Vec<Surgery>,
}

/// Splits an elementary chain into a simple elementary chain and simple
/// elementary cycles, homologous to it at scale, by repeated surgery on two
/// edges that share a cover element.
pub fn simplify(e: &ElementaryChain, cover: &Cover) -> Result<Simplification> {
    simplify_with(e, &cover_sets(cover))
}

fn simplify_with(e: &ElementaryChain, sets: &[(usize, Vec<usize>)]) -> Result<Simplification> {
    let mut log = Vec::new();
    let mut cycles = Vec::new();
    let mut pending = vec![(e.walk.clone(), true)];
    let mut e0 = None;
    while let Some((walk, is_main)) = pending.pop() {
        let current = ElementaryChain::with_sets(walk, sets)?;
        if current.is_simple() {
            if is_main {
                e0 = Some(current);
            } else {
                cycles.push(current);
            }
            continue;
        }
        // each edge gets the smallest-index element containing it
        let assigned: Vec<usize> = edge_candidates(&current.walk, sets)?.into_iter().map(|c| c[0]).collect();
        let mut best: Option<(usize, usize)> = None;
        for i in 0..assigned.len() {
            if let Some(j) = (i + 1..assigned.len()).find(|&j| assigned[j] == assigned[i]) {
                if best.is_none_or(|(bi, bj)| j - i < bj - bi) {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("a non-simple walk repeats an element under any assignment");
        log.push(Surgery { i, j, element: sets[assigned[i]].0 });
        let w = &current.walk;
        // (x_i x_{i+1}) + (x_j x_{j+1}) → (x_i x_{j+1}) + (x_j x_{i+1})
        let mut main: Vec<usize> = w[..=i].to_vec();
        main.extend_from_slice(&w[j + 1..]);
        let mut side: Vec<usize> = w[i + 1..=j].to_vec();
        side.push(w[i + 1]);
        pending.push((side, false));
        pending.push((main, is_main));
    }
    Ok(Simplification { e0: e0.expect("main walk survives"), cycles, log })
}

#[derive(Clone, Debug)]
pub struct RefinedPiece {
    pub simplex: Vec<usize>,
    pub coarse_element: usize,
    pub replacement: ElementaryChain,
}

#[derive(Clone, Debug)]
pub struct Refinement {
    pub chain: Chain<Q>,
    pub pieces: Vec<RefinedPiece>,
    pub norm_before: Q,
    pub norm_after: Q,
    /// `‖c‖₁ · |fine|`.
    pub norm_bound: Q,
}

/// Replaces every 1-simplex `(x y)` of a coarse-small chain by a simple
/// fine-small elementary chain from `x` to `y` inside the smallest-index coarse
/// element containing `(x y)`.
pub fn refine(c: &Chain<Q>, coarse: &Cover, fine: &Cover) -> Result<Refinement> {
    if c.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: c.dim() });
    }
    let mut out = Chain::zero(1);
    let mut pieces = Vec::new();
    for (s, k) in c.terms() {
        let (x, y) = (s[0], s[1]);
        if x == y {
            out.add_term(s.clone(), k.clone());
            continue;
        }
        let ui = coarse.element_containing_all(s).ok_or_else(|| Error::NotSmall { simplex: s.clone() })?;
        let members = coarse.element(ui);
        let traces = fine.restricted_to(members);
        let path = bfs_path(members, &traces, x, y).ok_or(Error::DisconnectedElement { element: ui })?;
        let e = ElementaryChain::with_sets(path, &traces)?;
        let simple = simplify_with(&e, &traces)?.e0;
        out = out.add(&simple.chain().scale(k));
        pieces.push(RefinedPiece { simplex: s.clone(), coarse_element: ui, replacement: simple });
    }
    let norm_before = c.norm1()?;
    let norm_after = out.norm1()?;
    let norm_bound = &norm_before * Q::from_i64(fine.len() as i64);
    Ok(Refinement { chain: out, pieces, norm_before, norm_after, norm_bound })
}

/// Shortest path from `x` to `y` in the graph on `members` whose edges are pairs
/// inside a common trace; `None` unless the whole graph is connected.
fn bfs_path(members: &[usize], traces: &[(usize, Vec<usize>)], x: usize, y: usize) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    prev.insert(x, x);
    let mut queue = VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        let mut nbrs: Vec<usize> = traces
            .iter()
            .filter(|(_, t)| set_contains(t, u))
            .flat_map(|(_, t)| t.iter().copied())
            .filter(|&v| v != u)
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        for v in nbrs {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(v) {
                e.insert(u);
                queue.push_back(v);
            }
        }
    }
    if members.iter().any(|m| !prev.contains_key(m)) {
        return None;
    }
    let mut path = vec![y];
    let mut cur = y;
    while cur != x {
        cur = prev[&cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}
