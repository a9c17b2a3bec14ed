//! Seeded random generators and the invariant suites behind `verify`.

use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::Chain;
use crate::cochains::Cochain;
use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::linalg::Matrix;
use crate::model::ModelDocument;
use crate::pairing::{ordered_small_tuples, pairing_matrix};
use crate::pipeline::{select_endomorphism, Options};
use crate::poly::{factor_partial, RatPolynomial};
use crate::scale_algebra::{build_complex, endomorphism, ScaleComplex, Variance, DEFAULT_SIMPLEX_CAP};
use crate::spaces::{join_covers, refines, Cover};
use crate::spectral::{char_poly, min_poly};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const SEED_VAR: &str = "SCALEHOM_SEED";

/// Seed from `SCALEHOM_SEED` (decimal or `0x` hex), else the default.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Err(_) => Ok(DEFAULT_SEED),
        Ok(s) => {
            let s = s.trim();
            let parsed = match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => s.parse(),
            };
            parsed.map_err(|_| Error::Input(format!("{SEED_VAR} is not an integer: {s:?}")))
        }
    }
}

pub mod gen {
    use super::*;

    pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    }

    /// A cover of `n` vertices by `k` random subsets of size at most
    /// `max_size`, patched so every vertex is covered.
    pub fn cover(rng: &mut impl Rng, n: usize, k: usize, max_size: usize) -> Cover {
        let mut sets: Vec<Vec<usize>> = (0..k)
            .map(|_| {
                let size = rng.random_range(1..=max_size.min(n));
                let mut all: Vec<usize> = (0..n).collect();
                let (chosen, _) = all.partial_shuffle(rng, size);
                chosen.to_vec()
            })
            .collect();
        for v in 0..n {
            if !sets.iter().any(|s| s.contains(&v)) {
                let i = rng.random_range(0..k);
                sets[i].push(v);
            }
        }
        Cover::new(n, sets).expect("patched cover")
    }

    pub fn coefficient(rng: &mut impl Rng) -> Q {
        let k = rng.random_range(-3i64..=3);
        Q::from_i64(if k == 0 { 1 } else { k })
    }

    /// Random small ordered `q`-chain: tuples (repeats allowed) drawn inside
    /// random cover elements.
    pub fn small_chain(rng: &mut impl Rng, cover: &Cover, q: usize, terms: usize) -> Chain<Q> {
        let t = (0..terms).map(|_| {
            let e = cover.element(rng.random_range(0..cover.len()));
            let s: Vec<usize> = (0..=q).map(|_| *e.choose(rng).unwrap()).collect();
            (s, coefficient(rng))
        });
        Chain::from_terms(q, t.collect::<Vec<_>>()).unwrap()
    }

    /// Random chain supported in the single element `e`.
    pub fn chain_in(rng: &mut impl Rng, e: &[usize], q: usize, terms: usize) -> Chain<Q> {
        let t: Vec<_> = (0..terms)
            .map(|_| ((0..=q).map(|_| *e.choose(rng).unwrap()).collect::<Vec<_>>(), coefficient(rng)))
            .collect();
        Chain::from_terms(q, t).unwrap()
    }

    /// Random cochain on about `density` of the small ordered `(q+1)`-tuples.
    pub fn small_cochain(rng: &mut impl Rng, scale: &Arc<Cover>, q: usize, density: f64) -> Cochain<Q> {
        let mut entries = Vec::new();
        for t in ordered_small_tuples(scale, q + 1) {
            if rng.random_bool(density) {
                entries.push((t, coefficient(rng)));
            }
        }
        Cochain::from_entries(q, scale.clone(), entries).unwrap()
    }

    /// Random integer matrix with entries in `-r..=r`.
    pub fn int_matrix(rng: &mut impl Rng, n: usize, r: i64) -> Matrix<Q> {
        Matrix::from_rows((0..n).map(|_| (0..n).map(|_| Q::from_i64(rng.random_range(-r..=r))).collect()).collect())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.name,
            "cases": self.cases,
            "passed": self.passed(),
            "failures": self.failures,
        })
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }

    fn done(self) -> SuiteOutcome {
        SuiteOutcome { name: self.name, cases: self.cases, failures: self.failures }
    }
}

fn complex(cover: Cover, max_q: usize) -> Result<ScaleComplex> {
    build_complex(Arc::new(cover), max_q, DEFAULT_SIMPLEX_CAP)
}

/// `∂∂ = 0`, `δδ = 0` and `(δξ)(c) = ξ(∂c)`.
pub fn chain_complex_suite(seed: u64, rounds: usize) -> SuiteOutcome {
    let mut t = Tally::new("chain-complex");
    let mut rng = gen::rng(seed, 1);
    for round in 0..rounds {
        let n = rng.random_range(3..=8);
        let cover = Arc::new({
            let k = rng.random_range(2..=5);
            gen::cover(&mut rng, n, k, 4)
        });
        for q in 0..=2 {
            let c = gen::small_chain(&mut rng, &cover, q + 2, 6);
            let dd = c.boundary().and_then(|b| b.boundary());
            t.check(dd.is_ok_and(|x| x.is_zero()), || format!("round {round}: ∂∂ ≠ 0 in dim {q}"));
            let x = gen::small_cochain(&mut rng, &cover, q, 0.3);
            t.check(x.coboundary().coboundary().is_zero(), || format!("round {round}: δδ ≠ 0 in dim {q}"));
            let c = gen::small_chain(&mut rng, &cover, q + 1, 6);
            let lhs = x.coboundary().evaluate(&c);
            let rhs = c.boundary().and_then(|b| x.evaluate(&b));
            t.check(matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b), || {
                format!("round {round}: Stokes fails in dim {q}")
            });
        }
    }
    t.done()
}

/// Cycles inside one cover element vanish in homology and `∂ cone = id` on them.
pub fn cone_suite(seed: u64, rounds: usize) -> SuiteOutcome {
    let mut t = Tally::new("cone");
    let mut rng = gen::rng(seed, 2);
    for round in 0..rounds {
        let n = rng.random_range(3..=8);
        let cover = {
            let k = rng.random_range(2..=5);
            gen::cover(&mut rng, n, k, 4)
        };
        let e = cover.element(rng.random_range(0..cover.len())).to_vec();
        let Some(cx) = t.result(complex(cover, 2), "complex") else {
            continue;
        };
        let q = rng.random_range(1..=2usize);
        let Ok(c) = gen::chain_in(&mut rng, &e, q + 1, 5).boundary() else {
            continue;
        };
        let a = *e.choose(&mut rng).unwrap();
        let cone_ok = c.cone(a).boundary().is_ok_and(|b| b == c);
        t.check(cone_ok, || format!("round {round}: ∂cone(a, c) ≠ c"));
        {
            let coords = cx.homology_coordinates(&c);
            t.check(coords.is_ok_and(|v| v.iter().all(Q::is_zero)), || {
                format!("round {round}: cycle in one element has nonzero class")
            });
        }
    }
    t.done()
}

/// Equal dimensions and an invertible pairing for `q ∈ {0, 1}`.
pub fn nondegeneracy_suite(seed: u64, rounds: usize) -> SuiteOutcome {
    let mut t = Tally::new("nondegeneracy");
    let mut rng = gen::rng(seed, 3);
    for round in 0..rounds {
        let n = rng.random_range(2..=10);
        let cover = {
            let k = rng.random_range(1..=6);
            gen::cover(&mut rng, n, k, 4)
        };
        let Some(cx) = t.result(complex(cover, 1), "complex") else {
            continue;
        };
        for q in 0..=1 {
            let dims = cx.homology(q).map(|h| h.dim()).and_then(|a| Ok((a, cx.cohomology(q)?.dim())));
            t.check(matches!(dims, Ok((a, b)) if a == b), || format!("round {round}: dim H^{q} ≠ dim H_{q}"));
            let p = pairing_matrix(&cx, q);
            t.check(p.is_ok_and(|p| p.nondegenerate), || format!("round {round}: degenerate pairing in dim {q}"));
        }
    }
    t.done()
}

/// The integral ignores added boundaries and coboundaries.
pub fn integral_suite(seed: u64, rounds: usize) -> SuiteOutcome {
    let mut t = Tally::new("integral");
    let mut rng = gen::rng(seed, 4);
    for round in 0..rounds {
        // many small elements give nerves with cycles
        let n = rng.random_range(4..=9);
        let cover = {
            let k = rng.random_range(n..=2 * n);
            let size = rng.random_range(2..=3);
            gen::cover(&mut rng, n, k, size)
        };
        let scale = Arc::new(cover.clone());
        let Some(cx) = t.result(complex(cover, 1), "complex") else {
            continue;
        };
        let (Ok(h), Ok(co)) = (cx.homology(1), cx.cohomology(1)) else {
            continue;
        };
        for (c, z) in h.reps.iter().zip(&co.reps) {
            let Ok(base) = z.evaluate(c) else { continue };
            let Ok(db) = gen::small_chain(&mut rng, &scale, 2, 4).boundary() else {
                continue;
            };
            let dz = gen::small_cochain(&mut rng, &scale, 0, 0.5).coboundary();
            let moved = z.add(&dz).evaluate(&c.add(&db));
            t.check(moved.is_ok_and(|v| v == base), || format!("round {round}: integral changed"));
        }
    }
    t.done()
}

/// Joins refine both factors; refinement is reflexive and transitive.
pub fn cover_suite(seed: u64, rounds: usize) -> SuiteOutcome {
    let mut t = Tally::new("covers");
    let mut rng = gen::rng(seed, 5);
    for round in 0..rounds {
        let n = rng.random_range(1..=8);
        let [a, b, c] = [0, 1, 2].map(|_| {
            let k = rng.random_range(1..=5);
            gen::cover(&mut rng, n, k, n)
        });
        let j = join_covers(&a, &b).unwrap();
        t.check(refines(&j, &a).unwrap() && refines(&j, &b).unwrap(), || format!("round {round}: join"));
        t.check(refines(&a, &a).unwrap(), || format!("round {round}: reflexivity"));
        let chain = refines(&a, &b).unwrap() && refines(&b, &c).unwrap();
        t.check(!chain || refines(&a, &c).unwrap(), || format!("round {round}: transitivity"));
    }
    t.done()
}

/// Characteristic and minimal polynomials annihilate, the minimal one divides
/// the characteristic one, and factorizations multiply back.
pub fn polynomial_suite(seed: u64, rounds: usize) -> SuiteOutcome {
    let mut t = Tally::new("polynomials");
    let mut rng = gen::rng(seed, 6);
    for round in 0..rounds {
        let n = rng.random_range(1..=5);
        let m = gen::int_matrix(&mut rng, n, 2);
        let cp = char_poly(&m);
        let mp = min_poly(&m);
        t.check(cp.eval_matrix(&m).is_zero(), || format!("round {round}: char poly does not annihilate"));
        t.check(mp.eval_matrix(&m).is_zero(), || format!("round {round}: min poly does not annihilate"));
        t.check(mp.divides(&cp), || format!("round {round}: min poly does not divide char poly"));
        t.check(factor_partial(&cp, 8).product() == cp, || format!("round {round}: factor product differs"));
        let f: Vec<i64> = (0..rng.random_range(2..=4)).map(|_| rng.random_range(-3..=3)).collect();
        let g: Vec<i64> = (0..rng.random_range(2..=4)).map(|_| rng.random_range(-3..=3)).collect();
        let p = RatPolynomial::from_i64s(&f).mul(&RatPolynomial::from_i64s(&g));
        if p.degree().unwrap_or(0) >= 1 {
            t.check(factor_partial(&p, 8).product() == p, || format!("round {round}: factor product differs"));
        }
    }
    t.done()
}

/// All randomized suites with `rounds` cases each.
pub fn run_all(seed: u64, rounds: usize) -> Vec<SuiteOutcome> {
    vec![
        chain_complex_suite(seed, rounds),
        cone_suite(seed, rounds),
        nondegeneracy_suite(seed, rounds),
        integral_suite(seed, rounds),
        cover_suite(seed, rounds),
        polynomial_suite(seed, rounds),
    ]
}

/// Checks on a document: canonical round trip, nondegenerate pairings at every
/// declared cover, and for a map, homology and cohomology endomorphisms with
/// the same characteristic polynomial.
pub fn model_suite(doc: &ModelDocument, opts: &Options) -> SuiteOutcome {
    let mut t = Tally::new("model");
    let canon = doc.to_canonical_json();
    let again = ModelDocument::parse(&canon);
    t.check(again.is_ok_and(|d| d == *doc && d.to_canonical_json() == canon), || "canonical round trip".into());
    let mut declared = vec!["cover".to_string()];
    declared.extend(doc.finite.extra_covers.iter().map(|(n, _)| n.clone()));
    for name in &declared {
        let cx = doc.cover(Some(name)).and_then(|c| build_complex(c, 1, opts.simplex_cap));
        let Some(cx) = t.result(cx, name) else {
            continue;
        };
        for q in 0..=1 {
            let p = pairing_matrix(&cx, q);
            t.check(p.is_ok_and(|p| p.nondegenerate), || format!("cover {name}: degenerate pairing in dim {q}"));
        }
    }
    if doc.finite.map.is_some() {
        if let Ok(e) = select_endomorphism(doc, opts) {
            let f = doc.map().unwrap();
            let fine = doc.cover(Some(&e.fine)).and_then(|c| build_complex(c, opts.q, opts.simplex_cap));
            let coarse = doc.cover(Some(&e.coarse)).and_then(|c| build_complex(c, opts.q, opts.simplex_cap));
            if let (Ok(a), Ok(b)) = (fine, coarse) {
                let hom = endomorphism(f, &a, &b, opts.q, Variance::Homology);
                t.check(hom.is_ok_and(|h| char_poly(&h.matrix) == char_poly(&e.map.matrix)), || {
                    "homology and cohomology endomorphisms differ".into()
                });
            }
        }
    }
    t.done()
}
