//! End-to-end entropy check: induced endomorphism at a pair of scales, its
//! spectral bounds, and the cover-entropy estimate they should not exceed.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::entropy::{entropy_estimate_circle, entropy_estimate_finite, EntropyEstimate, DEFAULT_ARC_CAP};
use crate::error::{Error, Result};
use crate::model::ModelDocument;
use crate::poly::DEFAULT_DEGREE_CAP;
use crate::scale_algebra::{build_complex, endomorphism, ScaleComplex, ScaleMap, Variance, DEFAULT_SIMPLEX_CAP};
use crate::spectral::{entropy_bounds, SpectralReport};

/// Allowed shortfall of the entropy estimate below the spectral bound.
pub const MANNING_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct Options {
    pub fine: Option<String>,
    pub coarse: Option<String>,
    pub q: usize,
    pub n_max: usize,
    pub simplex_cap: usize,
    pub arc_cap: usize,
    pub degree_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            fine: None,
            coarse: None,
            q: 1,
            n_max: 10,
            simplex_cap: DEFAULT_SIMPLEX_CAP,
            arc_cap: DEFAULT_ARC_CAP,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

/// Caches scale complexes of a document by cover name.
pub struct Scales<'a> {
    doc: &'a ModelDocument,
    max_q: usize,
    cap: usize,
    built: BTreeMap<String, Arc<ScaleComplex>>,
}

impl<'a> Scales<'a> {
    pub fn new(doc: &'a ModelDocument, max_q: usize, cap: usize) -> Self {
        Scales { doc, max_q, cap, built: BTreeMap::new() }
    }

    pub fn get(&mut self, name: &str) -> Result<Arc<ScaleComplex>> {
        if let Some(c) = self.built.get(name) {
            return Ok(c.clone());
        }
        let cx = Arc::new(build_complex(self.doc.cover(Some(name))?, self.max_q, self.cap)?);
        self.built.insert(name.to_string(), cx.clone());
        Ok(cx)
    }
}

#[derive(Clone, Debug)]
pub struct Endomorphism {
    pub fine: String,
    pub coarse: String,
    pub automatic: bool,
    pub map: ScaleMap,
}

fn try_pair(scales: &mut Scales, f: &[usize], fine: &str, coarse: &str, q: usize) -> Result<ScaleMap> {
    let a = scales.get(fine)?;
    let b = scales.get(coarse)?;
    endomorphism(f, &a, &b, q, Variance::Cohomology)
}

/// The cohomology endomorphism `f^* ∘ π⁻¹` of `H^q` at the fine scale.
///
/// Scales not given explicitly are chosen automatically: the first pair, in
/// the document's cover order, with nonzero `H^q` and an invertible bonding
/// map that carries `f`. Resource caps abort the search; other failures only
/// rule out the pair.
pub fn select_endomorphism(doc: &ModelDocument, opts: &Options) -> Result<Endomorphism> {
    let f = doc.map()?;
    let mut scales = Scales::new(doc, opts.q, opts.simplex_cap);
    if let (Some(fine), Some(coarse)) = (&opts.fine, &opts.coarse) {
        let map = try_pair(&mut scales, f, fine, coarse, opts.q)?;
        return Ok(Endomorphism { fine: fine.clone(), coarse: coarse.clone(), automatic: false, map });
    }
    let names = doc.cover_names();
    let fines: Vec<String> = opts.fine.clone().map_or_else(|| names.clone(), |n| vec![n]);
    let coarses: Vec<String> = opts.coarse.clone().map_or_else(|| names.clone(), |n| vec![n]);
    for fine in &fines {
        if scales.get(fine)?.cohomology(opts.q)?.dim() == 0 {
            continue;
        }
        for coarse in &coarses {
            if coarse == fine {
                continue;
            }
            match try_pair(&mut scales, f, fine, coarse, opts.q) {
                Ok(map) => {
                    return Ok(Endomorphism { fine: fine.clone(), coarse: coarse.clone(), automatic: true, map })
                }
                Err(e) if e.kind() == crate::error::ErrorKind::ResourceCap => return Err(e),
                Err(_) => {}
            }
        }
    }
    Err(Error::Precondition(format!(
        "no pair of scales carries the map with an invertible bonding and nonzero H^{}",
        opts.q
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The estimate is at least the bound minus the tolerance.
    Consistent,
    /// The estimate falls short; a coarse cover or short horizon can do this.
    Inconclusive,
    /// Finite models have zero entropy; no comparison is made.
    NotApplicable,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ManningReport {
    pub endomorphism: Endomorphism,
    pub spectral: SpectralReport,
    pub entropy: EntropyEstimate,
    /// Best exact estimate of the cover entropy, in nats.
    pub estimate: Option<f64>,
    pub verdict: Verdict,
}

impl ManningReport {
    pub fn to_json(&self) -> Value {
        let e = &self.endomorphism;
        json!({
            "scales": { "fine": e.fine, "coarse": e.coarse, "automatic": e.automatic },
            "endomorphism": e.map.to_json(),
            "spectral": self.spectral.to_json(),
            "entropy": self.entropy.to_json(),
            "comparison": {
                "bound_nats": format!("{:.12}", self.spectral.bound_locally_connected),
                "estimate_nats": self.estimate.map(|x| format!("{x:.12}")),
                "tolerance_nats": format!("{MANNING_TOLERANCE}"),
                "verdict": self.verdict.tag(),
            },
        })
    }
}

/// Endomorphism, bounds, entropy estimate and verdict for a document with a map.
pub fn manning(doc: &ModelDocument, opts: &Options) -> Result<ManningReport> {
    let endomorphism = select_endomorphism(doc, opts)?;
    let spectral = entropy_bounds(&endomorphism.map.matrix, opts.degree_cap)?;
    let (entropy, verdict) = match &doc.circle {
        Some(c) => {
            let est = entropy_estimate_circle(&c.system, opts.n_max, opts.arc_cap)?;
            let consistent = est.infimum.is_some_and(|x| x >= spectral.bound_locally_connected - MANNING_TOLERANCE);
            (est, if consistent { Verdict::Consistent } else { Verdict::Inconclusive })
        }
        None => {
            let cover = doc.cover(None)?;
            let est = entropy_estimate_finite(&cover, doc.map()?, opts.n_max)?;
            (est, Verdict::NotApplicable)
        }
    };
    Ok(ManningReport { estimate: entropy.infimum, endomorphism, spectral, entropy, verdict })
}
