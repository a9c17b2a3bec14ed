//! Exact spectral data of an induced endomorphism and the entropy lower bounds
//! read off from it.
//!
//! Eigenvalues are handled symbolically: an irreducible factor `P` of the
//! minimal polynomial defines ℚ(λ) = ℚ[t]/(P), and eigenvectors are computed
//! with coefficients in that field. Floating point enters only when reporting
//! `|λ|` for the logarithm.
//!
//! The quantitative Diophantine estimate that turns a nonzero integral into a
//! growth rate has constants that are not effective, so only its zero/nonzero
//! dichotomy is implemented ([`exact_integral_zero_test`]).

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::field::{to_f64, Field, Q};
use crate::linalg::Matrix;
use crate::numberfield::NumberFieldElement;
use crate::poly::{factor_partial, RatPolynomial};
use crate::scale_algebra::matrix_json;

/// `det(tI − M)` by Berkowitz's division-free recursion.
pub fn char_poly(m: &Matrix<Q>) -> RatPolynomial {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.rows();
    // coefficients, highest degree first
    let mut v: Vec<Q> = vec![Q::one()];
    for r in 0..n {
        let mut col = vec![Q::one(), -m[(r, r)].clone()];
        let mut x: Vec<Q> = (0..r).map(|i| m[(i, r)].clone()).collect();
        for _ in 0..r {
            let rx: Q = (0..r).map(|j| &m[(r, j)] * &x[j]).sum();
            col.push(-rx);
            x = (0..r).map(|i| (0..r).map(|j| &m[(i, j)] * &x[j]).sum()).collect();
        }
        v = (0..r + 2).map(|i| (0..=i.min(v.len() - 1)).map(|j| &col[i - j] * &v[j]).sum()).collect();
    }
    v.reverse();
    RatPolynomial::new(v)
}

/// Least-degree monic `p` with `p(M)v = 0`, from the Krylov sequence of `v`.
pub fn local_min_poly(m: &Matrix<Q>, v: &[Q]) -> RatPolynomial {
    let mut krylov: Vec<Vec<Q>> = vec![v.to_vec()];
    loop {
        let next = m.mul_vec(krylov.last().unwrap());
        let basis = Matrix::from_columns(v.len(), &krylov);
        if let Some(c) = basis.solve(&next) {
            let mut coeffs: Vec<Q> = c.into_iter().map(|x| -x).collect();
            coeffs.push(Q::one());
            return RatPolynomial::new(coeffs);
        }
        krylov.push(next);
    }
}

/// Least common multiple of the local minimal polynomials of the unit vectors.
pub fn min_poly(m: &Matrix<Q>) -> RatPolynomial {
    assert!(m.is_square(), "minimal polynomial of a non-square matrix");
    let n = m.rows();
    (0..n).fold(RatPolynomial::one(), |acc, i| {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::one();
        acc.lcm(&local_min_poly(m, &e))
    })
}

/// Rank of `{w, Mw, …, M^{k−1}w}`.
pub fn krylov_rank(m: &Matrix<Q>, w: &[Q], k: usize) -> usize {
    let mut cols = vec![w.to_vec()];
    for _ in 1..k {
        cols.push(m.mul_vec(cols.last().unwrap()));
    }
    Matrix::from_columns(w.len(), &cols).rank()
}

/// A nonzero `w` in the image of `Q(M)`, where `min_poly(M) = Q·P`, so that the
/// minimal annihilator of `w` is the irreducible `P`.
pub fn rational_eigen_seed(m: &Matrix<Q>, p: &RatPolynomial) -> Result<Vec<Q>> {
    let mp = min_poly(m);
    let (cofactor, r) = mp.divrem(p);
    if !r.is_zero() {
        return Err(Error::NotADivisor);
    }
    let n = m.rows();
    for i in 0..n {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::one();
        let w = cofactor.apply(m, &e);
        if w.iter().any(|x| !x.is_zero()) {
            debug_assert!(p.apply(m, &w).iter().all(|x| x.is_zero()));
            return Ok(w);
        }
    }
    unreachable!("a proper divisor of the minimal polynomial cannot annihilate M")
}

#[derive(Clone, Debug)]
pub struct EigenVector {
    /// Defining polynomial of λ, monic irreducible.
    pub p: Arc<RatPolynomial>,
    pub lambda: NumberFieldElement,
    /// Coefficients of `P(t)/(t − λ)` from the top: `μ₀ = 1`.
    pub mu: Vec<NumberFieldElement>,
    /// `z = Σ_j μ_j M^{d−1−j} w`.
    pub z: Vec<NumberFieldElement>,
}

impl EigenVector {
    pub fn degree(&self) -> usize {
        self.mu.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "defining_polynomial": self.p.to_json(),
            "degree": self.degree(),
            "mu": self.mu.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "z": self.z.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Eigenvector of `M` for a root λ of `p`, with coordinates in ℚ(λ), built
/// from a seed whose minimal annihilator is `p`. Checks `(M − λ)z = 0`.
pub fn eigenvector_over_field(m: &Matrix<Q>, p: &RatPolynomial, w: &[Q]) -> Result<EigenVector> {
    let p = Arc::new(p.monic());
    let d = p.degree().filter(|&d| d >= 1).ok_or(Error::SeedMismatch)?;
    if local_min_poly(m, w) != *p {
        return Err(Error::SeedMismatch);
    }
    debug_assert_eq!(krylov_rank(m, w, d), d);
    let lambda = NumberFieldElement::generator(p.clone());
    // synthetic division: b_{d−1} = 1, b_{k−1} = p_k + λ b_k
    let mut mu = vec![NumberFieldElement::one()];
    for k in (1..d).rev() {
        let next = NumberFieldElement::rational(p.coeff(k)).add(&lambda.mul(mu.last().unwrap()));
        mu.push(next);
    }
    let mut powers = vec![w.to_vec()];
    for _ in 1..d {
        powers.push(m.mul_vec(powers.last().unwrap()));
    }
    let n = w.len();
    let mut z = vec![NumberFieldElement::zero(); n];
    for (j, muj) in mu.iter().enumerate() {
        for (zi, x) in z.iter_mut().zip(&powers[d - 1 - j]) {
            *zi = zi.add(&muj.mul(&NumberFieldElement::rational(x.clone())));
        }
    }
    for i in 0..n {
        let mz = (0..n).fold(NumberFieldElement::zero(), |acc, j| {
            acc.add(&NumberFieldElement::rational(m[(i, j)].clone()).mul(&z[j]))
        });
        if !mz.sub(&lambda.mul(&z[i])).is_zero() {
            return Err(Error::Precondition("eigenvector check (M − λ)z = 0 failed".into()));
        }
    }
    Ok(EigenVector { p, lambda, mu, z })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroTest {
    Zero,
    Nonzero(NumberFieldElement),
}

/// Decides exactly whether `S = Σ μ_j C_j` vanishes in ℚ(λ).
pub fn exact_integral_zero_test(mu: &[NumberFieldElement], c: &[BigInt]) -> Result<ZeroTest> {
    if mu.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: mu.len(), found: c.len() });
    }
    let s = mu.iter().zip(c).fold(NumberFieldElement::zero(), |acc, (m, cj)| {
        acc.add(&m.mul(&NumberFieldElement::rational(Q::from_integer(cj.clone()))))
    });
    Ok(if s.is_zero() { ZeroTest::Zero } else { ZeroTest::Nonzero(s) })
}

/// All complex roots of a square-free polynomial: companion-matrix eigenvalues
/// polished by Newton steps.
pub fn complex_roots(p: &RatPolynomial) -> Vec<Complex64> {
    let p = p.monic();
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Vec::new(),
    };
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -to_f64(&p.coeff(i))
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let dp = p.derivative();
    let mut roots: Vec<Complex64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|&z| {
            let mut z = z;
            for _ in 0..8 {
                let denom = dp.eval_f64(z);
                if denom.norm() == 0.0 {
                    break;
                }
                let step = p.eval_f64(z) / denom;
                z -= step;
                if step.norm() <= 1e-17 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect();
    roots.sort_by(|a, b| (b.norm(), b.im).partial_cmp(&(a.norm(), a.im)).unwrap());
    roots
}

/// Whether a monic integer polynomial divides `t^k − 1` for some small `k`;
/// then every root has modulus exactly 1.
fn is_cyclotomic_product(p: &RatPolynomial) -> bool {
    if !p.is_monic() || p.coeffs().iter().any(|c| !c.is_integer()) {
        return false;
    }
    (1..=60).any(|k| {
        let mut c = vec![Q::zero(); k + 1];
        c[0] = -Q::one();
        c[k] = Q::one();
        p.divides(&RatPolynomial::new(c))
    })
}

/// Roots above this modulus count as expanding; anything at or below is treated
/// as modulus ≤ 1.
const MODULUS_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct FactorReport {
    pub poly: RatPolynomial,
    pub multiplicity: usize,
    pub irreducible: bool,
    pub roots: Vec<Complex64>,
    pub max_modulus: Option<f64>,
    /// `log|λ|` and `log|λ|/d` for the largest root, when it exceeds 1.
    pub bound_locally_connected: Option<f64>,
    pub bound_general: Option<f64>,
}

impl FactorReport {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub matrix: Matrix<Q>,
    pub char_poly: RatPolynomial,
    pub min_poly: RatPolynomial,
    pub factors: Vec<FactorReport>,
    /// Maxima over factors, in nats; 0 when vacuous.
    pub bound_locally_connected: f64,
    pub bound_general: f64,
    pub vacuous: bool,
    /// Index of the factor attaining the locally-connected bound.
    pub dominant: Option<usize>,
    pub eigenvector: Option<EigenVector>,
}

fn fixed(x: f64) -> String {
    format!("{x:.12}")
}

impl SpectralReport {
    pub fn to_json(&self) -> serde_json::Value {
        let ln2 = std::f64::consts::LN_2;
        serde_json::json!({
            "matrix": matrix_json(&self.matrix),
            "characteristic_polynomial": self.char_poly.to_json(),
            "minimal_polynomial": self.min_poly.to_json(),
            "factors": self.factors.iter().map(|f| serde_json::json!({
                "polynomial": f.poly.to_json(),
                "multiplicity": f.multiplicity,
                "degree": f.degree(),
                "status": if f.irreducible { "irreducible" } else { "unfactored" },
                "roots": f.roots.iter().map(|z| serde_json::json!({
                    "re": fixed(z.re), "im": fixed(z.im), "modulus": fixed(z.norm()),
                })).collect::<Vec<_>>(),
                "max_modulus": f.max_modulus.map(fixed),
                "bound_locally_connected_nats": f.bound_locally_connected.map(fixed),
                "bound_general_nats": f.bound_general.map(fixed),
            })).collect::<Vec<_>>(),
            "bounds": {
                "vacuous": self.vacuous,
                "locally_connected": {
                    "nats": fixed(self.bound_locally_connected),
                    "bits": fixed(self.bound_locally_connected / ln2),
                },
                "general": {
                    "nats": fixed(self.bound_general),
                    "bits": fixed(self.bound_general / ln2),
                },
                "degree": self.dominant.map(|i| self.factors[i].degree()),
            },
            "eigenvector": self.eigenvector.as_ref().map(|e| e.to_json()),
        })
    }
}

/// Spectral report and entropy lower bounds for an endomorphism of `H¹` at a scale.
pub fn entropy_bounds(m: &Matrix<Q>, degree_cap: usize) -> Result<SpectralReport> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let cp = char_poly(m);
    let mp = min_poly(m);
    let factorization = if m.rows() == 0 { Vec::new() } else { factor_partial(&cp, degree_cap).factors };
    let mut factors = Vec::new();
    for f in factorization {
        let mut report = FactorReport {
            poly: f.poly.clone(),
            multiplicity: f.multiplicity,
            irreducible: f.irreducible,
            roots: Vec::new(),
            max_modulus: None,
            bound_locally_connected: None,
            bound_general: None,
        };
        if f.irreducible {
            let d = f.poly.degree().unwrap();
            report.roots = complex_roots(&f.poly);
            let (modulus, expanding) = if d == 1 {
                let a = -f.poly.coeff(0);
                (to_f64(&a.abs()), a.abs() > Q::one())
            } else {
                let r = report.roots.first().map_or(0.0, |z| z.norm());
                (r, !is_cyclotomic_product(&f.poly) && r > 1.0 + MODULUS_SLACK)
            };
            report.max_modulus = Some(modulus);
            if expanding {
                let lc = modulus.ln();
                report.bound_locally_connected = Some(lc);
                report.bound_general = Some(lc / d as f64);
            }
        }
        factors.push(report);
    }
    let dominant = (0..factors.len())
        .filter(|&i| factors[i].bound_locally_connected.is_some())
        .max_by(|&a, &b| factors[a].bound_locally_connected.partial_cmp(&factors[b].bound_locally_connected).unwrap());
    let bound_general = factors.iter().filter_map(|f| f.bound_general).fold(0.0, f64::max);
    let eigenvector = match dominant {
        Some(i) => {
            let p = &factors[i].poly;
            let w = rational_eigen_seed(m, p)?;
            Some(eigenvector_over_field(m, p, &w)?)
        }
        None => None,
    };
    Ok(SpectralReport {
        matrix: m.clone(),
        char_poly: cp,
        min_poly: mp,
        bound_locally_connected: dominant.map_or(0.0, |i| factors[i].bound_locally_connected.unwrap()),
        bound_general,
        vacuous: dominant.is_none(),
        dominant,
        factors,
        eigenvector,
    })
}

/// Companion matrix of a monic polynomial (last column holds `−p_i`).
pub fn companion(p: &RatPolynomial) -> Matrix<Q> {
    let p = p.monic();
    let d = p.degree().unwrap_or(0);
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            m[(i + 1, i)] = Q::one();
        }
        m[(i, d - 1)] = -p.coeff(i);
    }
    m
}
