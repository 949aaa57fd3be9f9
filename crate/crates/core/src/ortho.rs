//! Univariate orthogonal polynomial systems.
//!
//! A system is given by the three-term recurrence
//!
//! ```text
//! π₋₁ = 0,  π₀ = 1,  π_{k+1}(x) = (γ_k x − α_k) π_k(x) − β_k π_{k−1}(x)
//! ```
//!
//! with β₀ = ‖π₀‖² = 1, so the underlying measure is a probability law and
//! `E(π_k(X)) = 0` for every `k ≥ 1`. Everything in this module is a pure
//! function of an immutable [`RecurrenceSystem`].

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative separation under which two roots of a node polynomial are
/// considered repeated.
const ROOT_SEPARATION: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
enum Family {
    /// Probabilists' Hermite polynomials, standard normal law.
    Hermite,
    /// Monic Legendre polynomials, uniform law on [-1, 1].
    Legendre,
    /// Monic Chebyshev polynomials of the first kind, arcsine law on [-1, 1].
    Chebyshev,
    Table {
        gamma: Vec<f64>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
    },
}

/// A univariate orthogonal system together with its moment functional.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSystem {
    name: String,
    family: Family,
}

impl RecurrenceSystem {
    pub fn hermite() -> Self {
        Self { name: "hermite".into(), family: Family::Hermite }
    }

    pub fn legendre() -> Self {
        Self { name: "legendre".into(), family: Family::Legendre }
    }

    pub fn chebyshev() -> Self {
        Self { name: "chebyshev".into(), family: Family::Chebyshev }
    }

    /// Looks up a built-in system by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hermite" => Ok(Self::hermite()),
            "legendre" => Ok(Self::legendre()),
            "chebyshev" => Ok(Self::chebyshev()),
            _ => Err(Error::UnknownSystem(name.to_string())),
        }
    }

    /// Builds a system from finite coefficient tables.
    ///
    /// The tables are validated against the recurrence's requirements:
    /// `γ_k ≠ 0`, `β₀ = 1`, and `γ_k γ_{k−1} β_k > 0` for `k ≥ 1` (which
    /// reduces to `β_k > 0` for monic systems). Polynomials can be evaluated
    /// up to degree `min(|γ|, |α|)`.
    pub fn custom(name: &str, gamma: Vec<f64>, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() || (beta[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidRecurrence(format!(
                "`{name}`: beta_0 must be 1 (probability normalization)"
            )));
        }
        if gamma.iter().chain(&alpha).chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidRecurrence(format!("`{name}`: non-finite coefficient")));
        }
        if let Some(k) = gamma.iter().position(|&g| g == 0.0) {
            return Err(Error::InvalidRecurrence(format!("`{name}`: gamma_{k} is zero")));
        }
        for k in 1..beta.len().min(gamma.len()) {
            if gamma[k] * gamma[k - 1] * beta[k] <= 0.0 {
                return Err(Error::InvalidRecurrence(format!(
                    "`{name}`: inner product not positive definite at k = {k}"
                )));
            }
        }
        Ok(Self { name: name.to_string(), family: Family::Table { gamma, alpha, beta } })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Letter used when rendering `π_k` of this system.
    pub fn symbol(&self) -> &'static str {
        match self.family {
            Family::Hermite => "H",
            Family::Legendre => "P",
            Family::Chebyshev => "T",
            Family::Table { .. } => "pi",
        }
    }

    pub fn is_monic(&self) -> bool {
        match &self.family {
            Family::Table { gamma, .. } => gamma.iter().all(|&g| g == 1.0),
            _ => true,
        }
    }

    fn exhausted(&self, index: usize) -> Error {
        Error::CoefficientExhausted { system: self.name.clone(), index }
    }

    pub fn gamma(&self, k: usize) -> Result<f64> {
        match &self.family {
            Family::Table { gamma, .. } => gamma.get(k).copied().ok_or_else(|| self.exhausted(k)),
            _ => Ok(1.0),
        }
    }

    pub fn alpha(&self, k: usize) -> Result<f64> {
        match &self.family {
            Family::Table { alpha, .. } => alpha.get(k).copied().ok_or_else(|| self.exhausted(k)),
            _ => Ok(0.0),
        }
    }

    pub fn beta(&self, k: usize) -> Result<f64> {
        let kf = k as f64;
        match &self.family {
            _ if k == 0 => Ok(1.0),
            Family::Hermite => Ok(kf),
            Family::Legendre => Ok(kf * kf / (4.0 * kf * kf - 1.0)),
            Family::Chebyshev => Ok(if k == 1 { 0.5 } else { 0.25 }),
            Family::Table { beta, .. } => beta.get(k).copied().ok_or_else(|| self.exhausted(k)),
        }
    }

    /// Exact `(γ_k, α_k, β_k)`. Built-in families use their closed forms;
    /// tabulated systems use the exact binary value of each double.
    pub fn exact_coefficients(&self, k: usize) -> Result<(BigRational, BigRational, BigRational)> {
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        let ratio = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let k64 = k as i64;
        match &self.family {
            Family::Hermite => Ok((int(1), int(0), if k == 0 { int(1) } else { int(k64) })),
            Family::Legendre => {
                let beta = if k == 0 { int(1) } else { ratio(k64 * k64, 4 * k64 * k64 - 1) };
                Ok((int(1), int(0), beta))
            }
            Family::Chebyshev => {
                let beta = match k {
                    0 => int(1),
                    1 => ratio(1, 2),
                    _ => ratio(1, 4),
                };
                Ok((int(1), int(0), beta))
            }
            Family::Table { .. } => {
                let exact = |v: f64| {
                    BigRational::from_float(v).ok_or_else(|| Error::Numeric("non-finite coefficient".into()))
                };
                Ok((exact(self.gamma(k)?)?, exact(self.alpha(k)?)?, exact(self.beta(k)?)?))
            }
        }
    }

    /// `E(X^k)` under the system's probability law.
    ///
    /// Built-in laws use closed forms; tabulated systems use `E(x^k) = c₀(x^k)`.
    pub fn moment(&self, k: usize) -> Result<f64> {
        let odd = k % 2 == 1;
        match self.family {
            Family::Hermite => Ok(if odd { 0.0 } else { double_factorial(k.saturating_sub(1)) }),
            Family::Legendre => Ok(if odd { 0.0 } else { 1.0 / (k as f64 + 1.0) }),
            Family::Chebyshev => {
                if odd {
                    return Ok(0.0);
                }
                // C(k, k/2) / 2^k, accumulated as a product to stay in range.
                let m = k / 2;
                Ok((1..=m).fold(1.0, |acc, i| acc * (m + i) as f64 / (4.0 * i as f64)))
            }
            Family::Table { .. } => Ok(monomial_to_ortho(self, k)?.coeff(0)),
        }
    }
}

impl fmt::Display for RecurrenceSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn double_factorial(n: usize) -> f64 {
    (1..=n).rev().step_by(2).fold(1.0, |acc, i| acc * i as f64)
}

/// Basis tag of a [`UniPoly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniBasis {
    /// Coefficient `k` multiplies `x^k`.
    Monomial,
    /// Coefficient `k` multiplies `π_k(x)`.
    Ortho,
}

/// Dense univariate polynomial, indexed by degree.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
    basis: UniBasis,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>, basis: UniBasis) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs, basis }
    }

    pub fn monomial(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs, UniBasis::Monomial)
    }

    pub fn ortho(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs, UniBasis::Ortho)
    }

    pub fn zero(basis: UniBasis) -> Self {
        Self { coeffs: Vec::new(), basis }
    }

    /// Monic polynomial `Π (x − r)` over the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::monomial(vec![1.0]), |acc, &r| acc.mul(&Self::monomial(vec![-r, 1.0])))
    }

    pub fn basis(&self) -> UniBasis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn require(&self, basis: UniBasis) -> Result<()> {
        if self.basis == basis {
            Ok(())
        } else if basis == UniBasis::Monomial {
            Err(Error::WrongBasis("expected a monomial-basis polynomial"))
        } else {
            Err(Error::WrongBasis("expected an orthogonal-basis polynomial"))
        }
    }

    /// Evaluates the polynomial; `sys` is consulted only in the orthogonal basis.
    pub fn eval(&self, sys: &RecurrenceSystem, x: f64) -> Result<f64> {
        match self.basis {
            UniBasis::Monomial => Ok(self.horner(x)),
            UniBasis::Ortho => {
                let Some(deg) = self.degree() else { return Ok(0.0) };
                let values = eval_pi_upto(sys, deg, x)?;
                Ok(self.coeffs.iter().zip(&values).map(|(c, v)| c * v).sum())
            }
        }
    }

    fn horner(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect(), self.basis)
    }

    /// Coefficientwise sum; both operands must share a basis.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.basis, other.basis, "adding polynomials in different bases");
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect(), self.basis)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Product of two monomial-basis polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            self.basis == UniBasis::Monomial && other.basis == UniBasis::Monomial,
            "products are only formed in the monomial basis"
        );
        if self.is_zero() || other.is_zero() {
            return Self::zero(UniBasis::Monomial);
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::monomial(out)
    }

    /// Euclidean division `self = q·divisor + r` with `deg r < deg divisor`.
    ///
    /// Monomial basis only; the divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.require(UniBasis::Monomial)?;
        divisor.require(UniBasis::Monomial)?;
        let m = divisor.degree().ok_or(Error::UndefinedDegree)?;
        let lead = divisor.coeffs[m];
        let mut rem = self.coeffs.clone();
        if rem.len() <= m {
            return Ok((Self::zero(UniBasis::Monomial), self.clone()));
        }
        let mut quot = vec![0.0; rem.len() - m];
        for k in (m..rem.len()).rev() {
            let c = rem[k] / lead;
            quot[k - m] = c;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k - m + j] -= c * d;
            }
            rem[k] = 0.0;
        }
        rem.truncate(m);
        Ok((Self::monomial(quot), Self::monomial(rem)))
    }
}

/// A Gaussian quadrature rule: the zeros of `π_n` with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Degree of exactness, `2n − 1`.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// `π_n(x)` by the forward recurrence.
pub fn eval_pi(sys: &RecurrenceSystem, n: usize, x: f64) -> Result<f64> {
    Ok(eval_pi_upto(sys, n, x)?[n])
}

/// `[π_0(x), …, π_n(x)]`.
pub fn eval_pi_upto(sys: &RecurrenceSystem, n: usize, x: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (sys.gamma(k)? * x - sys.alpha(k)?) * cur - if k == 0 { 0.0 } else { sys.beta(k)? * prev };
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

/// `(π_n(x), π_n'(x))`.
fn eval_pi_with_derivative(sys: &RecurrenceSystem, n: usize, x: f64) -> Result<(f64, f64)> {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 0..n {
        let g = sys.gamma(k)?;
        let a = sys.alpha(k)?;
        let b = if k == 0 { 0.0 } else { sys.beta(k)? };
        let p_next = (g * x - a) * p - b * p_prev;
        let d_next = g * p + (g * x - a) * d - b * d_prev;
        (p_prev, p) = (p, p_next);
        (d_prev, d) = (d, d_next);
    }
    Ok((p, d))
}

/// `‖π_n‖² = β_n β_{n−1} ⋯ β_0` for monic systems.
pub fn norm_sq(sys: &RecurrenceSystem, n: usize) -> Result<f64> {
    if !sys.is_monic() {
        return Err(Error::UnsupportedNormalization(sys.name().to_string()));
    }
    (0..=n).try_fold(1.0, |acc, k| Ok(acc * sys.beta(k)?))
}

/// Rows `k = 0..=max_k` hold the Fourier coefficients `c_j(x^k)`, `j ≤ k`.
pub(crate) fn monomial_table(sys: &RecurrenceSystem, max_k: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = vec![vec![1.0]];
    for k in 1..=max_k {
        let prev = &rows[k - 1];
        let at = |j: usize| prev.get(j).copied().unwrap_or(0.0);
        let mut row = vec![0.0; k + 1];
        for (j, slot) in row.iter_mut().enumerate() {
            let mut c = 0.0;
            if j >= 1 {
                c += at(j - 1) / sys.gamma(j - 1)?;
            }
            if j < k {
                c += at(j) * sys.alpha(j)? / sys.gamma(j)?;
            }
            if j + 1 < k {
                c += at(j + 1) * sys.beta(j + 1)? / sys.gamma(j + 1)?;
            }
            *slot = c;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Rows `j = 0..=max_j` hold the monomial coefficients of `π_j`.
pub(crate) fn pi_table(sys: &RecurrenceSystem, max_j: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 0..max_j {
        let (g, a) = (sys.gamma(k)?, sys.alpha(k)?);
        let b = if k == 0 { 0.0 } else { sys.beta(k)? };
        let cur = &rows[k];
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += g * c;
            next[i] -= a * c;
        }
        if k >= 1 {
            for (i, c) in rows[k - 1].iter().enumerate() {
                next[i] -= b * c;
            }
        }
        rows.push(next);
    }
    Ok(rows)
}

/// Fourier coefficients of `x^k`: `x^k = Σ_j c_j(x^k) π_j`.
pub fn monomial_to_ortho(sys: &RecurrenceSystem, k: usize) -> Result<UniPoly> {
    Ok(UniPoly::ortho(monomial_table(sys, k)?.pop().unwrap_or_default()))
}

/// Rewrites a monomial-basis polynomial in the orthogonal basis.
pub fn to_ortho(sys: &RecurrenceSystem, p: &UniPoly) -> Result<UniPoly> {
    p.require(UniBasis::Monomial)?;
    let Some(deg) = p.degree() else { return Ok(UniPoly::zero(UniBasis::Ortho)) };
    let table = monomial_table(sys, deg)?;
    let mut out = vec![0.0; deg + 1];
    for (k, &a) in p.coeffs().iter().enumerate() {
        for (j, c) in table[k].iter().enumerate() {
            out[j] += a * c;
        }
    }
    Ok(UniPoly::ortho(out))
}

/// Expands an orthogonal-basis polynomial into monomials.
pub fn ortho_to_monomial(sys: &RecurrenceSystem, p: &UniPoly) -> Result<UniPoly> {
    p.require(UniBasis::Ortho)?;
    let Some(deg) = p.degree() else { return Ok(UniPoly::zero(UniBasis::Monomial)) };
    let table = pi_table(sys, deg)?;
    let mut out = vec![0.0; deg + 1];
    for (j, &c) in p.coeffs().iter().enumerate() {
        for (i, a) in table[j].iter().enumerate() {
            out[i] += c * a;
        }
    }
    Ok(UniPoly::monomial(out))
}

/// Zeros of `π_n`, ascending, as eigenvalues of the Jacobi matrix.
pub fn nodes(sys: &RecurrenceSystem, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidDesign("a node set needs n >= 1".into()));
    }
    if !sys.is_monic() {
        return Err(Error::UnsupportedNormalization(sys.name().to_string()));
    }
    let mut jacobi = DMatrix::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = sys.alpha(k)?;
        if k + 1 < n {
            let b = sys.beta(k + 1)?;
            if b <= 0.0 {
                return Err(Error::InvalidRecurrence(format!("beta_{} must be positive", k + 1)));
            }
            jacobi[(k, k + 1)] = b.sqrt();
            jacobi[(k + 1, k)] = b.sqrt();
        }
    }
    let eig = nalgebra::SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric(format!("Jacobi eigen-solver did not converge for n = {n}")))?;
    let mut zs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    // One guarded Newton step on π_n tightens the eigenvalues.
    for z in zs.iter_mut() {
        let (p, dp) = eval_pi_with_derivative(sys, n, *z)?;
        if dp != 0.0 {
            let cand = *z - p / dp;
            if eval_pi(sys, n, cand)?.abs() < p.abs() {
                *z = cand;
            }
        }
    }
    zs.sort_by(f64::total_cmp);
    Ok(zs)
}

/// Weights `λ_z = E(l_z(X))` of the interpolatory rule on arbitrary distinct
/// points, read off as the `π_0` coefficients of the Lagrange polynomials.
pub fn interpolatory_weights(sys: &RecurrenceSystem, points: &[f64]) -> Result<Vec<f64>> {
    let n = points.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, &z) in points.iter().enumerate() {
        for (k, v) in eval_pi_upto(sys, n - 1, z)?.into_iter().enumerate() {
            m[(i, k)] = v;
        }
    }
    // Row 0 of M⁻¹ holds the π_0 coefficients of every l_z.
    let e0 = DVector::from_fn(n, |k, _| if k == 0 { 1.0 } else { 0.0 });
    let w = linalg::solve_transposed(&m, &e0)
        .ok_or_else(|| Error::DegenerateNodes("evaluation matrix is singular".into()))?;
    Ok(w.iter().copied().collect())
}

/// The `n`-point Gaussian rule of the system.
///
/// On the zeros of `π_n` the solution of the evaluation system is
/// `λ_z = 1 / K_n(z, z)`; the kernel is a sum of positive terms, so tiny tail
/// weights keep their relative accuracy.
pub fn gauss_rule(sys: &RecurrenceSystem, n: usize) -> Result<QuadratureRule> {
    let nodes = nodes(sys, n)?;
    let weights = nodes.iter().map(|&z| cd_kernel(sys, n, z, z).map(f64::recip)).collect::<Result<Vec<_>>>()?;
    Ok(QuadratureRule { nodes, weights, degree: 2 * n - 1 })
}

/// Roots of a monic monomial-basis polynomial, checked to be real and distinct.
pub fn distinct_real_roots(poly: &UniPoly) -> Result<Vec<f64>> {
    poly.require(UniBasis::Monomial)?;
    let m = poly.degree().ok_or(Error::UndefinedDegree)?;
    let lead = poly.coeff(m);
    if (lead - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDesign("node polynomial must be monic".into()));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut companion = DMatrix::zeros(m, m);
    for i in 1..m {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..m {
        companion[(i, m - 1)] = -poly.coeff(i);
    }
    let eig = companion.complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if eig.iter().any(|z| z.im.abs() > ROOT_SEPARATION * scale) {
        return Err(Error::InvalidDesign("node polynomial has non-real roots".into()));
    }
    let mut roots: Vec<f64> = eig.iter().map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    if roots.windows(2).any(|w| w[1] - w[0] <= ROOT_SEPARATION * scale) {
        return Err(Error::InvalidDesign("node polynomial has repeated roots".into()));
    }
    Ok(roots)
}

/// Error `E(p(X)) − Σ_z p(z) λ_z` of the interpolatory rule on the roots of
/// `node_poly`, computed from the division `p = q·g + r` as
/// `Σ_k c_k(q) c_k(g) ‖π_k‖²`.
pub fn quadrature_error_1d(sys: &RecurrenceSystem, p: &UniPoly, node_poly: &UniPoly) -> Result<f64> {
    p.require(UniBasis::Monomial)?;
    distinct_real_roots(node_poly)?;
    division_error(sys, p, node_poly)
}

/// `Σ_k c_k(q) c_k(g) ‖π_k‖²` where `p = q·g + r`; no checks on `g`.
pub(crate) fn division_error(sys: &RecurrenceSystem, p: &UniPoly, g: &UniPoly) -> Result<f64> {
    let (q, _) = p.div_rem(g)?;
    let (Some(dq), Some(dg)) = (q.degree(), g.degree()) else { return Ok(0.0) };
    let cq = to_ortho(sys, &q)?;
    let cg = to_ortho(sys, g)?;
    (0..=dq.min(dg)).try_fold(0.0, |acc, k| Ok(acc + cq.coeff(k) * cg.coeff(k) * norm_sq(sys, k)?))
}

/// Christoffel–Darboux kernel `Σ_{k<n} π̃_k(x) π̃_k(t)` by direct summation.
pub fn cd_kernel(sys: &RecurrenceSystem, n: usize, x: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let px = eval_pi_upto(sys, n - 1, x)?;
    let pt = eval_pi_upto(sys, n - 1, t)?;
    (0..n).try_fold(0.0, |acc, k| Ok(acc + px[k] * pt[k] / norm_sq(sys, k)?))
}

/// Closed Christoffel–Darboux form of [`cd_kernel`]; switches to the
/// confluent (derivative) form when `x` and `t` coincide.
pub fn cd_kernel_closed(sys: &RecurrenceSystem, n: usize, x: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let hn = norm_sq(sys, n)?.sqrt();
    let hm = norm_sq(sys, n - 1)?.sqrt();
    let sb = sys.beta(n)?.sqrt();
    if (x - t).abs() > 1e-8 * x.abs().max(t.abs()).max(1.0) {
        let (an, am) = (eval_pi(sys, n, x)? / hn, eval_pi(sys, n - 1, x)? / hm);
        let (bn, bm) = (eval_pi(sys, n, t)? / hn, eval_pi(sys, n - 1, t)? / hm);
        Ok(sb * (an * bm - am * bn) / (x - t))
    } else {
        let (pn, dn) = eval_pi_with_derivative(sys, n, t)?;
        let (pm, dm) = eval_pi_with_derivative(sys, n - 1, t)?;
        Ok(sb * ((dn / hn) * (pm / hm) - (dm / hm) * (pn / hn)))
    }
}

/// Fourier coefficient `c_i(f) = Σ_z f(z) π_i(z) λ_z / ‖π_i‖²` recovered from
/// values on the nodes of a Gaussian rule.
///
/// Exact when `deg f + i ≤ 2n − 1`; checking that is the caller's job.
pub fn fourier_identify(sys: &RecurrenceSystem, rule: &QuadratureRule, fvals: &[f64], i: usize) -> Result<f64> {
    if fvals.len() != rule.len() {
        return Err(Error::DimensionMismatch { expected: rule.len(), found: fvals.len() });
    }
    let mut acc = 0.0;
    for ((&z, &w), &f) in rule.nodes.iter().zip(&rule.weights).zip(fvals) {
        acc += f * eval_pi(sys, i, z)? * w;
    }
    Ok(acc / norm_sq(sys, i)?)
}

/// Exact `E(π_j(X) π_k(X))` for monic systems, used in tests and by the
/// exact vanishing-ideal path.
pub(crate) fn exact_pi_values(sys: &RecurrenceSystem, n: usize, x: &BigRational) -> Result<Vec<BigRational>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one());
    let (mut prev, mut cur) = (BigRational::zero(), BigRational::one());
    for k in 0..n {
        let (g, a, b) = sys.exact_coefficients(k)?;
        let mut next = (g * x - a) * &cur;
        if k > 0 {
            next -= b * &prev;
        }
        prev = std::mem::replace(&mut cur, next);
        out.push(cur.clone());
    }
    Ok(out)
}
